//! Aggregation of per-repeat metric values and the significance test
//! used when comparing a model against the static baseline.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Hyperparameter values picked by validation for one repeat. Fields
/// are None when the model has no such knob.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperChoice {
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatOutcome {
    pub repeat: usize,
    pub choice: HyperChoice,
    pub auc: f64,
    pub auprc: f64,
    pub ndcg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1); zero for a single repeat.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rows: Vec<RepeatOutcome>,
    pub auc: MetricSummary,
    pub auprc: MetricSummary,
    pub ndcg: MetricSummary,
}

pub fn mean_sd(xs: &[f64]) -> MetricSummary {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = if n < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    MetricSummary { mean, sd }
}

impl MetricsReport {
    pub fn from_rows(rows: Vec<RepeatOutcome>) -> Self {
        debug_assert!(!rows.is_empty());
        let collect = |f: fn(&RepeatOutcome) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        let auc = mean_sd(&collect(|r| r.auc));
        let auprc = mean_sd(&collect(|r| r.auprc));
        let ndcg = mean_sd(&collect(|r| r.ndcg));
        MetricsReport { rows, auc, auprc, ndcg }
    }

    pub fn auc_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.auc).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Welch's unequal-variance t-test. None when either sample has fewer
/// than two values or both variances vanish.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Option<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sa = mean_sd(a);
    let sb = mean_sd(b);
    let va = sa.sd * sa.sd / na;
    let vb = sb.sd * sb.sd / nb;
    let denom = va + vb;
    if denom == 0.0 {
        return None;
    }
    let t = (sa.mean - sb.mean) / denom.sqrt();
    let df = denom * denom / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Some(WelchTest { t, df, p })
}
