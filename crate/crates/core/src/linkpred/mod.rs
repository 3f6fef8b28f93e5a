//! Temporal link-prediction evaluation: the last snapshot is held out as
//! the target, every model builds its feature embedding from the earlier
//! snapshots only, and candidate hyperparameters are picked per repeat by
//! validation AUC before test metrics are reported.

mod logreg;
mod metrics;
mod report;
mod split;

pub use logreg::{logreg_fit, logreg_fit_traced, logreg_gradient, logreg_loss, logreg_score, LogRegModel};
pub use metrics::{auc, auprc, ndcg_at_p};
pub use report::{mean_sd, welch_t_test, HyperChoice, MetricSummary, MetricsReport, RepeatOutcome, WelchTest};
pub use split::{make_split, EvalConfig, EvalSplit};

use nalgebra::DMatrix;

use crate::bcgd::{fit_bcgd, BcgdConfig};
use crate::embed::{embed_sequence, EmbedMethod};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::TemporalGraph;
use crate::retrofit::{retrofit_sequence, RetrofitConfig};
use crate::seeds::{derive_seed, STREAM_BCGD, STREAM_EMBED, STREAM_SPLIT};
use crate::transform::{combine, fit_homogeneous, fit_pairwise, project, GdConfig, SmoothingKind, SmoothingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Chain each snapshot's embedding from the previous one.
    Ret,
    /// One shared linear map fit over all consecutive pairs.
    HomoLt,
    /// Per-pair linear maps blended by the smoothing scheme.
    HeterLt,
    /// Temporal non-negative factorization baseline.
    Bcgd,
    /// Last history snapshot's raw embedding.
    StaticBaseline,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Ret,
        ModelKind::HomoLt,
        ModelKind::HeterLt,
        ModelKind::Bcgd,
        ModelKind::StaticBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ret => "RET",
            ModelKind::HomoLt => "HomoLT",
            ModelKind::HeterLt => "HeterLT",
            ModelKind::Bcgd => "BCGD",
            ModelKind::StaticBaseline => "StaticBaseline",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
    }
}

/// Model-side knobs for `evaluate`. Grid fields hold the candidates the
/// validation split picks from; single-candidate models ignore them.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperConfig {
    pub retrofit: RetrofitConfig,
    pub gd: GdConfig,
    pub bcgd: BcgdConfig,
    pub smoothing: SmoothingSpec,
    pub alpha_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// Ridge strength for the pair classifier.
    pub l2: f64,
    /// Multiplicity-weighted base embeddings.
    pub weighted: bool,
}

impl Default for HyperConfig {
    fn default() -> Self {
        HyperConfig {
            retrofit: RetrofitConfig::default(),
            gd: GdConfig::default(),
            bcgd: BcgdConfig::default(),
            smoothing: SmoothingSpec::default(),
            alpha_grid: vec![0.1, 1.0, 10.0],
            theta_grid: vec![0.1, 0.3, 0.5],
            lambda_grid: vec![0.01, 0.1, 1.0],
            l2: 1.0,
            weighted: false,
        }
    }
}

impl HyperConfig {
    pub fn validate(&self) -> Result<()> {
        self.gd.validate()?;
        self.smoothing.validate()?;
        if self.alpha_grid.is_empty() || self.theta_grid.is_empty() || self.lambda_grid.is_empty() {
            return Err(Error::invalid("grids", "candidate grids must be non-empty"));
        }
        if !(self.l2 >= 0.0) {
            return Err(Error::invalid("l2", "must be non-negative"));
        }
        Ok(())
    }
}

/// Row i = phi(u_i) element-wise times phi(v_i).
pub fn hadamard_features(
    phi: &EmbeddingMatrix,
    pairs: &[(usize, usize)],
) -> Result<DMatrix<f64>> {
    let m = phi.matrix();
    let mut out = DMatrix::zeros(pairs.len(), phi.dim());
    for (i, &(u, v)) in pairs.iter().enumerate() {
        for &vertex in [u, v].iter() {
            if vertex >= phi.rows() {
                return Err(Error::VertexOutOfRange { index: vertex, vertices: phi.rows() });
            }
        }
        for k in 0..phi.dim() {
            out[(i, k)] = m[(u, k)] * m[(v, k)];
        }
    }
    Ok(out)
}

fn part_pairs(part: &[((usize, usize), bool)]) -> (Vec<(usize, usize)>, Vec<bool>) {
    (
        part.iter().map(|&(p, _)| p).collect(),
        part.iter().map(|&(_, l)| l).collect(),
    )
}

/// Candidate feature embeddings for one model, hyperparameter choice
/// attached. Computed once and shared by every repeat.
fn candidate_embeddings(
    graph: &TemporalGraph,
    model: ModelKind,
    base: &EmbedMethod,
    d: usize,
    master_seed: u64,
    hyper: &HyperConfig,
) -> Result<Vec<(HyperChoice, EmbeddingMatrix)>> {
    let hist = graph.truncated(graph.snapshot_count() - 1)?;
    let none = HyperChoice::default();

    if let ModelKind::Bcgd = model {
        let mut out = Vec::new();
        for &lambda in &hyper.lambda_grid {
            let cfg = BcgdConfig {
                lambda,
                d,
                seed: derive_seed(master_seed, STREAM_BCGD, 0),
                ..hyper.bcgd.clone()
            };
            let phis = fit_bcgd(&hist, &cfg)?;
            let last = phis.into_iter().next_back().unwrap();
            out.push((HyperChoice { lambda: Some(lambda), ..none }, last));
        }
        return Ok(out);
    }

    let embed_seed = derive_seed(master_seed, STREAM_EMBED, 0);
    let base_seq = embed_sequence(&hist, base, d, embed_seed, hyper.weighted)?;
    let last = base_seq.last().unwrap();

    match model {
        ModelKind::StaticBaseline => Ok(vec![(none, last.clone())]),
        ModelKind::Ret => {
            let mut out = Vec::new();
            for &alpha in &hyper.alpha_grid {
                let cfg = RetrofitConfig { alpha, ..hyper.retrofit.clone() };
                let chain = retrofit_sequence(&base_seq[0], &hist.snapshots()[1..], &cfg)?;
                let phi = chain.into_iter().next_back().unwrap();
                out.push((HyperChoice { alpha: Some(alpha), ..none }, phi));
            }
            Ok(out)
        }
        ModelKind::HomoLt => {
            let w = fit_homogeneous(&base_seq, &hyper.gd)?;
            Ok(vec![(none, project(last, &w)?)])
        }
        ModelKind::HeterLt => {
            let mut ws = Vec::with_capacity(base_seq.len() - 1);
            for pair in base_seq.windows(2) {
                ws.push(fit_pairwise(&pair[0], &pair[1], &hyper.gd)?);
            }
            let thetas: Vec<Option<f64>> = if hyper.smoothing.kind == SmoothingKind::Wct {
                hyper.theta_grid.iter().map(|&t| Some(t)).collect()
            } else {
                vec![None]
            };
            let mut out = Vec::new();
            for theta in thetas {
                let spec = SmoothingSpec {
                    theta: theta.unwrap_or(hyper.smoothing.theta),
                    ..hyper.smoothing.clone()
                };
                let w = combine(&ws, &spec)?;
                out.push((HyperChoice { theta, ..none }, project(last, &w)?));
            }
            Ok(out)
        }
        ModelKind::Bcgd => unreachable!("handled above"),
    }
}

/// Full protocol for one model on one graph: hold out the last snapshot,
/// embed the rest, and for each repeat split / fit / select / score.
/// Candidate selection maximizes validation AUC, first candidate winning
/// ties. Deterministic given cfg.seed.
pub fn evaluate(
    graph: &TemporalGraph,
    model: ModelKind,
    base: &EmbedMethod,
    d: usize,
    cfg: &EvalConfig,
    hyper: &HyperConfig,
) -> Result<MetricsReport> {
    cfg.validate()?;
    hyper.validate()?;
    let t_count = graph.snapshot_count();
    if t_count < 3 {
        return Err(Error::TooFewSnapshots { found: t_count, need: 3 });
    }
    let target_idx = t_count - 1;
    let candidates = candidate_embeddings(graph, model, base, d, cfg.seed, hyper)?;

    let mut rows = Vec::with_capacity(cfg.repeats);
    for r in 0..cfg.repeats {
        let repeat_seed = derive_seed(cfg.seed, STREAM_SPLIT, r as u64);
        let split = make_split(graph, target_idx, cfg, repeat_seed)?;
        let (train_pairs, train_labels) = part_pairs(&split.train);
        let (val_pairs, val_labels) = part_pairs(&split.validation);
        let (test_pairs, test_labels) = part_pairs(&split.test);

        let mut fitted = Vec::with_capacity(candidates.len());
        for (_, phi) in &candidates {
            let x_train = hadamard_features(phi, &train_pairs)?;
            fitted.push(logreg_fit(&x_train, &train_labels, hyper.l2, &hyper.gd)?);
        }

        let best = if candidates.len() == 1 {
            0
        } else {
            let mut best = 0;
            let mut best_auc = f64::NEG_INFINITY;
            for (ci, model_fit) in fitted.iter().enumerate() {
                let x_val = hadamard_features(&candidates[ci].1, &val_pairs)?;
                let val_auc = auc(&logreg_score(model_fit, &x_val)?, &val_labels)?;
                if val_auc > best_auc {
                    best_auc = val_auc;
                    best = ci;
                }
            }
            best
        };

        let x_test = hadamard_features(&candidates[best].1, &test_pairs)?;
        let scores = logreg_score(&fitted[best], &x_test)?;
        rows.push(RepeatOutcome {
            repeat: r,
            choice: candidates[best].0,
            auc: auc(&scores, &test_labels)?,
            auprc: auprc(&scores, &test_labels)?,
            ndcg: ndcg_at_p(&scores, &test_labels, cfg.ndcg_p)?,
        });
    }
    Ok(MetricsReport::from_rows(rows))
}
