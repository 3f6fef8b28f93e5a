//! Output assembly. Every file is rendered fully in memory and written
//! through a temp-file rename so a crash cannot leave a half-written
//! artifact, and reruns with the same resolved config are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

use dynembed::linkpred::{welch_t_test, MetricsReport, ModelKind};

pub const CSV_HEADER: &str =
    "dataset,model,embedder,dim,smoothing,theta,alpha,lambda,repeat,auc,auprc,ndcg_at_p";

/// One evaluated (model, embedder, dimension) cell.
pub struct Cell {
    pub dataset: String,
    pub model: ModelKind,
    pub embedder: String,
    pub dim: usize,
    /// Combination rule name; only per-pair-map models smooth.
    pub smoothing: Option<&'static str>,
    pub report: MetricsReport,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv_rows(cells: &[Cell]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for cell in cells {
        let prefix = format!(
            "{},{},{},{},{}",
            cell.dataset,
            cell.model.name(),
            cell.embedder,
            cell.dim,
            cell.smoothing.unwrap_or("")
        );
        for row in &cell.report.rows {
            writeln!(
                out,
                "{prefix},{},{},{},{},{},{},{}",
                opt(row.choice.theta),
                opt(row.choice.alpha),
                opt(row.choice.lambda),
                row.repeat,
                row.auc,
                row.auprc,
                row.ndcg
            )
            .unwrap();
        }
        for (tag, auc, auprc, ndcg) in [
            ("mean", cell.report.auc.mean, cell.report.auprc.mean, cell.report.ndcg.mean),
            ("sd", cell.report.auc.sd, cell.report.auprc.sd, cell.report.ndcg.sd),
        ] {
            writeln!(out, "{prefix},,,,{tag},{auc},{auprc},{ndcg}").unwrap();
        }
    }
    out
}

/// Plain-text table: one line per cell with mean +- sd metrics and a
/// two-sided Welch p-value of the cell's per-repeat AUCs against the
/// static baseline evaluated with the same embedder and dimension.
pub fn summary_table(cells: &[Cell]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<15} {:<9} {:>4}  {:<17} {:<17} {:<17} {:>11}",
        "model", "embedder", "dim", "auc", "auprc", "ndcg@p", "p_vs_static"
    )
    .unwrap();
    for cell in cells {
        let baseline = cells.iter().find(|c| {
            c.model == ModelKind::StaticBaseline
                && c.embedder == cell.embedder
                && c.dim == cell.dim
                && c.dataset == cell.dataset
        });
        let p = match baseline {
            Some(b) if cell.model != ModelKind::StaticBaseline => {
                welch_t_test(&cell.report.auc_values(), &b.report.auc_values())
                    .map(|t| format!("{:.4}", t.p))
                    .unwrap_or_else(|| "-".to_string())
            }
            _ => "-".to_string(),
        };
        let fmt = |m: f64, s: f64| format!("{m:.4} +- {s:.4}");
        writeln!(
            out,
            "{:<15} {:<9} {:>4}  {:<17} {:<17} {:<17} {:>11}",
            cell.model.name(),
            cell.embedder,
            cell.dim,
            fmt(cell.report.auc.mean, cell.report.auc.sd),
            fmt(cell.report.auprc.mean, cell.report.auprc.sd),
            fmt(cell.report.ndcg.mean, cell.report.ndcg.sd),
            p
        )
        .unwrap();
    }
    out
}

/// Sorted key=value lines recording every resolved setting of the run.
pub fn manifest(entries: &[(&str, String)]) -> String {
    let mut lines: Vec<String> =
        entries.iter().map(|(k, v)| format!("{k}={v}")).collect();
    lines.sort();
    lines.join("\n") + "\n"
}

pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("moving {} into place", path.display()))?;
    Ok(())
}

pub fn float_list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
