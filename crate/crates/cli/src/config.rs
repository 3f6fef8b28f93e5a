//! Config-file loading and flag merging. A config file is plain
//! `key=value` lines (`#` starts a comment); flags override file entries,
//! file entries override built-in defaults. Unknown or malformed keys are
//! rejected by name so a typo cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use dynembed::embed::{EmbedMethod, LineConfig, LineOrder, SkipgramConfig};
use dynembed::graph::SnapshotSpec;
use dynembed::linkpred::{EvalConfig, HyperConfig, ModelKind};
use dynembed::transform::SmoothingKind;

use crate::args::BinningArgs;

pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let mut values = BTreeMap::new();
        let Some(path) = path else {
            return Ok(FileConfig { values });
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("config file {}", path.display()))?;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value, got {raw:?}", ln + 1))?;
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("config key {key} given twice");
            }
        }
        Ok(FileConfig { values })
    }

    /// Every key must appear in `allowed` for the running subcommand.
    pub fn check_known(&self, allowed: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                bail!("config key {key} is not recognized by this command");
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("config key {key}: cannot parse {s:?}: {e}")),
        }
    }
}

/// Flag beats file beats default.
pub fn pick<T: FromStr>(flag: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T>
where
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(file.get(key)?.unwrap_or(default)),
    }
}

/// Presence-style flags: the flag can only turn the setting on.
pub fn pick_flag(flag: bool, file: &FileConfig, key: &str) -> Result<bool> {
    if flag {
        return Ok(true);
    }
    Ok(file.get::<bool>(key)?.unwrap_or(false))
}

pub fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("{field} is required (flag --{field} or config key {field})"))
}

pub fn parse_list<T: FromStr>(text: &str, field: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    let items: Vec<T> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| anyhow!("{field}: cannot parse {:?}: {e}", s.trim()))
        })
        .collect::<Result<_>>()?;
    if items.is_empty() {
        bail!("{field}: list must be non-empty");
    }
    Ok(items)
}

pub fn resolve_binning(args: &BinningArgs, file: &FileConfig) -> Result<SnapshotSpec> {
    let bins = match args.snapshots {
        Some(b) => Some(b),
        None => file.get::<usize>("snapshots")?,
    };
    let boundaries = match &args.boundaries {
        Some(b) => Some(b.clone()),
        None => file.get::<String>("boundaries")?,
    };
    match (bins, boundaries) {
        (Some(_), Some(_)) => bail!("snapshots and boundaries are mutually exclusive"),
        (Some(bins), None) => Ok(SnapshotSpec::EqualWidth { bins }),
        (None, Some(cuts)) => Ok(SnapshotSpec::Boundaries { cuts: parse_list(&cuts, "boundaries")? }),
        (None, None) => Ok(SnapshotSpec::PreBinned),
    }
}

pub fn binning_name(spec: &SnapshotSpec) -> String {
    match spec {
        SnapshotSpec::EqualWidth { bins } => format!("equal-width:{bins}"),
        SnapshotSpec::Boundaries { cuts } => format!(
            "boundaries:{}",
            cuts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        ),
        SnapshotSpec::PreBinned => "prebinned".to_string(),
    }
}

pub fn parse_models(text: &str) -> Result<Vec<ModelKind>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(ModelKind::ALL.to_vec());
    }
    text.split(',')
        .map(|s| {
            ModelKind::parse(s.trim()).ok_or_else(|| {
                anyhow!(
                    "model: unknown value {:?} (expected StaticBaseline, RET, HomoLT, HeterLT, BCGD, or all)",
                    s.trim()
                )
            })
        })
        .collect()
}

pub fn parse_smoothing_kind(text: &str) -> Result<SmoothingKind> {
    match text.to_ascii_lowercase().as_str() {
        "avg" => Ok(SmoothingKind::Avg),
        "linear" => Ok(SmoothingKind::Linear),
        "exp" => Ok(SmoothingKind::Exp),
        "wct" => Ok(SmoothingKind::Wct),
        other => bail!("smoothing: unknown value {other:?} (expected avg, linear, exp, or wct)"),
    }
}

pub fn smoothing_kind_name(kind: SmoothingKind) -> &'static str {
    match kind {
        SmoothingKind::Avg => "avg",
        SmoothingKind::Linear => "linear",
        SmoothingKind::Exp => "exp",
        SmoothingKind::Wct => "wct",
    }
}

/// Builds one embedder from its name, pulling tuning keys from the file.
/// Per-snapshot seeds are injected downstream from the master seed, so
/// embedder seed fields are left at zero here.
pub fn parse_embedder(name: &str, file: &FileConfig) -> Result<EmbedMethod> {
    match name.to_ascii_lowercase().as_str() {
        "tsvd" => Ok(EmbedMethod::Tsvd),
        "pca" => Ok(EmbedMethod::Pca),
        "random" => Ok(EmbedMethod::Random),
        "randwalk" => {
            let d = SkipgramConfig::default();
            Ok(EmbedMethod::RandWalk(SkipgramConfig {
                walks_per_node: file.get("walks_per_node")?.unwrap_or(d.walks_per_node),
                walk_length: file.get("walk_length")?.unwrap_or(d.walk_length),
                window: file.get("window")?.unwrap_or(d.window),
                negative_samples: file.get("negative_samples")?.unwrap_or(d.negative_samples),
                epochs: file.get("epochs")?.unwrap_or(d.epochs),
                p: file.get("p")?.unwrap_or(d.p),
                q: file.get("q")?.unwrap_or(d.q),
                learning_rate: file.get("walk_learning_rate")?.unwrap_or(d.learning_rate),
                seed: 0,
            }))
        }
        "line" => {
            let d = LineConfig::default();
            let order = match file.get::<String>("line_order")?.as_deref() {
                None | Some("first") => LineOrder::First,
                Some("second") => LineOrder::Second,
                Some(other) => bail!("line_order: unknown value {other:?} (expected first or second)"),
            };
            Ok(EmbedMethod::Line(LineConfig {
                order,
                edge_samples: file.get("line_edge_samples")?.unwrap_or(d.edge_samples),
                negative_samples: file.get("line_negative_samples")?.unwrap_or(d.negative_samples),
                learning_rate: file.get("line_learning_rate")?.unwrap_or(d.learning_rate),
                seed: 0,
            }))
        }
        other => bail!(
            "embedder: unknown value {other:?} (expected tsvd, pca, randwalk, line, or random)"
        ),
    }
}

pub fn parse_embedders(text: &str, file: &FileConfig) -> Result<Vec<EmbedMethod>> {
    text.split(',').map(|s| parse_embedder(s.trim(), file)).collect()
}

/// The resolved experiment: everything a command run depends on. One value
/// of this struct fully determines every output byte.
pub struct ExperimentConfig {
    pub input: PathBuf,
    pub dataset: String,
    pub binning: SnapshotSpec,
    pub models: Vec<ModelKind>,
    pub embedders: Vec<EmbedMethod>,
    pub d: usize,
    pub hyper: HyperConfig,
    pub eval: EvalConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Keys shared by embed/evaluate/sweep-dim for model and embedder tuning.
const TUNING_KEYS: &[&str] = &[
    "alpha",
    "bcgd_iterations",
    "bcgd_learning_rate",
    "boundaries",
    "dim",
    "embedder",
    "epochs",
    "gd_clip_ratio",
    "gd_iterations",
    "gd_learning_rate",
    "input",
    "lambda",
    "line_edge_samples",
    "line_learning_rate",
    "line_negative_samples",
    "line_order",
    "model",
    "negative_samples",
    "out",
    "p",
    "prebinned",
    "q",
    "renormalize",
    "retrofit_max_sweeps",
    "retrofit_tolerance",
    "seed",
    "smoothing",
    "snapshots",
    "theta",
    "walk_learning_rate",
    "walk_length",
    "walks_per_node",
    "weighted",
    "window",
];

const EVAL_ONLY_KEYS: &[&str] = &[
    "alpha_grid",
    "exclude_historical_negatives",
    "l2",
    "lambda_grid",
    "ndcg_p",
    "repeats",
    "test_frac",
    "theta_grid",
    "train_frac",
    "validation_frac",
];

pub fn allowed_keys(command: &str) -> Vec<&'static str> {
    match command {
        "ingest" => vec!["input", "snapshots", "boundaries", "prebinned", "out"],
        "synth" => vec![
            "nodes",
            "communities",
            "snapshots",
            "p_in",
            "p_out",
            "churn",
            "seed",
            "out",
        ],
        "embed" => TUNING_KEYS.to_vec(),
        "evaluate" => {
            let mut keys = TUNING_KEYS.to_vec();
            keys.extend_from_slice(EVAL_ONLY_KEYS);
            keys
        }
        "sweep-dim" => {
            let mut keys = allowed_keys("evaluate");
            keys.push("dims");
            keys
        }
        other => unreachable!("no key set for command {other}"),
    }
}

pub struct TuningFlags {
    pub smoothing: Option<String>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub weighted: bool,
}

/// Shared hyperparameter resolution. Pinning flags collapse the matching
/// search grid to a single value so evaluate skips the selection loop.
pub fn resolve_hyper(flags: &TuningFlags, file: &FileConfig) -> Result<HyperConfig> {
    let mut hyper = HyperConfig::default();

    let kind = match &flags.smoothing {
        Some(s) => Some(s.clone()),
        None => file.get::<String>("smoothing")?,
    };
    if let Some(kind) = kind {
        hyper.smoothing.kind = parse_smoothing_kind(&kind)?;
    }
    hyper.smoothing.renormalize = pick_flag(false, file, "renormalize")?;
    if let Some(theta) = pick(flags.theta, file, "theta", f64::NAN).map(nan_to_none)? {
        hyper.smoothing.theta = theta;
        hyper.theta_grid = vec![theta];
    } else if let Some(grid) = file.get::<String>("theta_grid")? {
        hyper.theta_grid = parse_list(&grid, "theta_grid")?;
    }
    if let Some(alpha) = pick(flags.alpha, file, "alpha", f64::NAN).map(nan_to_none)? {
        hyper.retrofit.alpha = alpha;
        hyper.alpha_grid = vec![alpha];
    } else if let Some(grid) = file.get::<String>("alpha_grid")? {
        hyper.alpha_grid = parse_list(&grid, "alpha_grid")?;
    }
    if let Some(lambda) = pick(flags.lambda, file, "lambda", f64::NAN).map(nan_to_none)? {
        hyper.bcgd.lambda = lambda;
        hyper.lambda_grid = vec![lambda];
    } else if let Some(grid) = file.get::<String>("lambda_grid")? {
        hyper.lambda_grid = parse_list(&grid, "lambda_grid")?;
    }

    hyper.retrofit.max_sweeps = file.get("retrofit_max_sweeps")?.unwrap_or(hyper.retrofit.max_sweeps);
    hyper.retrofit.tolerance = file.get("retrofit_tolerance")?.unwrap_or(hyper.retrofit.tolerance);
    hyper.gd.iterations = file.get("gd_iterations")?.unwrap_or(hyper.gd.iterations);
    hyper.gd.learning_rate = file.get("gd_learning_rate")?.unwrap_or(hyper.gd.learning_rate);
    hyper.gd.clip_ratio = file.get("gd_clip_ratio")?.unwrap_or(hyper.gd.clip_ratio);
    hyper.bcgd.iterations = file.get("bcgd_iterations")?.unwrap_or(hyper.bcgd.iterations);
    hyper.bcgd.learning_rate = file.get("bcgd_learning_rate")?.unwrap_or(hyper.bcgd.learning_rate);
    hyper.l2 = file.get("l2")?.unwrap_or(hyper.l2);
    hyper.weighted = pick_flag(flags.weighted, file, "weighted")?;
    Ok(hyper)
}

/// `pick` needs a sentinel to mean "not given anywhere"; NaN can never be
/// a real flag value for these positive hyperparameters.
fn nan_to_none(v: f64) -> Option<f64> {
    if v.is_nan() { None } else { Some(v) }
}

pub fn dataset_name(input: &Path) -> String {
    input
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| input.display().to_string())
}
