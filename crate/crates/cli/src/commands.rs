//! The five subcommands. Each is a pure function of (input files, resolved
//! flags, master seed): outputs are rendered deterministically and written
//! atomically, so rerunning any command reproduces its files byte for byte.

use std::collections::BTreeSet;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use dynembed::bcgd::{fit_bcgd, BcgdConfig};
use dynembed::embed::{embed_sequence, embed_snapshot, EmbedMethod};
use dynembed::graph::{dump_edge_list, parse_edge_list, synth_dynamic_sbm, SnapshotSpec, TemporalGraph};
use dynembed::linkpred::{evaluate, EvalConfig, ModelKind};
use dynembed::retrofit::retrofit_sequence;
use dynembed::seeds::{derive_seed, STREAM_BCGD, STREAM_EMBED};
use dynembed::transform::{combine, fit_homogeneous, fit_pairwise, project};

use crate::args::{EmbedArgs, EvaluateArgs, IngestArgs, SynthArgs, SweepDimArgs};
use crate::config::{
    binning_name, dataset_name, parse_embedder, parse_embedders, parse_list, parse_models, pick,
    required, resolve_binning, resolve_hyper, smoothing_kind_name, ExperimentConfig, FileConfig,
    TuningFlags,
};
use crate::report::{csv_rows, float_list, manifest, summary_table, write_atomic, Cell};

fn load_graph(input: &Path, spec: &SnapshotSpec) -> Result<TemporalGraph> {
    let file = std::fs::File::open(input)
        .with_context(|| format!("input file {}", input.display()))?;
    let graph = parse_edge_list(BufReader::new(file), spec)
        .with_context(|| format!("parsing {}", input.display()))?;
    Ok(graph)
}

fn graph_stats(graph: &TemporalGraph) -> String {
    let mut distinct: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut interactions: u64 = 0;
    for snap in graph.snapshots() {
        for ((u, v), m) in snap.edges() {
            distinct.insert((u, v));
            interactions += m;
        }
    }
    let mut out = format!(
        "nodes {}\ndistinct_edges {}\ninteractions {}\nsnapshots {}\n",
        graph.vertex_count(),
        distinct.len(),
        interactions,
        graph.snapshot_count()
    );
    for (t, snap) in graph.snapshots().iter().enumerate() {
        let m: u64 = snap.edges().map(|(_, m)| m).sum();
        out.push_str(&format!("snapshot {t} distinct {} interactions {m}\n", snap.edge_count()));
    }
    out
}

pub fn cmd_ingest(args: IngestArgs, file: &FileConfig) -> Result<()> {
    let input = required(
        args.input.or(file.get::<PathBuf>("input")?),
        "input",
    )?;
    let binning = resolve_binning(&args.binning, file)?;
    let graph = load_graph(&input, &binning)?;
    let stats = graph_stats(&graph);
    print!("{stats}");
    let out = match args.out {
        Some(o) => Some(o),
        None => file.get::<PathBuf>("out")?,
    };
    if let Some(out) = out {
        write_atomic(&out.join("ingest-summary.txt"), &stats)?;
        let entries = [
            ("command", "ingest".to_string()),
            ("input", input.display().to_string()),
            ("dataset", dataset_name(&input)),
            ("binning", binning_name(&binning)),
        ];
        write_atomic(&out.join("run-manifest.txt"), &manifest(&entries))?;
    }
    Ok(())
}

pub fn cmd_synth(args: SynthArgs, file: &FileConfig) -> Result<()> {
    let nodes = pick(args.nodes, file, "nodes", 200)?;
    let communities = pick(args.communities, file, "communities", 4)?;
    let snapshots = pick(args.snapshots, file, "snapshots", 8)?;
    let p_in = pick(args.p_in, file, "p_in", 0.2)?;
    let p_out = pick(args.p_out, file, "p_out", 0.01)?;
    let churn = pick(args.churn, file, "churn", 0.05)?;
    let seed = pick(args.seed, file, "seed", 0)?;
    let out = required(args.out.or(file.get::<PathBuf>("out")?), "out")?;

    let graph = synth_dynamic_sbm(nodes, communities, snapshots, p_in, p_out, churn, seed)?;
    write_atomic(&out.join("graph.txt"), &dump_edge_list(&graph))?;
    let entries = [
        ("command", "synth".to_string()),
        ("nodes", nodes.to_string()),
        ("communities", communities.to_string()),
        ("snapshots", snapshots.to_string()),
        ("p_in", p_in.to_string()),
        ("p_out", p_out.to_string()),
        ("churn", churn.to_string()),
        ("seed", seed.to_string()),
    ];
    write_atomic(&out.join("run-manifest.txt"), &manifest(&entries))?;
    println!("wrote {}", out.join("graph.txt").display());
    Ok(())
}

fn embedder_entries(method: &EmbedMethod) -> Vec<(&'static str, String)> {
    match method {
        EmbedMethod::RandWalk(c) => vec![
            ("walks_per_node", c.walks_per_node.to_string()),
            ("walk_length", c.walk_length.to_string()),
            ("window", c.window.to_string()),
            ("negative_samples", c.negative_samples.to_string()),
            ("epochs", c.epochs.to_string()),
            ("p", c.p.to_string()),
            ("q", c.q.to_string()),
            ("walk_learning_rate", c.learning_rate.to_string()),
        ],
        EmbedMethod::Line(c) => vec![
            (
                "line_order",
                match c.order {
                    dynembed::embed::LineOrder::First => "first".to_string(),
                    dynembed::embed::LineOrder::Second => "second".to_string(),
                },
            ),
            ("line_edge_samples", c.edge_samples.to_string()),
            ("line_negative_samples", c.negative_samples.to_string()),
            ("line_learning_rate", c.learning_rate.to_string()),
        ],
        _ => Vec::new(),
    }
}

/// Resolved settings shared by embed, evaluate, and sweep-dim manifests.
/// One line documents how the master seed fans out to every consumer.
fn experiment_entries(cfg: &ExperimentConfig) -> Vec<(&'static str, String)> {
    let h = &cfg.hyper;
    let mut entries = vec![
        ("input", cfg.input.display().to_string()),
        ("dataset", cfg.dataset.clone()),
        ("binning", binning_name(&cfg.binning)),
        (
            "models",
            cfg.models.iter().map(|m| m.name()).collect::<Vec<_>>().join(","),
        ),
        (
            "embedders",
            cfg.embedders.iter().map(|e| e.name()).collect::<Vec<_>>().join(","),
        ),
        ("dim", cfg.d.to_string()),
        ("seed", cfg.seed.to_string()),
        (
            "seed_scheme",
            "splitmix64(master_seed, stream, index); streams: split=1 bcgd=2 embed=3; \
             per-snapshot embed seeds add the snapshot index"
                .to_string(),
        ),
        ("embed_seed", derive_seed(cfg.seed, STREAM_EMBED, 0).to_string()),
        ("bcgd_seed", derive_seed(cfg.seed, STREAM_BCGD, 0).to_string()),
        ("weighted", h.weighted.to_string()),
        ("smoothing", smoothing_kind_name(h.smoothing.kind).to_string()),
        ("theta", h.smoothing.theta.to_string()),
        ("renormalize", h.smoothing.renormalize.to_string()),
        ("alpha", h.retrofit.alpha.to_string()),
        ("alpha_grid", float_list(&h.alpha_grid)),
        ("theta_grid", float_list(&h.theta_grid)),
        ("lambda_grid", float_list(&h.lambda_grid)),
        ("lambda", h.bcgd.lambda.to_string()),
        ("retrofit_max_sweeps", h.retrofit.max_sweeps.to_string()),
        ("retrofit_tolerance", h.retrofit.tolerance.to_string()),
        ("gd_iterations", h.gd.iterations.to_string()),
        ("gd_learning_rate", h.gd.learning_rate.to_string()),
        ("gd_clip_ratio", h.gd.clip_ratio.to_string()),
        ("bcgd_iterations", h.bcgd.iterations.to_string()),
        ("bcgd_learning_rate", h.bcgd.learning_rate.to_string()),
        ("l2", h.l2.to_string()),
        ("repeats", cfg.eval.repeats.to_string()),
        ("train_frac", cfg.eval.train_frac.to_string()),
        ("test_frac", cfg.eval.test_frac.to_string()),
        ("validation_frac", cfg.eval.validation_frac.to_string()),
        ("ndcg_p", cfg.eval.ndcg_p.to_string()),
        (
            "exclude_historical_negatives",
            cfg.eval.exclude_historical_negatives.to_string(),
        ),
    ];
    for method in &cfg.embedders {
        entries.extend(embedder_entries(method));
    }
    entries
}

fn resolve_eval_config(file: &FileConfig, repeats: Option<usize>, seed: u64) -> Result<EvalConfig> {
    let d = EvalConfig::default();
    Ok(EvalConfig {
        train_frac: file.get("train_frac")?.unwrap_or(d.train_frac),
        test_frac: file.get("test_frac")?.unwrap_or(d.test_frac),
        validation_frac: file.get("validation_frac")?.unwrap_or(d.validation_frac),
        repeats: match repeats {
            Some(r) => r,
            None => file.get("repeats")?.unwrap_or(d.repeats),
        },
        ndcg_p: file.get("ndcg_p")?.unwrap_or(d.ndcg_p),
        seed,
        exclude_historical_negatives: file
            .get("exclude_historical_negatives")?
            .unwrap_or(d.exclude_historical_negatives),
    })
}

pub fn resolve_experiment(args: EvaluateArgs, file: &FileConfig) -> Result<ExperimentConfig> {
    let input = required(args.input.or(file.get::<PathBuf>("input")?), "input")?;
    let binning = resolve_binning(&args.binning, file)?;
    let model_text = pick(args.model, file, "model", "all".to_string())?;
    let embedder_text = pick(args.embedder, file, "embedder", "tsvd".to_string())?;
    let d = pick(args.dim, file, "dim", 64)?;
    if d < 1 {
        bail!("dim: must be at least 1");
    }
    let seed = pick(args.seed, file, "seed", 0)?;
    let hyper = resolve_hyper(
        &TuningFlags {
            smoothing: args.smoothing,
            theta: args.theta,
            alpha: args.alpha,
            lambda: args.lambda,
            weighted: args.weighted,
        },
        file,
    )?;
    let eval = resolve_eval_config(file, args.repeats, seed)?;
    Ok(ExperimentConfig {
        dataset: dataset_name(&input),
        input,
        binning,
        models: parse_models(&model_text)?,
        embedders: parse_embedders(&embedder_text, file)?,
        d,
        hyper,
        eval,
        seed,
        out: match args.out {
            Some(o) => Some(o),
            None => file.get::<PathBuf>("out")?,
        },
    })
}

fn run_cells(cfg: &ExperimentConfig, graph: &TemporalGraph, dims: &[usize]) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for &d in dims {
        for model in &cfg.models {
            for method in &cfg.embedders {
                let report = evaluate(graph, *model, method, d, &cfg.eval, &cfg.hyper)
                    .with_context(|| {
                        format!("evaluating {} over {} at d={d}", model.name(), method.name())
                    })?;
                cells.push(Cell {
                    dataset: cfg.dataset.clone(),
                    model: *model,
                    embedder: method.name().to_string(),
                    dim: d,
                    smoothing: (*model == ModelKind::HeterLt)
                        .then(|| smoothing_kind_name(cfg.hyper.smoothing.kind)),
                    report,
                });
            }
        }
    }
    Ok(cells)
}

pub fn cmd_evaluate(args: EvaluateArgs, file: &FileConfig) -> Result<()> {
    let cfg = resolve_experiment(args, file)?;
    let out = required(cfg.out.clone(), "out")?;
    let graph = load_graph(&cfg.input, &cfg.binning)?;
    let cells = run_cells(&cfg, &graph, &[cfg.d])?;

    let summary = summary_table(&cells);
    write_atomic(&out.join("metrics.csv"), &csv_rows(&cells))?;
    write_atomic(&out.join("summary.txt"), &summary)?;
    let mut entries = experiment_entries(&cfg);
    entries.push(("command", "evaluate".to_string()));
    write_atomic(&out.join("run-manifest.txt"), &manifest(&entries))?;
    print!("{summary}");
    Ok(())
}

pub fn cmd_sweep_dim(args: SweepDimArgs, file: &FileConfig) -> Result<()> {
    let dims_text = pick(args.dims, file, "dims", "32,64,128".to_string())?;
    let dims: Vec<usize> = parse_list(&dims_text, "dims")?;
    let cfg = resolve_experiment(args.eval, file)?;
    let out = required(cfg.out.clone(), "out")?;
    let graph = load_graph(&cfg.input, &cfg.binning)?;
    let cells = run_cells(&cfg, &graph, &dims)?;

    let summary = summary_table(&cells);
    write_atomic(&out.join("sweep.csv"), &csv_rows(&cells))?;
    write_atomic(&out.join("summary.txt"), &summary)?;
    let mut entries = experiment_entries(&cfg);
    entries.push(("command", "sweep-dim".to_string()));
    entries.push(("dims", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")));
    write_atomic(&out.join("run-manifest.txt"), &manifest(&entries))?;
    print!("{summary}");
    Ok(())
}

fn write_phi_files(out: &Path, phis: &[dynembed::embedding::EmbeddingMatrix]) -> Result<()> {
    for (t, phi) in phis.iter().enumerate() {
        write_atomic(&out.join(format!("phi_{t:03}.emb")), &phi.to_text())?;
    }
    Ok(())
}

pub fn cmd_embed(args: EmbedArgs, file: &FileConfig) -> Result<()> {
    let input = required(args.input.or(file.get::<PathBuf>("input")?), "input")?;
    let binning = resolve_binning(&args.binning, file)?;
    let model_text = pick(args.model, file, "model", "StaticBaseline".to_string())?;
    let models = parse_models(&model_text)?;
    if models.len() != 1 {
        bail!("model: embed trains exactly one model, got {model_text:?}");
    }
    let model = models[0];
    let embedder_text = pick(args.embedder, file, "embedder", "tsvd".to_string())?;
    let method = parse_embedder(&embedder_text, file)?;
    let d = pick(args.dim, file, "dim", 64)?;
    if d < 1 {
        bail!("dim: must be at least 1");
    }
    let seed = pick(args.seed, file, "seed", 0)?;
    let hyper = resolve_hyper(
        &TuningFlags {
            smoothing: args.smoothing,
            theta: args.theta,
            alpha: args.alpha,
            lambda: args.lambda,
            weighted: args.weighted,
        },
        file,
    )?;
    let out = required(args.out.or(file.get::<PathBuf>("out")?), "out")?;

    let graph = load_graph(&input, &binning)?;
    let embed_seed = derive_seed(seed, STREAM_EMBED, 0);
    let written;
    match model {
        ModelKind::StaticBaseline => {
            let seq = embed_sequence(&graph, &method, d, embed_seed, hyper.weighted)?;
            write_phi_files(&out, &seq)?;
            written = seq.len();
        }
        ModelKind::Ret => {
            let phi0 = embed_snapshot(graph.snapshot(0), &method, d, embed_seed, hyper.weighted)?;
            let chain = retrofit_sequence(&phi0, &graph.snapshots()[1..], &hyper.retrofit)?;
            let mut seq = vec![phi0];
            seq.extend(chain);
            write_phi_files(&out, &seq)?;
            written = seq.len();
        }
        ModelKind::HomoLt | ModelKind::HeterLt => {
            let seq = embed_sequence(&graph, &method, d, embed_seed, hyper.weighted)?;
            let w = if model == ModelKind::HomoLt {
                fit_homogeneous(&seq, &hyper.gd)?
            } else {
                let mut ws = Vec::with_capacity(seq.len() - 1);
                for pair in seq.windows(2) {
                    ws.push(fit_pairwise(&pair[0], &pair[1], &hyper.gd)?);
                }
                combine(&ws, &hyper.smoothing)?
            };
            let predicted = project(seq.last().unwrap(), &w)?;
            write_phi_files(&out, &seq)?;
            write_atomic(&out.join("transform.txt"), &w.to_text())?;
            write_atomic(&out.join("phi_predicted.emb"), &predicted.to_text())?;
            written = seq.len() + 2;
        }
        ModelKind::Bcgd => {
            let cfg = BcgdConfig {
                d,
                seed: derive_seed(seed, STREAM_BCGD, 0),
                ..hyper.bcgd.clone()
            };
            let phis = fit_bcgd(&graph, &cfg)?;
            write_phi_files(&out, &phis)?;
            written = phis.len();
        }
    }

    let experiment = ExperimentConfig {
        dataset: dataset_name(&input),
        input,
        binning,
        models: vec![model],
        embedders: vec![method],
        d,
        hyper,
        eval: EvalConfig { seed, ..EvalConfig::default() },
        seed,
        out: Some(out.clone()),
    };
    let mut entries = experiment_entries(&experiment);
    entries.push(("command", "embed".to_string()));
    write_atomic(&out.join("run-manifest.txt"), &manifest(&entries))?;
    println!("wrote {written} files to {}", out.display());
    Ok(())
}
