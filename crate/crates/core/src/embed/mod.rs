//! Per-snapshot static embedders: spectral (tsvd, pca), sampling-based
//! (random walks + skip-gram, edge-sampling), and a structure-free random
//! baseline. All are deterministic functions of (snapshot, d, config).

mod line;
mod rsvd;
pub(crate) mod sgns;
mod walks;

pub use line::{line_pair_gradient, line_pair_loss, LineConfig, LineOrder};
pub use sgns::SkipgramConfig;
pub use walks::sample_walks;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{Snapshot, TemporalGraph};

/// Selects which static embedder a pipeline applies per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbedMethod {
    Tsvd,
    Pca,
    RandWalk(SkipgramConfig),
    Line(LineConfig),
    /// Seeded Gaussian rows ignoring graph structure; a floor baseline.
    Random,
}

impl EmbedMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EmbedMethod::Tsvd => "tsvd",
            EmbedMethod::Pca => "pca",
            EmbedMethod::RandWalk(_) => "randwalk",
            EmbedMethod::Line(_) => "line",
            EmbedMethod::Random => "random",
        }
    }
}

fn check_dim(d: usize, vertices: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    if d > vertices {
        return Err(Error::DimTooLarge { d, vertices });
    }
    Ok(())
}

/// Rank-d truncated SVD embedding of the adjacency matrix: U Σ^{1/2}.
pub fn embed_tsvd(snapshot: &Snapshot, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    embed_tsvd_view(snapshot, d, seed, false)
}

pub(crate) fn embed_tsvd_view(
    snapshot: &Snapshot,
    d: usize,
    seed: u64,
    weighted: bool,
) -> Result<EmbeddingMatrix> {
    check_dim(d, snapshot.vertex_count())?;
    if snapshot.is_empty() {
        return Ok(EmbeddingMatrix::zeros(snapshot.vertex_count(), d));
    }
    let a = snapshot.adjacency_dense(weighted)?;
    let (u, s, _) = rsvd::truncated_svd(&a, d, seed);
    let mut emb = u;
    for j in 0..d {
        let root = s[j].max(0.0).sqrt();
        for i in 0..emb.nrows() {
            emb[(i, j)] *= root;
        }
    }
    EmbeddingMatrix::from_matrix(emb)
}

/// Projects row-centered adjacency rows onto the top-d principal directions.
pub fn embed_pca(snapshot: &Snapshot, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    embed_pca_view(snapshot, d, seed, false)
}

pub(crate) fn embed_pca_view(
    snapshot: &Snapshot,
    d: usize,
    seed: u64,
    weighted: bool,
) -> Result<EmbeddingMatrix> {
    check_dim(d, snapshot.vertex_count())?;
    if snapshot.is_empty() {
        return Ok(EmbeddingMatrix::zeros(snapshot.vertex_count(), d));
    }
    let a = snapshot.adjacency_dense(weighted)?;
    let n = a.nrows();
    let mut mean = vec![0.0f64; n];
    for i in 0..n {
        for (j, m) in mean.iter_mut().enumerate() {
            *m += a[(i, j)];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut centered = a;
    for i in 0..n {
        for (j, m) in mean.iter().enumerate() {
            centered[(i, j)] -= m;
        }
    }
    let (_, _, vt) = rsvd::truncated_svd(&centered, d, seed);
    let projected = &centered * vt.transpose();
    EmbeddingMatrix::from_matrix(projected)
}

/// Structure-free standard-normal rows; reproducible given seed.
pub fn embed_random(snapshot: &Snapshot, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let n = snapshot.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = DMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            values[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    EmbeddingMatrix::from_matrix(values)
}

/// Node2Vec-style biased random walks fed to skip-gram with negative
/// sampling. Isolated vertices receive zero rows.
pub fn embed_randwalk(snapshot: &Snapshot, d: usize, cfg: &SkipgramConfig) -> Result<EmbeddingMatrix> {
    sgns::embed_randwalk_view(snapshot, d, cfg, false)
}

/// LINE-style edge-sampling SGD. Isolated vertices receive zero rows.
pub fn embed_line(snapshot: &Snapshot, d: usize, cfg: &LineConfig) -> Result<EmbeddingMatrix> {
    line::embed_line_view(snapshot, d, cfg, false)
}

/// Applies one embedder to one snapshot. `seed` overrides the seed carried
/// inside sampling-embedder configs so sequence runs stay reproducible.
pub fn embed_snapshot(
    snapshot: &Snapshot,
    method: &EmbedMethod,
    d: usize,
    seed: u64,
    weighted: bool,
) -> Result<EmbeddingMatrix> {
    match method {
        EmbedMethod::Tsvd => embed_tsvd_view(snapshot, d, seed, weighted),
        EmbedMethod::Pca => embed_pca_view(snapshot, d, seed, weighted),
        EmbedMethod::RandWalk(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = seed;
            sgns::embed_randwalk_view(snapshot, d, &cfg, weighted)
        }
        EmbedMethod::Line(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = seed;
            line::embed_line_view(snapshot, d, &cfg, weighted)
        }
        EmbedMethod::Random => embed_random(snapshot, d, seed),
    }
}

/// Embeds every snapshot independently; snapshot t uses seed + t.
pub fn embed_sequence(
    graph: &TemporalGraph,
    method: &EmbedMethod,
    d: usize,
    seed: u64,
    weighted: bool,
) -> Result<Vec<EmbeddingMatrix>> {
    let mut out = Vec::with_capacity(graph.snapshot_count());
    for (t, snap) in graph.snapshots().iter().enumerate() {
        out.push(embed_snapshot(snap, method, d, seed.wrapping_add(t as u64), weighted)?);
    }
    Ok(out)
}
