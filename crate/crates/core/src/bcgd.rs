//! Temporal matrix factorization baseline: per-snapshot non-negative
//! embeddings fit by projected gradient, with a penalty that rewards
//! consecutive-snapshot row dot products near 1.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{Snapshot, TemporalGraph, DEFAULT_DENSE_GUARD};

#[derive(Debug, Clone, PartialEq)]
pub struct BcgdConfig {
    /// Temporal penalty weight.
    pub lambda: f64,
    /// Outer passes; each pass takes one projected step per snapshot block.
    pub iterations: usize,
    pub learning_rate: f64,
    pub d: usize,
    pub seed: u64,
}

impl Default for BcgdConfig {
    fn default() -> Self {
        BcgdConfig {
            lambda: 0.1,
            iterations: 500,
            learning_rate: 1e-2,
            d: 8,
            seed: 0,
        }
    }
}

impl BcgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) {
            return Err(Error::invalid("lambda", "must be non-negative"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate", "must be positive"));
        }
        if self.d < 1 {
            return Err(Error::invalid("d", "must be at least 1"));
        }
        Ok(())
    }
}

fn check_phis(graph: &TemporalGraph, phis: &[EmbeddingMatrix]) -> Result<usize> {
    if phis.len() != graph.snapshot_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} embedding matrices", graph.snapshot_count()),
            found: format!("{}", phis.len()),
        });
    }
    let d = phis[0].dim();
    for phi in phis {
        if phi.rows() != graph.vertex_count() || phi.dim() != d {
            return Err(Error::ShapeMismatch {
                expected: format!("{} x {d}", graph.vertex_count()),
                found: format!("{} x {}", phi.rows(), phi.dim()),
            });
        }
        for (i, row) in phi.matrix().row_iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
        }
    }
    Ok(d)
}

/// sum_t ||A_t - phi_t phi_t^T||_F^2 + lambda sum_{t>=2} sum_u
/// (1 - phi_t(u).phi_{t-1}(u)). The reconstruction term is evaluated
/// through the expansion ||phi^T phi||_F^2 - 4 sum_{(u,v) in E} phi(u).phi(v)
/// + 2|E|, which never materializes the adjacency.
pub fn bcgd_objective(
    graph: &TemporalGraph,
    phis: &[EmbeddingMatrix],
    lambda: f64,
) -> Result<f64> {
    check_phis(graph, phis)?;
    let mut total = 0.0;
    for (snap, phi) in graph.snapshots().iter().zip(phis) {
        total += reconstruction_error(snap, phi.matrix());
    }
    for pair in phis.windows(2) {
        let prev = pair[0].matrix();
        let cur = pair[1].matrix();
        for v in 0..prev.nrows() {
            total += lambda * (1.0 - cur.row(v).dot(&prev.row(v)));
        }
    }
    Ok(total)
}

fn reconstruction_error(snap: &Snapshot, phi: &DMatrix<f64>) -> f64 {
    let gram = phi.transpose() * phi;
    let mut err = gram.norm_squared() + 2.0 * snap.edge_count() as f64;
    for ((u, v), _) in snap.edges() {
        err -= 4.0 * phi.row(u).dot(&phi.row(v));
    }
    err
}

/// A_t * phi using neighbor lists (unweighted 0/1 adjacency).
fn adjacency_times(snap: &Snapshot, phi: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, d) = (phi.nrows(), phi.ncols());
    let mut out = DMatrix::zeros(n, d);
    for v in 0..n {
        for &u in snap.neighbors(v) {
            for k in 0..d {
                out[(v, k)] += phi[(u, k)];
            }
        }
    }
    out
}

/// Per-pass measurements from `fit_bcgd_traced`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcgdPassStats {
    pub objective: f64,
    /// Mean over vertices and consecutive pairs of phi_t(u).phi_{t-1}(u).
    pub mean_consecutive_dot: f64,
    /// Smallest entry across all blocks; projection keeps this at >= 0.
    pub min_entry: f64,
}

/// Seeded uniform [0, 1/sqrt(d)] starting point, filled in (t, vertex,
/// coordinate) order.
pub fn bcgd_init(graph: &TemporalGraph, cfg: &BcgdConfig) -> Result<Vec<EmbeddingMatrix>> {
    cfg.validate()?;
    let n = graph.vertex_count();
    let scale = 1.0 / (cfg.d as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut phis = Vec::with_capacity(graph.snapshot_count());
    for _ in 0..graph.snapshot_count() {
        let mut m = DMatrix::zeros(n, cfg.d);
        for v in 0..n {
            for k in 0..cfg.d {
                m[(v, k)] = rng.random::<f64>() * scale;
            }
        }
        phis.push(EmbeddingMatrix::from_matrix(m)?);
    }
    Ok(phis)
}

/// Projected block gradient descent on the objective: passes sweep blocks
/// t = 1..T in order, each taking one step followed by max(0, .)
/// projection; a block's step sees the current pass's already-updated
/// earlier blocks.
pub fn fit_bcgd(graph: &TemporalGraph, cfg: &BcgdConfig) -> Result<Vec<EmbeddingMatrix>> {
    let (phis, _) = fit_inner(graph, cfg, false)?;
    Ok(phis)
}

/// `fit_bcgd` recording objective and mean consecutive dot product after
/// every pass, with the starting point's stats first.
pub fn fit_bcgd_traced(
    graph: &TemporalGraph,
    cfg: &BcgdConfig,
) -> Result<(Vec<EmbeddingMatrix>, Vec<BcgdPassStats>)> {
    let (phis, stats) = fit_inner(graph, cfg, true)?;
    Ok((phis, stats))
}

fn fit_inner(
    graph: &TemporalGraph,
    cfg: &BcgdConfig,
    traced: bool,
) -> Result<(Vec<EmbeddingMatrix>, Vec<BcgdPassStats>)> {
    cfg.validate()?;
    let n = graph.vertex_count();
    if n > DEFAULT_DENSE_GUARD {
        return Err(Error::DenseGuard { vertices: n, guard: DEFAULT_DENSE_GUARD });
    }
    let t_count = graph.snapshot_count();
    let mut blocks: Vec<DMatrix<f64>> = bcgd_init(graph, cfg)?
        .into_iter()
        .map(EmbeddingMatrix::into_matrix)
        .collect();

    let mut stats = Vec::new();
    if traced {
        stats.push(pass_stats(graph, &blocks, cfg.lambda)?);
    }

    for _ in 0..cfg.iterations {
        for t in 0..t_count {
            let snap = graph.snapshot(t);
            let gram = blocks[t].transpose() * &blocks[t];
            let mut grad = &blocks[t] * gram - adjacency_times(snap, &blocks[t]);
            grad *= 4.0;
            if t >= 1 {
                grad.zip_apply(&blocks[t - 1], |g, p| *g -= cfg.lambda * p);
            }
            if t + 1 < t_count {
                grad.zip_apply(&blocks[t + 1], |g, nx| *g -= cfg.lambda * nx);
            }
            blocks[t] -= cfg.learning_rate * grad;
            blocks[t].apply(|x| *x = x.max(0.0));
        }
        if traced {
            stats.push(pass_stats(graph, &blocks, cfg.lambda)?);
        }
    }

    let phis = blocks
        .into_iter()
        .map(EmbeddingMatrix::from_matrix)
        .collect::<Result<Vec<_>>>()?;
    Ok((phis, stats))
}

fn pass_stats(
    graph: &TemporalGraph,
    blocks: &[DMatrix<f64>],
    lambda: f64,
) -> Result<BcgdPassStats> {
    let phis: Vec<EmbeddingMatrix> = blocks
        .iter()
        .map(|m| EmbeddingMatrix::from_matrix(m.clone()))
        .collect::<Result<Vec<_>>>()?;
    let objective = bcgd_objective(graph, &phis, lambda)?;
    let mut dot_sum = 0.0;
    let mut count = 0usize;
    for pair in blocks.windows(2) {
        for v in 0..pair[0].nrows() {
            dot_sum += pair[1].row(v).dot(&pair[0].row(v));
            count += 1;
        }
    }
    let mean = if count == 0 { 0.0 } else { dot_sum / count as f64 };
    let min_entry = blocks
        .iter()
        .flat_map(|m| m.iter().copied())
        .fold(f64::INFINITY, f64::min);
    Ok(BcgdPassStats { objective, mean_consecutive_dot: mean, min_entry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexLabels;

    fn graph_from(edge_sets: &[&[(usize, usize)]], n: usize) -> TemporalGraph {
        let snaps: Vec<Snapshot> = edge_sets
            .iter()
            .map(|es| Snapshot::from_edges(n, es.iter().copied()).unwrap())
            .collect();
        TemporalGraph::new(n, snaps, VertexLabels::numeric(n)).unwrap()
    }

    fn const_emb(n: usize, d: usize, value: f64) -> EmbeddingMatrix {
        EmbeddingMatrix::from_matrix(DMatrix::from_element(n, d, value)).unwrap()
    }

    #[test]
    fn objective_hand_value() {
        // per snapshot: [[0,1],[1,0]] - [[1,1],[1,1]] = [[-1,0],[0,-1]],
        // squared Frobenius norm 2; two identical snapshots total 4
        let g = graph_from(&[&[(0, 1)], &[(0, 1)]], 2);
        let phi = const_emb(2, 1, 1.0);
        let dense = {
            let a = g.snapshot(0).adjacency_dense(false).unwrap();
            (a - phi.matrix() * phi.matrix().transpose()).norm_squared()
        };
        assert!((dense - 2.0).abs() < 1e-12);
        let j = bcgd_objective(&g, &[phi.clone(), phi], 0.0).unwrap();
        assert!((j - 2.0 * dense).abs() < 1e-12, "J = {j}");
    }

    #[test]
    fn smoothing_term_vanishes_at_unit_dots() {
        let g = graph_from(&[&[(0, 1), (1, 2)], &[(0, 2)]], 3);
        // rows with ||row||^2 = 1 and identical across time: dot = 1
        let phi = const_emb(3, 4, 0.5);
        let phis = vec![phi.clone(), phi];
        let j0 = bcgd_objective(&g, &phis, 0.0).unwrap();
        let j5 = bcgd_objective(&g, &phis, 5.0).unwrap();
        assert_eq!(j0, j5);
    }

    #[test]
    fn objective_matches_dense_oracle() {
        let g = graph_from(&[&[(0, 1), (1, 2), (2, 3)], &[(0, 3), (1, 3)]], 4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phis: Vec<EmbeddingMatrix> = (0..2)
            .map(|_| {
                EmbeddingMatrix::from_matrix(DMatrix::from_fn(4, 3, |_, _| rng.random::<f64>()))
                    .unwrap()
            })
            .collect();
        let lambda = 0.7;
        let got = bcgd_objective(&g, &phis, lambda).unwrap();

        let mut want = 0.0;
        for (t, phi) in phis.iter().enumerate() {
            let a = g.snapshot(t).adjacency_dense(false).unwrap();
            want += (a - phi.matrix() * phi.matrix().transpose()).norm_squared();
        }
        for v in 0..4 {
            want += lambda * (1.0 - phis[1].matrix().row(v).dot(&phis[0].matrix().row(v)));
        }
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn objective_rejects_negative_and_mismatched() {
        let g = graph_from(&[&[(0, 1)], &[(0, 1)]], 2);
        let mut m = DMatrix::from_element(2, 2, 0.5);
        m[(1, 0)] = -0.1;
        let bad = EmbeddingMatrix::from_matrix(m).unwrap();
        let good = const_emb(2, 2, 0.5);
        assert!(matches!(
            bcgd_objective(&g, &[good.clone(), bad], 0.0),
            Err(Error::NegativeEntry { row: 1, col: 0 })
        ));
        assert!(matches!(
            bcgd_objective(&g, &[good], 0.0),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    fn random_graph(n: usize, t: usize, prob: f64, seed: u64) -> TemporalGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snaps: Vec<Snapshot> = (0..t)
            .map(|_| {
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in (u + 1)..n {
                        if rng.random::<f64>() < prob {
                            edges.push((u, v));
                        }
                    }
                }
                Snapshot::from_edges(n, &edges).unwrap()
            })
            .collect();
        TemporalGraph::new(n, snaps, VertexLabels::numeric(n)).unwrap()
    }

    #[test]
    fn fit_improves_objective_and_stays_nonnegative() {
        let g = random_graph(30, 3, 0.15, 11);
        let cfg = BcgdConfig { lambda: 0.1, iterations: 200, d: 4, seed: 5, ..BcgdConfig::default() };
        let init = bcgd_init(&g, &cfg).unwrap();
        let j_init = bcgd_objective(&g, &init, cfg.lambda).unwrap();
        let phis = fit_bcgd(&g, &cfg).unwrap();
        let j_final = bcgd_objective(&g, &phis, cfg.lambda).unwrap();
        assert!(j_final < j_init, "objective {j_final} not below {j_init}");
        for phi in &phis {
            assert!(phi.matrix().iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn objective_non_increasing_with_small_rate() {
        for seed in [1, 2, 3] {
            let g = random_graph(20, 2, 0.2, 100 + seed);
            let cfg = BcgdConfig {
                lambda: 0.0,
                iterations: 50,
                learning_rate: 1e-3,
                d: 4,
                seed,
            };
            let (_, stats) = fit_bcgd_traced(&g, &cfg).unwrap();
            assert_eq!(stats.len(), 51);
            for w in stats.windows(2) {
                assert!(
                    w[1].objective <= w[0].objective * (1.0 + 1e-12) + 1e-12,
                    "seed {seed}: {} > {}",
                    w[1].objective,
                    w[0].objective
                );
            }
        }
    }

    #[test]
    fn huge_lambda_drives_consecutive_dots_up() {
        let g = random_graph(15, 4, 0.2, 42);
        let cfg = BcgdConfig {
            lambda: 1e6,
            iterations: 30,
            learning_rate: 1e-7,
            d: 4,
            seed: 9,
        };
        let (_, stats) = fit_bcgd_traced(&g, &cfg).unwrap();
        for w in stats.windows(2) {
            assert!(
                w[1].mean_consecutive_dot >= w[0].mean_consecutive_dot - 1e-12,
                "{} < {}",
                w[1].mean_consecutive_dot,
                w[0].mean_consecutive_dot
            );
        }
        let first = stats.first().unwrap().mean_consecutive_dot;
        let last = stats.last().unwrap().mean_consecutive_dot;
        assert!(last > first, "dots did not grow: {first} -> {last}");
    }

    #[test]
    fn deterministic_given_seed() {
        let g = random_graph(12, 3, 0.25, 77);
        let cfg = BcgdConfig { iterations: 40, d: 3, seed: 4, ..BcgdConfig::default() };
        let a = fit_bcgd(&g, &cfg).unwrap();
        let b = fit_bcgd(&g, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.matrix(), y.matrix());
        }
    }
}
