//! Local temporal smoothing: each vertex's vector is pulled toward its
//! previous-snapshot value while being averaged with its current neighbors.
//! The quadratic objective is minimized by Jacobi sweeps; with the
//! neighbor weights summing to 1 per vertex the iteration matrix has
//! spectral radius 1/(alpha+1), so sweeps always converge.

use nalgebra::DMatrix;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::Snapshot;

#[derive(Debug, Clone, PartialEq)]
pub struct RetrofitConfig {
    /// Weight of the pull toward the previous embedding.
    pub alpha: f64,
    pub max_sweeps: usize,
    /// Stop when one sweep changes no entry by more than this.
    pub tolerance: f64,
}

impl Default for RetrofitConfig {
    fn default() -> Self {
        RetrofitConfig {
            alpha: 1.0,
            max_sweeps: 20,
            tolerance: 1e-6,
        }
    }
}

impl RetrofitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::invalid("alpha", "must be positive"));
        }
        if self.max_sweeps < 1 {
            return Err(Error::invalid("max_sweeps", "must be at least 1"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::invalid("tolerance", "must be non-negative"));
        }
        Ok(())
    }
}

fn check_shapes(
    phi_t: &EmbeddingMatrix,
    phi_prev: &EmbeddingMatrix,
    snapshot: &Snapshot,
) -> Result<()> {
    if !phi_t.same_shape(phi_prev) || phi_t.rows() != snapshot.vertex_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} x {} on both embeddings", snapshot.vertex_count(), phi_t.dim()),
            found: format!(
                "{} x {} vs {} x {}",
                phi_t.rows(),
                phi_t.dim(),
                phi_prev.rows(),
                phi_prev.dim()
            ),
        });
    }
    Ok(())
}

/// alpha * sum_v ||phi_t(v) - phi_prev(v)||^2 plus, for each edge in both
/// directions, ||phi_t(u) - phi_t(v)||^2 / degree(source).
pub fn retrofit_objective(
    phi_t: &EmbeddingMatrix,
    phi_prev: &EmbeddingMatrix,
    snapshot: &Snapshot,
    cfg: &RetrofitConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_shapes(phi_t, phi_prev, snapshot)?;
    let cur = phi_t.matrix();
    let prev = phi_prev.matrix();

    let mut prior_term = 0.0;
    for v in 0..cur.nrows() {
        prior_term += (cur.row(v) - prev.row(v)).norm_squared();
    }

    let mut network_term = 0.0;
    for ((u, v), _) in snapshot.edges() {
        let dist2 = (cur.row(u) - cur.row(v)).norm_squared();
        let du = snapshot.neighbors(u).len() as f64;
        let dv = snapshot.neighbors(v).len() as f64;
        network_term += dist2 * (1.0 / du + 1.0 / dv);
    }

    Ok(cfg.alpha * prior_term + network_term)
}

/// One Jacobi sweep: every update reads only the pre-sweep state.
/// Vertices with degree >= 1 move to
/// (alpha * phi_prev(v) + mean of neighbor vectors) / (alpha + 1);
/// isolated vertices are reset to their prior.
pub fn retrofit_sweep(
    phi: &EmbeddingMatrix,
    phi_prev: &EmbeddingMatrix,
    snapshot: &Snapshot,
    cfg: &RetrofitConfig,
) -> Result<EmbeddingMatrix> {
    cfg.validate()?;
    check_shapes(phi, phi_prev, snapshot)?;
    let cur = phi.matrix();
    let prev = phi_prev.matrix();
    let (n, d) = (cur.nrows(), cur.ncols());

    let mut next = DMatrix::zeros(n, d);
    for v in 0..n {
        let nbrs = snapshot.neighbors(v);
        if nbrs.is_empty() {
            next.set_row(v, &prev.row(v));
            continue;
        }
        let inv_deg = 1.0 / nbrs.len() as f64;
        for k in 0..d {
            let mut acc = cfg.alpha * prev[(v, k)];
            for &u in nbrs {
                acc += inv_deg * cur[(u, k)];
            }
            next[(v, k)] = acc / (cfg.alpha + 1.0);
        }
    }
    EmbeddingMatrix::from_matrix(next)
}

/// Iterates sweeps from phi_prev until the max-norm change of one sweep
/// drops below cfg.tolerance or cfg.max_sweeps is reached.
pub fn retrofit(
    phi_prev: &EmbeddingMatrix,
    snapshot: &Snapshot,
    cfg: &RetrofitConfig,
) -> Result<EmbeddingMatrix> {
    cfg.validate()?;
    check_shapes(phi_prev, phi_prev, snapshot)?;
    let mut phi = phi_prev.clone();
    for _ in 0..cfg.max_sweeps {
        let next = retrofit_sweep(&phi, phi_prev, snapshot, cfg)?;
        let change = (next.matrix() - phi.matrix()).amax();
        phi = next;
        if change < cfg.tolerance {
            break;
        }
    }
    Ok(phi)
}

/// Chains retrofit over consecutive snapshots starting from phi_first;
/// returns one embedding per snapshot in order.
pub fn retrofit_sequence(
    phi_first: &EmbeddingMatrix,
    snapshots: &[Snapshot],
    cfg: &RetrofitConfig,
) -> Result<Vec<EmbeddingMatrix>> {
    let mut out = Vec::with_capacity(snapshots.len());
    let mut prev = phi_first.clone();
    for snap in snapshots {
        let next = retrofit(&prev, snap, cfg)?;
        out.push(next.clone());
        prev = next;
    }
    Ok(out)
}

/// Dense solve of the sweep fixed-point system, for cross-checking the
/// iterative path: ((alpha+1) I - D^-1 A) phi = alpha * phi_prev on rows
/// with degree >= 1, identity rows pinned to the prior elsewhere.
pub fn retrofit_direct(
    phi_prev: &EmbeddingMatrix,
    snapshot: &Snapshot,
    cfg: &RetrofitConfig,
) -> Result<EmbeddingMatrix> {
    cfg.validate()?;
    check_shapes(phi_prev, phi_prev, snapshot)?;
    let n = snapshot.vertex_count();
    let prev = phi_prev.matrix();

    let mut system = DMatrix::zeros(n, n);
    let mut rhs = DMatrix::zeros(n, phi_prev.dim());
    for v in 0..n {
        let nbrs = snapshot.neighbors(v);
        if nbrs.is_empty() {
            system[(v, v)] = 1.0;
            rhs.set_row(v, &prev.row(v));
            continue;
        }
        system[(v, v)] = cfg.alpha + 1.0;
        let inv_deg = 1.0 / nbrs.len() as f64;
        for &u in nbrs {
            system[(v, u)] -= inv_deg;
        }
        let mut row = prev.row(v).into_owned();
        row *= cfg.alpha;
        rhs.set_row(v, &row);
    }
    let solved = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::invalid("system", "fixed-point system is singular"))?;
    EmbeddingMatrix::from_matrix(solved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn emb(rows: &[&[f64]]) -> EmbeddingMatrix {
        let n = rows.len();
        let d = rows[0].len();
        let m = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
        EmbeddingMatrix::from_matrix(m).unwrap()
    }

    fn cfg(alpha: f64) -> RetrofitConfig {
        RetrofitConfig { alpha, ..RetrofitConfig::default() }
    }

    #[test]
    fn objective_zero_when_static_and_edgeless() {
        let phi = emb(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let snap = Snapshot::empty(2);
        let j = retrofit_objective(&phi, &phi, &snap, &cfg(1.0)).unwrap();
        assert_eq!(j, 0.0);
    }

    #[test]
    fn objective_hand_case_eight() {
        let phi = emb(&[&[1.0], &[3.0]]);
        let snap = Snapshot::from_edges(2, &[(0, 1)]).unwrap();
        let j = retrofit_objective(&phi, &phi, &snap, &cfg(1.0)).unwrap();
        assert!((j - 8.0).abs() < 1e-12, "J = {j}");
    }

    #[test]
    fn objective_quadratic_in_scale() {
        let phi_t = emb(&[&[1.0, -1.0], &[2.0, 0.5], &[0.0, 3.0]]);
        let phi_p = emb(&[&[0.5, 0.0], &[1.0, 1.0], &[-1.0, 2.0]]);
        let snap = Snapshot::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let c = cfg(0.7);
        let j1 = retrofit_objective(&phi_t, &phi_p, &snap, &c).unwrap();
        let scale = |e: &EmbeddingMatrix| {
            EmbeddingMatrix::from_matrix(e.matrix() * 3.0).unwrap()
        };
        let j3 = retrofit_objective(&scale(&phi_t), &scale(&phi_p), &snap, &c).unwrap();
        assert!((j3 - 9.0 * j1).abs() < 1e-9 * j3.abs().max(1.0));
    }

    #[test]
    fn sweep_hand_case_and_isolated() {
        let phi = emb(&[&[1.0], &[3.0], &[9.0]]);
        let snap = Snapshot::from_edges(3, &[(0, 1)]).unwrap();
        let out = retrofit_sweep(&phi, &phi, &snap, &cfg(1.0)).unwrap();
        assert!((out.matrix()[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((out.matrix()[(1, 0)] - 2.0).abs() < 1e-15);
        assert_eq!(out.matrix()[(2, 0)], 9.0);
    }

    #[test]
    fn sweep_huge_alpha_stays_at_prior() {
        let phi_prev = emb(&[&[1.0, 5.0], &[3.0, -2.0]]);
        let snap = Snapshot::from_edges(2, &[(0, 1)]).unwrap();
        let out = retrofit_sweep(&phi_prev, &phi_prev, &snap, &cfg(1e9)).unwrap();
        assert!((out.matrix() - phi_prev.matrix()).amax() < 1e-6);
    }

    #[test]
    fn converges_to_two_vertex_fixed_point() {
        let phi_prev = emb(&[&[1.0], &[3.0]]);
        let snap = Snapshot::from_edges(2, &[(0, 1)]).unwrap();
        let out = retrofit(&phi_prev, &snap, &RetrofitConfig::default()).unwrap();
        assert!((out.matrix()[(0, 0)] - 5.0 / 3.0).abs() < 1e-6);
        assert!((out.matrix()[(1, 0)] - 7.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn edgeless_returns_prior_exactly() {
        let phi_prev = emb(&[&[0.25, -4.0], &[1e-3, 2.0]]);
        let snap = Snapshot::empty(2);
        let out = retrofit(&phi_prev, &snap, &RetrofitConfig::default()).unwrap();
        assert_eq!(out.matrix(), phi_prev.matrix());
    }

    fn random_instance(n: usize, d: usize, seed: u64) -> (EmbeddingMatrix, Snapshot) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random::<f64>() < 0.15 {
                    edges.push((u, v));
                }
            }
        }
        let snap = Snapshot::from_edges(n, &edges).unwrap();
        let m = DMatrix::from_fn(n, d, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        (EmbeddingMatrix::from_matrix(m).unwrap(), snap)
    }

    #[test]
    fn matches_direct_solve_across_alphas() {
        let (phi_prev, snap) = random_instance(20, 4, 99);
        for alpha in [0.1, 1.0, 10.0] {
            let tight = RetrofitConfig { alpha, max_sweeps: 2000, tolerance: 1e-12 };
            let iterative = retrofit(&phi_prev, &snap, &tight).unwrap();
            let direct = retrofit_direct(&phi_prev, &snap, &tight).unwrap();
            let diff = (iterative.matrix() - direct.matrix()).amax();
            assert!(diff < 1e-6, "alpha {alpha}: max diff {diff}");
        }
    }

    #[test]
    fn converged_objective_not_above_initial() {
        for seed in [1, 2, 3] {
            let (phi_prev, snap) = random_instance(15, 3, seed);
            for alpha in [0.1, 1.0, 10.0] {
                let c = RetrofitConfig { alpha, max_sweeps: 500, tolerance: 1e-10 };
                let out = retrofit(&phi_prev, &snap, &c).unwrap();
                let j_out = retrofit_objective(&out, &phi_prev, &snap, &c).unwrap();
                let j_init = retrofit_objective(&phi_prev, &phi_prev, &snap, &c).unwrap();
                assert!(
                    j_out <= j_init + 1e-9,
                    "seed {seed} alpha {alpha}: {j_out} > {j_init}"
                );
            }
        }
    }

    #[test]
    fn converged_rows_in_convex_hull() {
        let (phi_prev, snap) = random_instance(15, 3, 7);
        let c = RetrofitConfig { alpha: 1.0, max_sweeps: 5000, tolerance: 1e-13 };
        let out = retrofit(&phi_prev, &snap, &c).unwrap();
        let m = out.matrix();
        for v in 0..15 {
            let nbrs = snap.neighbors(v);
            if nbrs.is_empty() {
                continue;
            }
            for k in 0..3 {
                let mut lo = phi_prev.matrix()[(v, k)];
                let mut hi = lo;
                for &u in nbrs {
                    lo = lo.min(m[(u, k)]);
                    hi = hi.max(m[(u, k)]);
                }
                let x = m[(v, k)];
                assert!(
                    x >= lo - 1e-9 && x <= hi + 1e-9,
                    "vertex {v} coord {k}: {x} outside [{lo}, {hi}]"
                );
            }
        }
    }

    #[test]
    fn stronger_alpha_stays_closer_to_prior() {
        let (phi_prev, snap) = random_instance(15, 3, 21);
        let mut last = f64::INFINITY;
        for alpha in [0.1, 1.0, 10.0] {
            let c = RetrofitConfig { alpha, max_sweeps: 2000, tolerance: 1e-12 };
            let out = retrofit(&phi_prev, &snap, &c).unwrap();
            let dist = (out.matrix() - phi_prev.matrix()).norm();
            assert!(dist <= last + 1e-9, "alpha {alpha}: {dist} > {last}");
            last = dist;
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let phi = emb(&[&[1.0], &[2.0]]);
        let snap = Snapshot::empty(3);
        assert!(matches!(
            retrofit(&phi, &snap, &RetrofitConfig::default()),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
