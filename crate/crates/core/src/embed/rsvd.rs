//! Randomized truncated SVD by subspace iteration.
//!
//! Range finding follows the usual sketch-and-power scheme: a seeded
//! Gaussian test matrix, alternating multiplications by A and A^T with QR
//! re-orthonormalization between them, then an exact SVD of the small
//! projected matrix.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const OVERSAMPLE: usize = 10;
pub const POWER_ITERS: usize = 7;

/// Top-`rank` SVD factors of `a`, singular values in non-increasing order.
/// Columns of U are sign-canonical: the entry of largest magnitude in each
/// column is non-negative, so repeated runs and near-identical inputs agree.
pub fn truncated_svd(
    a: &DMatrix<f64>,
    rank: usize,
    seed: u64,
) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let (n, m) = (a.nrows(), a.ncols());
    let rank = rank.min(n.min(m));
    let sketch = (rank + OVERSAMPLE).min(n.min(m));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omega = DMatrix::zeros(m, sketch);
    for j in 0..sketch {
        for i in 0..m {
            omega[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }

    let mut q = orthonormalize(a * &omega);
    for _ in 0..POWER_ITERS {
        q = orthonormalize(a.transpose() * &q);
        q = orthonormalize(a * &q);
    }

    // small projected problem: B = Q^T A, sketch x m
    let b = q.transpose() * a;
    let svd = b.svd(true, true);
    let u_small = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let sigma = svd.singular_values;

    // nalgebra does not promise ordering
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());

    let mut u = DMatrix::zeros(n, rank);
    let mut s = DVector::zeros(rank);
    let mut vt = DMatrix::zeros(rank, m);
    let u_full = &q * u_small;
    for (out, &src) in order.iter().take(rank).enumerate() {
        u.set_column(out, &u_full.column(src));
        s[out] = sigma[src];
        vt.set_row(out, &v_t.row(src));
    }
    sign_canonicalize(&mut u, &mut vt);
    (u, s, vt)
}

fn orthonormalize(y: DMatrix<f64>) -> DMatrix<f64> {
    let cols = y.ncols();
    let qr = y.qr();
    let q = qr.q();
    // thin Q keeps as many columns as the input had
    debug_assert_eq!(q.ncols(), cols.min(q.nrows()));
    q
}

/// Flips column signs so the largest-magnitude entry of each U column is
/// non-negative. V rows flip in tandem, keeping U S V^T unchanged.
fn sign_canonicalize(u: &mut DMatrix<f64>, vt: &mut DMatrix<f64>) {
    for j in 0..u.ncols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..u.nrows() {
            let a = u[(i, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if u[(best, j)] < 0.0 {
            for i in 0..u.nrows() {
                u[(i, j)] = -u[(i, j)];
            }
            for k in 0..vt.ncols() {
                vt[(j, k)] = -vt[(j, k)];
            }
        }
    }
}
