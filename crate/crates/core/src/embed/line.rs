//! Edge-sampling embedder: logistic dot-product objective over sampled
//! edges with negative sampling.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::Snapshot;

use super::sgns::{decayed_lr, sigmoid, NoiseTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOrder {
    /// Both endpoints share one vector table; models direct affinity.
    First,
    /// Targets use a separate context table; models neighborhood similarity.
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineConfig {
    pub order: LineOrder,
    /// Total number of edge samples drawn (the training budget).
    pub edge_samples: usize,
    pub negative_samples: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for LineConfig {
    fn default() -> Self {
        LineConfig {
            order: LineOrder::First,
            edge_samples: 1_000_000,
            negative_samples: 5,
            learning_rate: 0.025,
            seed: 0,
        }
    }
}

impl LineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.negative_samples < 1 {
            return Err(Error::invalid("negative_samples", "must be at least 1"));
        }
        if self.edge_samples < 1 {
            return Err(Error::invalid("edge_samples", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate", "must be positive"));
        }
        Ok(())
    }
}

/// Per-sample loss: -label ln sigma(u.v) - (1-label) ln sigma(-u.v).
pub fn line_pair_loss(u: &[f64], v: &[f64], label: f64) -> f64 {
    let x: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    label * softplus(-x) + (1.0 - label) * softplus(x)
}

/// Gradients of `line_pair_loss` with respect to u and v.
pub fn line_pair_gradient(u: &[f64], v: &[f64], label: f64) -> (Vec<f64>, Vec<f64>) {
    let x: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let coeff = sigmoid(x) - label;
    let gu = v.iter().map(|&b| coeff * b).collect();
    let gv = u.iter().map(|&a| coeff * a).collect();
    (gu, gv)
}

fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t
    } else if t < -30.0 {
        t.exp()
    } else {
        t.exp().ln_1p()
    }
}

pub(crate) fn embed_line_view(
    snapshot: &Snapshot,
    d: usize,
    cfg: &LineConfig,
    weighted: bool,
) -> Result<EmbeddingMatrix> {
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    cfg.validate()?;
    if snapshot.is_empty() {
        return Err(Error::EdgelessSnapshot);
    }
    let n = snapshot.vertex_count();

    let mut endpoints = Vec::with_capacity(snapshot.edge_count());
    let mut edge_cum = Vec::with_capacity(snapshot.edge_count());
    let mut total_weight = 0.0;
    for ((u, v), m) in snapshot.edges() {
        endpoints.push((u, v));
        total_weight += if weighted { m as f64 } else { 1.0 };
        edge_cum.push(total_weight);
    }
    let noise = NoiseTable::build(snapshot, weighted);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut vertex = vec![0.0f64; n * d];
    for x in vertex.iter_mut() {
        *x = (rng.random::<f64>() - 0.5) / d as f64;
    }
    let first_order = cfg.order == LineOrder::First;
    let mut context = if first_order {
        Vec::new()
    } else {
        vec![0.0f64; n * d]
    };
    let mut neu1e = vec![0.0f64; d];

    for s in 0..cfg.edge_samples {
        let lr = decayed_lr(cfg.learning_rate, s, cfg.edge_samples);
        let r = rng.random::<f64>() * total_weight;
        let e = edge_cum.partition_point(|&c| c <= r).min(endpoints.len() - 1);
        let (a, b) = endpoints[e];
        let (src, dst) = if rng.random::<bool>() { (a, b) } else { (b, a) };
        train_sample(
            &mut vertex,
            &mut context,
            first_order,
            d,
            src,
            dst,
            cfg.negative_samples,
            &noise,
            &mut rng,
            lr,
            &mut neu1e,
        );
    }

    let mut out = DMatrix::zeros(n, d);
    for v in 0..n {
        if snapshot.neighbors(v).is_empty() {
            continue;
        }
        for x in 0..d {
            out[(v, x)] = vertex[v * d + x];
        }
    }
    EmbeddingMatrix::from_matrix(out)
}

/// One SGD step on a sampled (src, dst) pair plus its negatives. A noise
/// draw equal to the positive target is skipped, not redrawn. First order
/// shares one table between both sides, so a draw equal to the source is
/// skipped too: with a single table that draw shrinks the source vector
/// itself and on tiny graphs the shrinkage outweighs the positive signal.
/// The source update is accumulated in `neu1e` and applied once at the end.
#[allow(clippy::too_many_arguments)]
fn train_sample(
    vertex: &mut [f64],
    context: &mut [f64],
    first_order: bool,
    d: usize,
    src: usize,
    dst: usize,
    negatives: usize,
    noise: &NoiseTable,
    rng: &mut ChaCha8Rng,
    lr: f64,
    neu1e: &mut [f64],
) {
    let base_src = src * d;
    neu1e.fill(0.0);
    for k in 0..=negatives {
        let (target, label) = if k == 0 {
            (dst, 1.0)
        } else {
            let t = noise.sample(rng);
            if t == dst || (first_order && t == src) {
                continue;
            }
            (t, 0.0)
        };
        let base_tgt = target * d;
        let mut f = 0.0;
        if first_order {
            for x in 0..d {
                f += vertex[base_src + x] * vertex[base_tgt + x];
            }
        } else {
            for x in 0..d {
                f += vertex[base_src + x] * context[base_tgt + x];
            }
        }
        let g = (label - sigmoid(f)) * lr;
        if first_order {
            for x in 0..d {
                neu1e[x] += g * vertex[base_tgt + x];
                vertex[base_tgt + x] += g * vertex[base_src + x];
            }
        } else {
            for x in 0..d {
                neu1e[x] += g * context[base_tgt + x];
                context[base_tgt + x] += g * vertex[base_src + x];
            }
        }
    }
    for x in 0..d {
        vertex[base_src + x] += neu1e[x];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embed_line;

    #[test]
    fn single_edge_learns_high_affinity() {
        let snap = Snapshot::from_edges(2, &[(0, 1)]).unwrap();
        let cfg = LineConfig {
            edge_samples: 20_000,
            seed: 1,
            ..LineConfig::default()
        };
        let emb = embed_line(&snap, 4, &cfg).unwrap();
        let (u, v) = (emb.row(0), emb.row(1));
        let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        let sig = sigmoid(dot);
        assert!(sig > 0.9, "sigma(phi0 . phi1) = {sig}");
    }

    #[test]
    fn pair_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 6;
        for trial in 0..20 {
            let u: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let label = if trial % 2 == 0 { 1.0 } else { 0.0 };
            let (gu, gv) = line_pair_gradient(&u, &v, label);
            let h = 1e-6;
            for i in 0..d {
                let mut up = u.clone();
                let mut un = u.clone();
                up[i] += h;
                un[i] -= h;
                let fd = (line_pair_loss(&up, &v, label) - line_pair_loss(&un, &v, label)) / (2.0 * h);
                let denom = fd.abs().max(gu[i].abs()).max(1e-8);
                assert!(
                    (fd - gu[i]).abs() / denom < 1e-5,
                    "du[{i}]: analytic {} vs fd {fd}",
                    gu[i]
                );

                let mut vp = v.clone();
                let mut vn = v.clone();
                vp[i] += h;
                vn[i] -= h;
                let fd = (line_pair_loss(&u, &vp, label) - line_pair_loss(&u, &vn, label)) / (2.0 * h);
                let denom = fd.abs().max(gv[i].abs()).max(1e-8);
                assert!(
                    (fd - gv[i]).abs() / denom < 1e-5,
                    "dv[{i}]: analytic {} vs fd {fd}",
                    gv[i]
                );
            }
        }
    }

    #[test]
    fn deterministic_given_seed_and_order_matters() {
        let snap = Snapshot::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let base = LineConfig {
            edge_samples: 2_000,
            seed: 7,
            ..LineConfig::default()
        };
        let a = embed_line(&snap, 4, &base).unwrap();
        let b = embed_line(&snap, 4, &base).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let second = LineConfig {
            order: LineOrder::Second,
            ..base
        };
        let c = embed_line(&snap, 4, &second).unwrap();
        assert!(c.matrix().iter().all(|x| x.is_finite()));
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn isolated_rows_zero_and_edgeless_rejected() {
        let snap = Snapshot::from_edges(4, &[(0, 1)]).unwrap();
        let cfg = LineConfig {
            edge_samples: 500,
            seed: 2,
            ..LineConfig::default()
        };
        let emb = embed_line(&snap, 3, &cfg).unwrap();
        assert!(emb.row(2).iter().all(|&x| x == 0.0));
        assert!(emb.row(3).iter().all(|&x| x == 0.0));
        assert!(matches!(
            embed_line(&Snapshot::empty(3), 3, &cfg),
            Err(Error::EdgelessSnapshot)
        ));
    }

    #[test]
    fn weighted_sampling_prefers_heavy_edge() {
        // multiplicity 9 vs 1: the heavy edge's endpoints should end up
        // closer than the light edge's far endpoint
        let snap = Snapshot::from_edges(
            3,
            &[(0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (1, 2)],
        )
        .unwrap();
        let cfg = LineConfig {
            edge_samples: 30_000,
            seed: 4,
            ..LineConfig::default()
        };
        let emb = crate::embed::embed_snapshot(
            &snap,
            &crate::embed::EmbedMethod::Line(cfg),
            4,
            4,
            true,
        )
        .unwrap();
        let dot = |a: usize, b: usize| -> f64 {
            emb.row(a).iter().zip(emb.row(b)).map(|(x, y)| x * y).sum()
        };
        assert!(dot(0, 1) > dot(0, 2), "heavy pair {} vs {}", dot(0, 1), dot(0, 2));
    }
}
