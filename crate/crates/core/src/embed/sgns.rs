//! Skip-gram with negative sampling trained on random-walk corpora.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::Snapshot;

use super::walks;

#[derive(Debug, Clone, PartialEq)]
pub struct SkipgramConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    /// Return bias: stepping back to the previous vertex weighs 1/p.
    pub p: f64,
    /// In-out bias: stepping outside the previous vertex's neighborhood
    /// weighs 1/q.
    pub q: f64,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SkipgramConfig {
    fn default() -> Self {
        SkipgramConfig {
            walks_per_node: 10,
            walk_length: 40,
            window: 8,
            negative_samples: 5,
            epochs: 1,
            p: 1.0,
            q: 1.0,
            learning_rate: 0.025,
            seed: 0,
        }
    }
}

impl SkipgramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.negative_samples < 1 {
            return Err(Error::invalid("negative_samples", "must be at least 1"));
        }
        if self.window < 1 {
            return Err(Error::invalid("window", "must be at least 1"));
        }
        if !(self.p > 0.0) {
            return Err(Error::invalid("p", "must be positive"));
        }
        if !(self.q > 0.0) {
            return Err(Error::invalid("q", "must be positive"));
        }
        if self.walks_per_node < 1 {
            return Err(Error::invalid("walks_per_node", "must be at least 1"));
        }
        if self.walk_length < 1 {
            return Err(Error::invalid("walk_length", "must be at least 1"));
        }
        if self.epochs < 1 {
            return Err(Error::invalid("epochs", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate", "must be positive"));
        }
        Ok(())
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Cumulative sampler for the negative-sampling noise distribution,
/// proportional to degree^(3/4). Zero-degree vertices carry no mass.
pub(crate) struct NoiseTable {
    cumulative: Vec<f64>,
    total: f64,
}

impl NoiseTable {
    pub(crate) fn build(snapshot: &Snapshot, weighted: bool) -> Self {
        let n = snapshot.vertex_count();
        let mut cumulative = Vec::with_capacity(n);
        let mut total = 0.0;
        for v in 0..n {
            let deg = if weighted {
                snapshot
                    .neighbors(v)
                    .iter()
                    .map(|&u| snapshot.multiplicity(v, u))
                    .sum::<u64>() as f64
            } else {
                snapshot.neighbors(v).len() as f64
            };
            if deg > 0.0 {
                total += deg.powf(0.75);
            }
            cumulative.push(total);
        }
        NoiseTable { cumulative, total }
    }

    pub(crate) fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let r = rng.random::<f64>() * self.total;
        self.cumulative
            .partition_point(|&c| c <= r)
            .min(self.cumulative.len() - 1)
    }
}

/// Training-rate schedule shared by the sampling embedders: linear decay
/// from the initial rate, floored at 1e-4 of it.
pub(crate) fn decayed_lr(initial: f64, done: usize, total: usize) -> f64 {
    let frac = 1.0 - done as f64 / (total as f64 + 1.0);
    initial * frac.max(1e-4)
}

pub(crate) fn embed_randwalk_view(
    snapshot: &Snapshot,
    d: usize,
    cfg: &SkipgramConfig,
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
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let corpus = walks::sample_walks_with(snapshot, cfg, weighted, &mut rng);
    let noise = NoiseTable::build(snapshot, weighted);

    let mut input = vec![0.0f64; n * d];
    for x in input.iter_mut() {
        *x = (rng.random::<f64>() - 0.5) / d as f64;
    }
    let mut context = vec![0.0f64; n * d];
    let mut neu1e = vec![0.0f64; d];

    let total_tokens = cfg.epochs * corpus.iter().map(|w| w.len()).sum::<usize>();
    let mut tokens_done = 0usize;

    for _ in 0..cfg.epochs {
        for walk in &corpus {
            for (i, &center) in walk.iter().enumerate() {
                let lr = decayed_lr(cfg.learning_rate, tokens_done, total_tokens);
                tokens_done += 1;
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window).min(walk.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let word = walk[j];
                    let base_in = word * d;
                    neu1e.fill(0.0);
                    for k in 0..=cfg.negative_samples {
                        let (target, label) = if k == 0 {
                            (center, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == center {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let base_out = target * d;
                        let mut f = 0.0;
                        for x in 0..d {
                            f += input[base_in + x] * context[base_out + x];
                        }
                        let g = (label - sigmoid(f)) * lr;
                        for x in 0..d {
                            neu1e[x] += g * context[base_out + x];
                            context[base_out + x] += g * input[base_in + x];
                        }
                    }
                    for x in 0..d {
                        input[base_in + x] += neu1e[x];
                    }
                }
            }
        }
    }

    let mut out = DMatrix::zeros(n, d);
    for v in 0..n {
        if snapshot.neighbors(v).is_empty() {
            continue;
        }
        for x in 0..d {
            out[(v, x)] = input[v * d + x];
        }
    }
    EmbeddingMatrix::from_matrix(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embed_randwalk;

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    fn clique_pair() -> Snapshot {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in (u + 1)..5 {
                edges.push((u, v));
                edges.push((u + 5, v + 5));
            }
        }
        Snapshot::from_edges(10, &edges).unwrap()
    }

    #[test]
    fn disconnected_cliques_separate() {
        let snap = clique_pair();
        let cfg = SkipgramConfig {
            walks_per_node: 10,
            walk_length: 20,
            window: 4,
            epochs: 2,
            seed: 3,
            ..SkipgramConfig::default()
        };
        let emb = embed_randwalk(&snap, 8, &cfg).unwrap();
        let rows: Vec<Vec<f64>> = (0..10).map(|v| emb.row(v)).collect();
        let (mut intra, mut intra_n) = (0.0, 0);
        let (mut inter, mut inter_n) = (0.0, 0);
        for u in 0..10 {
            for v in (u + 1)..10 {
                let c = cosine(&rows[u], &rows[v]);
                if (u < 5) == (v < 5) {
                    intra += c;
                    intra_n += 1;
                } else {
                    inter += c;
                    inter_n += 1;
                }
            }
        }
        let intra = intra / intra_n as f64;
        let inter = inter / inter_n as f64;
        assert!(intra > inter, "intra {intra} should exceed inter {inter}");
    }

    #[test]
    fn deterministic_given_seed() {
        let snap = clique_pair();
        let cfg = SkipgramConfig {
            walks_per_node: 3,
            walk_length: 10,
            seed: 9,
            ..SkipgramConfig::default()
        };
        let a = embed_randwalk(&snap, 4, &cfg).unwrap();
        let b = embed_randwalk(&snap, 4, &cfg).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = embed_randwalk(&snap, 4, &SkipgramConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn isolated_vertices_zeroed() {
        let snap = Snapshot::from_edges(6, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let cfg = SkipgramConfig {
            walks_per_node: 2,
            walk_length: 8,
            seed: 1,
            ..SkipgramConfig::default()
        };
        let emb = embed_randwalk(&snap, 4, &cfg).unwrap();
        for v in 3..6 {
            assert!(emb.row(v).iter().all(|&x| x == 0.0), "vertex {v}");
        }
        assert!(emb.row(0).iter().any(|&x| x != 0.0));
    }

    #[test]
    fn rejects_edgeless_and_bad_config() {
        let empty = Snapshot::empty(4);
        let cfg = SkipgramConfig::default();
        assert!(matches!(
            embed_randwalk(&empty, 2, &cfg),
            Err(Error::EdgelessSnapshot)
        ));
        let snap = Snapshot::from_edges(3, &[(0, 1)]).unwrap();
        let bad = SkipgramConfig { p: 0.0, ..SkipgramConfig::default() };
        assert!(matches!(
            embed_randwalk(&snap, 2, &bad),
            Err(Error::InvalidParam { name: "p", .. })
        ));
    }

    #[test]
    fn noise_table_skips_isolated() {
        let snap = Snapshot::from_edges(5, &[(0, 1), (1, 2)]).unwrap();
        let table = NoiseTable::build(&snap, false);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..2000 {
            let v = table.sample(&mut rng);
            assert!(v <= 2, "sampled isolated vertex {v}");
        }
    }

    #[test]
    fn noise_table_degree_biased() {
        // star: center degree 4, leaves degree 1; mass ratio 4^0.75
        let snap = Snapshot::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let table = NoiseTable::build(&snap, false);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut center = 0u64;
        let draws = 40_000;
        for _ in 0..draws {
            if table.sample(&mut rng) == 0 {
                center += 1;
            }
        }
        let expect = 4f64.powf(0.75) / (4f64.powf(0.75) + 4.0);
        let got = center as f64 / draws as f64;
        assert!((got - expect).abs() < 0.01, "center mass {got} vs {expect}");
    }
}
