//! Second-order biased random walk generation.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Snapshot;

use super::sgns::SkipgramConfig;

/// Generates `walks_per_node` walks of `walk_length` vertices starting from
/// every non-isolated vertex. Step weights: returning to the previous vertex
/// scales by 1/p, moving to a common neighbor of it by 1, anywhere else by
/// 1/q; the first step of a walk is unbiased. p = q = 1 makes every step
/// uniform over the current vertex's neighbors.
pub fn sample_walks(snapshot: &Snapshot, cfg: &SkipgramConfig, weighted: bool) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    sample_walks_with(snapshot, cfg, weighted, &mut rng)
}

pub(crate) fn sample_walks_with(
    snapshot: &Snapshot,
    cfg: &SkipgramConfig,
    weighted: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let starts: Vec<usize> = (0..snapshot.vertex_count())
        .filter(|&v| !snapshot.neighbors(v).is_empty())
        .collect();
    let mut walks = Vec::with_capacity(starts.len() * cfg.walks_per_node);
    let mut order = starts;
    let mut cumulative: Vec<f64> = Vec::new();
    for _ in 0..cfg.walks_per_node {
        order.shuffle(rng);
        for &start in &order {
            walks.push(one_walk(snapshot, cfg, weighted, start, rng, &mut cumulative));
        }
    }
    walks
}

fn one_walk(
    snapshot: &Snapshot,
    cfg: &SkipgramConfig,
    weighted: bool,
    start: usize,
    rng: &mut ChaCha8Rng,
    cumulative: &mut Vec<f64>,
) -> Vec<usize> {
    let mut walk = Vec::with_capacity(cfg.walk_length);
    walk.push(start);
    let mut prev: Option<usize> = None;
    let mut cur = start;
    while walk.len() < cfg.walk_length {
        let nbrs = snapshot.neighbors(cur);
        cumulative.clear();
        let mut total = 0.0;
        for &next in nbrs {
            let base = if weighted {
                snapshot.multiplicity(cur, next) as f64
            } else {
                1.0
            };
            let bias = match prev {
                None => 1.0,
                Some(p) if next == p => 1.0 / cfg.p,
                Some(p) if snapshot.neighbors(p).binary_search(&next).is_ok() => 1.0,
                Some(_) => 1.0 / cfg.q,
            };
            total += base * bias;
            cumulative.push(total);
        }
        let r = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= r).min(nbrs.len() - 1);
        prev = Some(cur);
        cur = nbrs[idx];
        walk.push(cur);
    }
    walk
}
