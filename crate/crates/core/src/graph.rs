//! Temporal graphs: snapshot sequences over a shared vertex set.
//!
//! A [`TemporalGraph`] holds an ordered list of undirected [`Snapshot`]s,
//! all indexed against one vertex universe. Vertices keep their external
//! string labels through a bidirectional map; everything numeric works on
//! dense indices `0..vertex_count`.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::io::BufRead;

use nalgebra::DMatrix;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default cap on vertices for dense adjacency materialization.
pub const DEFAULT_DENSE_GUARD: usize = 50_000;

/// One undirected snapshot. Edges are stored canonically with `u < v`,
/// self-loops are rejected, repeated edges accumulate multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    vertex_count: usize,
    edges: BTreeMap<(usize, usize), u64>,
    neighbors: Vec<Vec<usize>>,
}

impl Snapshot {
    /// Builds a snapshot from (u, v) pairs. Self-loops are dropped silently;
    /// the vertex universe is fixed by `vertex_count`, not by the edges.
    pub fn from_edges(
        vertex_count: usize,
        pairs: impl IntoIterator<Item = impl std::borrow::Borrow<(usize, usize)>>,
    ) -> Result<Self> {
        let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for pair in pairs {
            let (u, v) = *pair.borrow();
            for &x in &[u, v] {
                if x >= vertex_count {
                    return Err(Error::VertexOutOfRange { index: x, vertices: vertex_count });
                }
            }
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            *edges.entry(key).or_insert(0) += 1;
        }
        let mut neighbors = vec![Vec::new(); vertex_count];
        for &(u, v) in edges.keys() {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Snapshot { vertex_count, edges, neighbors })
    }

    pub fn empty(vertex_count: usize) -> Self {
        Snapshot {
            vertex_count,
            edges: BTreeMap::new(),
            neighbors: vec![Vec::new(); vertex_count],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of distinct edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Distinct edges in canonical order with multiplicities.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.edges.iter().map(|(&e, &m)| (e, m))
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        let key = (u.min(v), u.max(v));
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.multiplicity(u, v) > 0
    }

    /// Number of distinct neighbors of `v`.
    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.vertex_count {
            return Err(Error::VertexOutOfRange { index: v, vertices: self.vertex_count });
        }
        Ok(self.neighbors[v].len())
    }

    /// Sorted distinct neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Dense symmetric adjacency with zero diagonal. Entries are edge
    /// multiplicities when `weighted`, otherwise 0/1.
    pub fn adjacency_dense(&self, weighted: bool) -> Result<DMatrix<f64>> {
        self.adjacency_dense_with_guard(weighted, DEFAULT_DENSE_GUARD)
    }

    pub fn adjacency_dense_with_guard(&self, weighted: bool, guard: usize) -> Result<DMatrix<f64>> {
        if self.vertex_count > guard {
            return Err(Error::DenseGuard { vertices: self.vertex_count, guard });
        }
        let n = self.vertex_count;
        let mut a = DMatrix::zeros(n, n);
        for (&(u, v), &m) in &self.edges {
            let w = if weighted { m as f64 } else { 1.0 };
            a[(u, v)] = w;
            a[(v, u)] = w;
        }
        Ok(a)
    }
}

/// Bidirectional vertex label map, dense indices in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexLabels {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VertexLabels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sequential labels "0".."n-1" for synthetic graphs.
    pub fn numeric(n: usize) -> Self {
        let mut labels = Self::new();
        for i in 0..n {
            labels.intern(&i.to_string());
        }
        labels
    }

    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Ordered snapshot sequence over a common vertex universe.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    vertex_count: usize,
    snapshots: Vec<Snapshot>,
    labels: VertexLabels,
}

impl TemporalGraph {
    /// Requires at least two snapshots, all sized to the same universe.
    pub fn new(vertex_count: usize, snapshots: Vec<Snapshot>, labels: VertexLabels) -> Result<Self> {
        if snapshots.len() < 2 {
            return Err(Error::TooFewSnapshots { found: snapshots.len(), need: 2 });
        }
        for s in &snapshots {
            if s.vertex_count() != vertex_count {
                return Err(Error::ShapeMismatch {
                    expected: format!("{vertex_count} vertices"),
                    found: format!("{} vertices", s.vertex_count()),
                });
            }
        }
        if labels.len() != vertex_count {
            return Err(Error::ShapeMismatch {
                expected: format!("{vertex_count} labels"),
                found: format!("{} labels", labels.len()),
            });
        }
        Ok(TemporalGraph { vertex_count, snapshots, labels })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn snapshot_count(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> &Snapshot {
        &self.snapshots[t]
    }

    pub fn labels(&self) -> &VertexLabels {
        &self.labels
    }

    /// Copy of the first `len` snapshots as a graph of their own.
    pub fn truncated(&self, len: usize) -> Result<TemporalGraph> {
        if len > self.snapshots.len() {
            return Err(Error::invalid("len", "beyond snapshot count"));
        }
        TemporalGraph::new(self.vertex_count, self.snapshots[..len].to_vec(), self.labels.clone())
    }

    /// Total distinct edges across snapshots.
    pub fn total_edges(&self) -> usize {
        self.snapshots.iter().map(|s| s.edge_count()).sum()
    }
}

/// How raw `u v t` events are mapped onto snapshots.
#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotSpec {
    /// `bins` equal-width time bins over [min_ts, max_ts], last bin closed.
    EqualWidth { bins: usize },
    /// Ascending interior cut points; events fall in the bin counting cuts <= t.
    Boundaries { cuts: Vec<f64> },
    /// Third column is already a 0-based snapshot index.
    PreBinned,
}

impl SnapshotSpec {
    fn validate(&self) -> Result<()> {
        match self {
            SnapshotSpec::EqualWidth { bins } => {
                if *bins < 2 {
                    return Err(Error::invalid("bins", "equal-width mode needs at least 2 bins"));
                }
            }
            SnapshotSpec::Boundaries { cuts } => {
                if cuts.is_empty() {
                    return Err(Error::invalid("boundaries", "need at least one cut point"));
                }
                if cuts.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid("boundaries", "cut points must be strictly ascending"));
                }
                if cuts.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("boundaries", "cut points must be finite"));
                }
            }
            SnapshotSpec::PreBinned => {}
        }
        Ok(())
    }
}

/// Parses a `u v t` event stream into snapshots.
///
/// Lines starting with `#` and blank lines are skipped. Node identifiers are
/// arbitrary whitespace-free tokens, interned in first-appearance order.
/// Self-loop events register their vertex but contribute no edge.
pub fn parse_edge_list(reader: impl BufRead, spec: &SnapshotSpec) -> Result<TemporalGraph> {
    spec.validate()?;
    let mut labels = VertexLabels::new();
    // (u, v, raw time or bin index)
    let mut events: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_prebin: usize = 0;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (u_tok, v_tok, t_tok) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected `u v t`, got {trimmed:?}"),
                });
            }
        };
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("trailing tokens after `u v t` in {trimmed:?}"),
            });
        }
        let t = match spec {
            SnapshotSpec::PreBinned => {
                let idx: usize = t_tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("snapshot index {t_tok:?} is not a non-negative integer"),
                })?;
                max_prebin = max_prebin.max(idx);
                idx as f64
            }
            _ => {
                let ts: f64 = t_tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("timestamp {t_tok:?} is not a number"),
                })?;
                if !ts.is_finite() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("timestamp {t_tok:?} is not finite"),
                    });
                }
                ts
            }
        };
        let u = labels.intern(u_tok);
        let v = labels.intern(v_tok);
        events.push((u, v, t));
    }

    if events.is_empty() {
        return Err(Error::Parse { line: 0, msg: "empty edge stream".into() });
    }

    let bin_count;
    let assign: Box<dyn Fn(f64) -> usize> = match spec {
        SnapshotSpec::PreBinned => {
            bin_count = max_prebin + 1;
            Box::new(|t| t as usize)
        }
        SnapshotSpec::Boundaries { cuts } => {
            bin_count = cuts.len() + 1;
            let cuts = cuts.clone();
            Box::new(move |t| cuts.iter().take_while(|&&c| t >= c).count())
        }
        SnapshotSpec::EqualWidth { bins } => {
            let k = *bins;
            let min = events.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
            let max = events.iter().map(|e| e.2).fold(f64::NEG_INFINITY, f64::max);
            bin_count = k;
            if max > min {
                let width = (max - min) / k as f64;
                Box::new(move |t| (((t - min) / width) as usize).min(k - 1))
            } else {
                Box::new(|_| 0)
            }
        }
    };

    if bin_count < 2 {
        return Err(Error::TooFewSnapshots { found: bin_count, need: 2 });
    }

    let n = labels.len();
    let mut per_bin: Vec<Vec<(usize, usize)>> = vec![Vec::new(); bin_count];
    for &(u, v, t) in &events {
        per_bin[assign(t)].push((u, v));
    }
    let snapshots: Vec<Snapshot> = per_bin
        .into_iter()
        .map(|pairs| Snapshot::from_edges(n, pairs))
        .collect::<Result<_>>()?;

    let non_empty = snapshots.iter().filter(|s| !s.is_empty()).count();
    for (t, s) in snapshots.iter().enumerate() {
        if s.is_empty() {
            log::warn!("snapshot {t} is empty");
        }
    }
    if non_empty < 2 {
        return Err(Error::TooFewSnapshots { found: non_empty, need: 2 });
    }

    TemporalGraph::new(n, snapshots, labels)
}

/// Serializes a graph as `u v t` lines with t = snapshot index.
///
/// Multiplicities expand to repeated lines. Vertices isolated in every
/// snapshot are kept alive as self-loop lines, which the parser registers
/// and drops. `parse_edge_list(dump_edge_list(g), PreBinned)` reproduces the
/// label set and per-snapshot edge multisets.
pub fn dump_edge_list(graph: &TemporalGraph) -> String {
    let mut out = String::new();
    let labels = graph.labels();
    let mut seen = vec![false; graph.vertex_count()];
    for (t, snap) in graph.snapshots().iter().enumerate() {
        for ((u, v), m) in snap.edges() {
            seen[u] = true;
            seen[v] = true;
            let (lu, lv) = (labels.name(u).unwrap(), labels.name(v).unwrap());
            for _ in 0..m {
                out.push_str(&format!("{lu} {lv} {t}\n"));
            }
        }
    }
    for (v, &s) in seen.iter().enumerate() {
        if !s {
            let l = labels.name(v).unwrap();
            out.push_str(&format!("{l} {l} 0\n"));
        }
    }
    out
}

/// Drifting stochastic block model. Snapshot 1 draws communities uniformly
/// and edges by Bernoulli(p_in | p_out); each later snapshot re-assigns a
/// `churn` fraction of vertices to uniformly random communities and redraws
/// all edges under the new assignment.
pub fn synth_dynamic_sbm(
    nodes: usize,
    communities: usize,
    snapshots: usize,
    p_in: f64,
    p_out: f64,
    churn: f64,
    seed: u64,
) -> Result<TemporalGraph> {
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out >= p_in {
        return Err(Error::invalid("p_in/p_out", "need 0 <= p_out < p_in <= 1"));
    }
    if !(0.0..=1.0).contains(&churn) {
        return Err(Error::invalid("churn", "need 0 <= churn <= 1"));
    }
    if nodes == 0 || communities == 0 {
        return Err(Error::invalid("nodes/communities", "must be positive"));
    }
    if snapshots < 2 {
        return Err(Error::TooFewSnapshots { found: snapshots, need: 2 });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comm: Vec<usize> = (0..nodes).map(|_| rng.random_range(0..communities)).collect();
    let swaps = (churn * nodes as f64).round() as usize;

    let mut snaps = Vec::with_capacity(snapshots);
    for t in 0..snapshots {
        if t > 0 && swaps > 0 {
            // partial Fisher-Yates picks `swaps` distinct vertices
            let mut order: Vec<usize> = (0..nodes).collect();
            for i in 0..swaps.min(nodes) {
                let j = rng.random_range(i..nodes);
                order.swap(i, j);
            }
            for &v in order.iter().take(swaps.min(nodes)) {
                comm[v] = rng.random_range(0..communities);
            }
        }
        let mut pairs = Vec::new();
        for u in 0..nodes {
            for v in (u + 1)..nodes {
                let p = if comm[u] == comm[v] { p_in } else { p_out };
                if rng.random::<f64>() < p {
                    pairs.push((u, v));
                }
            }
        }
        snaps.push(Snapshot::from_edges(nodes, pairs)?);
    }

    TemporalGraph::new(nodes, snaps, VertexLabels::numeric(nodes))
}
