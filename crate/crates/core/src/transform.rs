//! Global temporal smoothness: learn square maps that carry one snapshot's
//! embedding onto the next, either one shared map over all consecutive
//! pairs or per-pair maps blended by a smoothing scheme.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::embedding::{format_floats, parse_floats, EmbeddingMatrix};
use crate::error::{Error, Result};

/// Square map applied on the right of row-vector embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    values: DMatrix<f64>,
}

impl TransformMatrix {
    pub fn from_matrix(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() || values.nrows() == 0 {
            return Err(Error::ShapeMismatch {
                expected: "square non-empty matrix".into(),
                found: format!("{} x {}", values.nrows(), values.ncols()),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("values", "entries must be finite"));
        }
        Ok(TransformMatrix { values })
    }

    pub fn identity(dim: usize) -> Self {
        TransformMatrix { values: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.values
    }

    /// Header line `dim`, then dim lines of dim space-separated reals,
    /// full round-trip precision.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let d = self.dim();
        writeln!(w, "{d}")?;
        for i in 0..d {
            writeln!(w, "{}", format_floats(self.values.row(i).iter().copied()))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("utf8")
    }

    pub fn read_from(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "missing header".into() })??;
        let d: usize = header.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("expected dimension, got '{}'", header.trim()),
        })?;
        if d == 0 {
            return Err(Error::Parse { line: 1, msg: "dimension must be at least 1".into() });
        }
        let mut values = DMatrix::zeros(d, d);
        for i in 0..d {
            let line = lines.next().ok_or_else(|| Error::Parse {
                line: i + 2,
                msg: format!("expected {d} rows, found {i}"),
            })??;
            let row = parse_floats(&line, i + 2, d)?;
            for (j, x) in row.into_iter().enumerate() {
                values[(i, j)] = x;
            }
        }
        TransformMatrix::from_matrix(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdConfig {
    pub iterations: usize,
    pub learning_rate: f64,
    /// Global-norm gradient clipping threshold.
    pub clip_ratio: f64,
    pub seed: u64,
}

impl Default for GdConfig {
    fn default() -> Self {
        GdConfig {
            iterations: 10_000,
            learning_rate: 1e-3,
            clip_ratio: 5.0,
            seed: 0,
        }
    }
}

impl GdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate", "must be positive"));
        }
        if !(self.clip_ratio > 0.0) {
            return Err(Error::invalid("clip_ratio", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingKind {
    Avg,
    Linear,
    Exp,
    Wct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingSpec {
    pub kind: SmoothingKind,
    /// Decay parameter for wct; unused by the other kinds.
    pub theta: f64,
    /// Divide the combination by the weight sum. Off by default: the
    /// printed formulas are unnormalized and the downstream classifier
    /// absorbs feature scale.
    pub renormalize: bool,
}

impl Default for SmoothingSpec {
    fn default() -> Self {
        SmoothingSpec { kind: SmoothingKind::Avg, theta: 0.3, renormalize: false }
    }
}

impl SmoothingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.theta) {
            return Err(Error::invalid("theta", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Vertically stacks consecutive-snapshot pairs: X from the first T-1
/// embeddings, Z from the last T-1, so row k of X and Z is the same vertex
/// one snapshot apart.
pub fn stack_pairs(phis: &[EmbeddingMatrix]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if phis.len() < 2 {
        return Err(Error::TooFewSnapshots { found: phis.len(), need: 2 });
    }
    let (n, d) = (phis[0].rows(), phis[0].dim());
    for phi in phis {
        if !phi.same_shape(&phis[0]) {
            return Err(Error::ShapeMismatch {
                expected: format!("{n} x {d}"),
                found: format!("{} x {}", phi.rows(), phi.dim()),
            });
        }
    }
    let t = phis.len();
    let mut x = DMatrix::zeros(n * (t - 1), d);
    let mut z = DMatrix::zeros(n * (t - 1), d);
    for (k, pair) in phis.windows(2).enumerate() {
        x.view_mut((k * n, 0), (n, d)).copy_from(pair[0].matrix());
        z.view_mut((k * n, 0), (n, d)).copy_from(pair[1].matrix());
    }
    Ok((x, z))
}

/// ||x w - z||_F^2.
pub fn fit_objective(x: &DMatrix<f64>, w: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    (x * w - z).norm_squared()
}

/// Gradient of `fit_objective` in w: 2 x^T (x w - z).
pub fn fit_gradient(x: &DMatrix<f64>, w: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    2.0 * x.transpose() * (x * w - z)
}

/// Scales `g` down to `max_norm` (global Frobenius norm) when it exceeds
/// it; returns the pre-clip norm.
pub fn clip_global_norm(g: &mut DMatrix<f64>, max_norm: f64) -> f64 {
    let norm = g.norm();
    if norm > max_norm {
        *g *= max_norm / norm;
    }
    norm
}

fn run_gd(
    x: &DMatrix<f64>,
    z: &DMatrix<f64>,
    cfg: &GdConfig,
    mut trace: Option<&mut Vec<f64>>,
) -> TransformMatrix {
    let d = x.ncols();
    // the iteration touches only d x d products: gradient
    // 2 (X^T X W - X^T Z) and objective tr(W^T X^T X W) - 2 tr(W^T X^T Z) + ||Z||^2
    let xtx = x.transpose() * x;
    let xtz = x.transpose() * z;
    let z_norm2 = z.norm_squared();
    let objective = |w: &DMatrix<f64>| -> f64 {
        let xtxw = &xtx * w;
        (w.transpose() * &xtxw).trace() - 2.0 * (w.transpose() * &xtz).trace() + z_norm2
    };

    let mut w = DMatrix::identity(d, d);
    if let Some(t) = trace.as_deref_mut() {
        t.push(objective(&w));
    }
    for _ in 0..cfg.iterations {
        let mut g = 2.0 * (&xtx * &w - &xtz);
        clip_global_norm(&mut g, cfg.clip_ratio);
        w -= cfg.learning_rate * g;
        if let Some(t) = trace.as_deref_mut() {
            t.push(objective(&w));
        }
    }
    TransformMatrix { values: w }
}

/// Fits one shared map over all consecutive pairs: minimizes
/// ||X W - Z||_F^2 by full-batch clipped gradient descent from the
/// identity, running exactly cfg.iterations steps.
pub fn fit_homogeneous(phis: &[EmbeddingMatrix], cfg: &GdConfig) -> Result<TransformMatrix> {
    cfg.validate()?;
    let (x, z) = stack_pairs(phis)?;
    Ok(run_gd(&x, &z, cfg, None))
}

/// `fit_homogeneous` that also records the objective before the first step
/// and after every step.
pub fn fit_homogeneous_traced(
    phis: &[EmbeddingMatrix],
    cfg: &GdConfig,
) -> Result<(TransformMatrix, Vec<f64>)> {
    cfg.validate()?;
    let (x, z) = stack_pairs(phis)?;
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let w = run_gd(&x, &z, cfg, Some(&mut trace));
    Ok((w, trace))
}

/// Fits the map for one consecutive pair; identical routine to
/// `fit_homogeneous` on the two-element list.
pub fn fit_pairwise(
    phi_t: &EmbeddingMatrix,
    phi_next: &EmbeddingMatrix,
    cfg: &GdConfig,
) -> Result<TransformMatrix> {
    fit_homogeneous(&[phi_t.clone(), phi_next.clone()], cfg)
}

/// Per-pair maps W_t for t = 1..T-1 blended by the smoothing scheme.
pub fn fit_heterogeneous(
    phis: &[EmbeddingMatrix],
    cfg: &GdConfig,
    smoothing: &SmoothingSpec,
) -> Result<TransformMatrix> {
    smoothing.validate()?;
    if phis.len() < 2 {
        return Err(Error::TooFewSnapshots { found: phis.len(), need: 2 });
    }
    let mut ws = Vec::with_capacity(phis.len() - 1);
    for pair in phis.windows(2) {
        ws.push(fit_pairwise(&pair[0], &pair[1], cfg)?);
    }
    combine(&ws, smoothing)
}

/// Smoothing weight for the map of pair t (1-based) out of len.
fn smoothing_weight(kind: SmoothingKind, theta: f64, t: usize, len: usize) -> f64 {
    let tf = t as f64;
    let lf = len as f64;
    match kind {
        SmoothingKind::Avg => 1.0 / lf,
        SmoothingKind::Linear => tf / lf,
        SmoothingKind::Exp => (tf / lf).exp(),
        SmoothingKind::Wct => (1.0 - theta).powi((len - t) as i32),
    }
}

/// Weighted sum of per-pair maps; weights follow the selected scheme over
/// positions t = 1..len and are left unnormalized unless
/// `smoothing.renormalize` is set.
pub fn combine(ws: &[TransformMatrix], smoothing: &SmoothingSpec) -> Result<TransformMatrix> {
    smoothing.validate()?;
    if ws.is_empty() {
        return Err(Error::invalid("ws", "must be non-empty"));
    }
    let d = ws[0].dim();
    for w in ws {
        if w.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: w.dim() });
        }
    }
    let len = ws.len();
    let mut acc = DMatrix::zeros(d, d);
    let mut weight_sum = 0.0;
    for (i, w) in ws.iter().enumerate() {
        let weight = smoothing_weight(smoothing.kind, smoothing.theta, i + 1, len);
        weight_sum += weight;
        acc += weight * w.matrix();
    }
    if smoothing.renormalize {
        acc /= weight_sum;
    }
    TransformMatrix::from_matrix(acc)
}

/// Row-wise application phi * W: the predicted next-snapshot embedding.
pub fn project(phi: &EmbeddingMatrix, w: &TransformMatrix) -> Result<EmbeddingMatrix> {
    if phi.dim() != w.dim() {
        return Err(Error::DimMismatch { expected: phi.dim(), found: w.dim() });
    }
    EmbeddingMatrix::from_matrix(phi.matrix() * w.matrix())
}
