//! Binary logistic regression trained by full-batch gradient descent.
//! The objective is mean cross-entropy plus (l2/2)||w||^2 with the bias
//! left unregularized.

use nalgebra::{DMatrix, DVector};

use crate::embed::sgns::sigmoid;
use crate::error::{Error, Result};
use crate::transform::GdConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub weights: DVector<f64>,
    pub bias: f64,
    pub l2_strength: f64,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() }
}

fn check_design(features: &DMatrix<f64>, labels: &[bool]) -> Result<()> {
    if features.nrows() != labels.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} labels", features.nrows()),
            found: format!("{}", labels.len()),
        });
    }
    Ok(())
}

/// Mean cross-entropy plus the ridge term, evaluated through
/// softplus(z) - y*z so large margins cannot overflow.
pub fn logreg_loss(
    features: &DMatrix<f64>,
    labels: &[bool],
    weights: &DVector<f64>,
    bias: f64,
    l2: f64,
) -> f64 {
    let z = features * weights;
    let mut total = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        let zi = z[i] + bias;
        total += softplus(zi) - if label { zi } else { 0.0 };
    }
    total / labels.len() as f64 + 0.5 * l2 * weights.norm_squared()
}

/// Gradient of `logreg_loss` in (weights, bias).
pub fn logreg_gradient(
    features: &DMatrix<f64>,
    labels: &[bool],
    weights: &DVector<f64>,
    bias: f64,
    l2: f64,
) -> (DVector<f64>, f64) {
    let m = labels.len() as f64;
    let mut residual = features * weights;
    for (i, &label) in labels.iter().enumerate() {
        residual[i] = sigmoid(residual[i] + bias) - if label { 1.0 } else { 0.0 };
    }
    let grad_w = features.transpose() * &residual / m + l2 * weights;
    let grad_b = residual.sum() / m;
    (grad_w, grad_b)
}

/// Fits from zero init, stepping with a fixed rate set from the logistic
/// curvature bound 1/(mean ||x||^2 / 4 + l2); `gd.learning_rate` and
/// `gd.clip_ratio` are not consulted, `gd.iterations` caps the loop.
/// Stops early once the gradient max-norm falls below 1e-6.
pub fn logreg_fit(
    features: &DMatrix<f64>,
    labels: &[bool],
    l2: f64,
    gd: &GdConfig,
) -> Result<LogRegModel> {
    let (model, _) = fit_inner(features, labels, l2, gd, false)?;
    Ok(model)
}

/// `logreg_fit` also returning the loss before any step and after each
/// step taken.
pub fn logreg_fit_traced(
    features: &DMatrix<f64>,
    labels: &[bool],
    l2: f64,
    gd: &GdConfig,
) -> Result<(LogRegModel, Vec<f64>)> {
    fit_inner(features, labels, l2, gd, true)
}

const GRAD_TOLERANCE: f64 = 1e-6;

fn fit_inner(
    features: &DMatrix<f64>,
    labels: &[bool],
    l2: f64,
    gd: &GdConfig,
    traced: bool,
) -> Result<(LogRegModel, Vec<f64>)> {
    check_design(features, labels)?;
    gd.validate()?;
    if !(l2 >= 0.0) {
        return Err(Error::invalid("l2", "must be non-negative"));
    }
    if labels.is_empty() {
        return Err(Error::SingleClass);
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 || n_pos == labels.len() {
        return Err(Error::SingleClass);
    }

    let mean_sq = features.norm_squared() / labels.len() as f64;
    let rate = 1.0 / (mean_sq / 4.0 + l2).max(1e-12);

    let mut weights = DVector::zeros(features.ncols());
    let mut bias = 0.0;
    let mut losses = Vec::new();
    if traced {
        losses.push(logreg_loss(features, labels, &weights, bias, l2));
    }
    for _ in 0..gd.iterations {
        let (gw, gb) = logreg_gradient(features, labels, &weights, bias, l2);
        if gw.amax().max(gb.abs()) < GRAD_TOLERANCE {
            break;
        }
        weights -= rate * gw;
        bias -= rate * gb;
        if traced {
            losses.push(logreg_loss(features, labels, &weights, bias, l2));
        }
    }
    Ok((LogRegModel { weights, bias, l2_strength: l2 }, losses))
}

/// sigmoid(features . weights + bias) per row.
pub fn logreg_score(model: &LogRegModel, features: &DMatrix<f64>) -> Result<Vec<f64>> {
    if features.ncols() != model.weights.len() {
        return Err(Error::DimMismatch {
            expected: model.weights.len(),
            found: features.ncols(),
        });
    }
    let z = features * &model.weights;
    Ok(z.iter().map(|&zi| sigmoid(zi + model.bias)).collect())
}
