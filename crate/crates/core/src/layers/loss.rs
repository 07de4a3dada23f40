//! Training losses: mean squared error over frame sequences and binary
//! cross-entropy over class posteriors.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Probabilities are clamped at this floor before taking logs.
pub const BCE_CLAMP: f64 = 1e-12;

/// Mean of squared element differences over all frames and elements.
pub fn mse_loss(pred: &[Tensor], target: &[Tensor]) -> Result<f64> {
    check_pairs(pred, target)?;
    let n: usize = pred.iter().map(Tensor::len).sum();
    let mut acc = 0.0;
    for (p, t) in pred.iter().zip(target) {
        for (a, b) in p.data().iter().zip(t.data()) {
            let d = a - b;
            acc += d * d;
        }
    }
    Ok(acc / n as f64)
}

/// Gradient of [`mse_loss`] w.r.t. the predictions: 2 (pred - target) / N,
/// N the total element count over all frames.
pub fn mse_loss_backward(pred: &[Tensor], target: &[Tensor]) -> Result<Vec<Tensor>> {
    check_pairs(pred, target)?;
    let n: usize = pred.iter().map(Tensor::len).sum();
    let scale = 2.0 / n as f64;
    let mut grads = Vec::with_capacity(pred.len());
    for (p, t) in pred.iter().zip(target) {
        let mut g = p.clone();
        for (gv, tv) in g.data_mut().iter_mut().zip(t.data()) {
            *gv = scale * (*gv - tv);
        }
        grads.push(g);
    }
    Ok(grads)
}

fn check_pairs(pred: &[Tensor], target: &[Tensor]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(Error::shape(format!(
            "mse_loss: {} predicted frames vs {} target frames",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::shape("mse_loss: empty sequences"));
    }
    for (k, (p, t)) in pred.iter().zip(target).enumerate() {
        if !p.same_shape(t) {
            return Err(Error::shape(format!(
                "mse_loss frame {k}: {:?} vs {:?}",
                p.shape(),
                t.shape()
            )));
        }
    }
    Ok(())
}

/// Negative log-likelihood of the labelled class: -log p[label], with p
/// clamped at [`BCE_CLAMP`] so the loss stays finite.
pub fn bce_loss(posterior: &Tensor, label: usize) -> Result<f64> {
    if posterior.shape() != [2] {
        return Err(Error::shape(format!(
            "bce_loss expects a 2-class posterior, got shape {:?}",
            posterior.shape()
        )));
    }
    if label > 1 {
        return Err(Error::invalid(format!(
            "bce_loss label must be 0 or 1, got {label}"
        )));
    }
    Ok(-posterior.data()[label].max(BCE_CLAMP).ln())
}

/// Gradient of [`bce_loss`] w.r.t. the posterior. Zero where the clamp is
/// active (the loss is constant there).
pub fn bce_loss_backward(posterior: &Tensor, label: usize) -> Result<Tensor> {
    bce_loss(posterior, label)?; // validates
    let mut g = Tensor::zeros(&[2]);
    let p = posterior.data()[label];
    if p > BCE_CLAMP {
        g.data_mut()[label] = -1.0 / p;
    }
    Ok(g)
}
