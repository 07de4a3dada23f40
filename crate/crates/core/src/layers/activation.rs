//! Pointwise nonlinearities and the stable softmax.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// ELU with alpha = 1: x if x > 0 else exp(x) - 1.
pub fn elu(x: &Tensor) -> Tensor {
    let mut y = x.clone();
    for v in y.data_mut() {
        if *v <= 0.0 {
            *v = v.exp_m1();
        }
    }
    y
}

/// ELU gradient from the forward *output*: 1 where y > 0, else y + alpha.
pub fn elu_backward(y: &Tensor, dy: &Tensor) -> Tensor {
    let mut dx = dy.clone();
    for (d, &yv) in dx.data_mut().iter_mut().zip(y.data()) {
        if yv <= 0.0 {
            *d *= yv + 1.0;
        }
    }
    dx
}

pub fn tanh_map(x: &Tensor) -> Tensor {
    let mut y = x.clone();
    for v in y.data_mut() {
        *v = v.tanh();
    }
    y
}

/// Tanh gradient from the forward output: 1 - y^2.
pub fn tanh_backward(y: &Tensor, dy: &Tensor) -> Tensor {
    let mut dx = dy.clone();
    for (d, &yv) in dx.data_mut().iter_mut().zip(y.data()) {
        *d *= 1.0 - yv * yv;
    }
    dx
}

/// Numerically stable logistic sigmoid.
pub fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Exp-normalized probabilities with max subtraction. Output sums to one.
pub fn softmax(v: &Tensor) -> Result<Tensor> {
    if v.shape().len() != 1 || v.len() < 2 {
        return Err(Error::invalid(format!(
            "softmax expects a vector of at least 2 entries, got shape {:?}",
            v.shape()
        )));
    }
    let max = v.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut y = v.clone();
    let mut sum = 0.0;
    for e in y.data_mut() {
        *e = (*e - max).exp();
        sum += *e;
    }
    for e in y.data_mut() {
        *e /= sum;
    }
    Ok(y)
}

/// Jacobian-vector product of softmax at output `p`:
/// dx = p .* (dy - dot(dy, p)).
pub fn softmax_backward(p: &Tensor, dy: &Tensor) -> Tensor {
    let dot: f64 = p.data().iter().zip(dy.data()).map(|(a, b)| a * b).sum();
    let mut dx = Tensor::zeros(p.shape());
    for ((d, &pv), &g) in dx.data_mut().iter_mut().zip(p.data()).zip(dy.data()) {
        *d = pv * (g - dot);
    }
    dx
}
