//! Linear SVM trained by deterministic full-batch subgradient descent on
//! the regularized hinge loss with the 1/(lambda t) step schedule.
//!
//! The bias is realized as an augmented constant feature (so it is lightly
//! regularized like the weights); `LinearSvm` still exposes it separately.
//! Inputs are expected standardized (zero mean / unit variance from
//! training statistics).

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct LinearSvm {
    pub weights: Tensor,
    pub bias: f64,
    pub lambda: f64,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights
            .data()
            .iter()
            .zip(x)
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + self.bias
    }
}

/// Mean hinge loss (1/n) sum max(0, 1 - y f(x)) over labelled rows.
pub fn hinge_loss(svm: &LinearSvm, rows: &[Vec<f64>], labels: &[u8]) -> f64 {
    let n = rows.len() as f64;
    rows.iter()
        .zip(labels)
        .map(|(x, &l)| {
            let y = if l == 1 { 1.0 } else { -1.0 };
            (1.0 - y * svm.decision(x)).max(0.0)
        })
        .sum::<f64>()
        / n
}

/// Trains on standardized rows. Full-batch updates make the result
/// independent of `seed`; the parameter is kept for interface stability
/// and future stochastic variants.
pub fn svm_train(
    rows: &[Vec<f64>],
    labels: &[u8],
    lambda: f64,
    epochs: usize,
    _seed: u64,
) -> Result<LinearSvm> {
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(Error::invalid(format!(
            "svm_train: {} rows vs {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid(format!("svm_train: lambda must be positive, got {lambda}")));
    }
    let n0 = labels.iter().filter(|&&l| l == 0).count();
    if n0 == 0 || n0 == labels.len() {
        return Err(Error::invalid(
            "svm_train requires both classes in the training data".to_string(),
        ));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::invalid("svm_train: ragged feature rows"));
    }

    // Augmented weight vector: dim features + constant-1 bias coordinate.
    let mut w = vec![0.0_f64; dim + 1];
    let inv_n = 1.0 / rows.len() as f64;
    for t in 1..=epochs {
        let eta = 1.0 / (lambda * t as f64);
        // Subgradient: lambda w - (1/n) sum_{margin violators} y x.
        let mut grad: Vec<f64> = w.iter().map(|v| lambda * v).collect();
        for (x, &l) in rows.iter().zip(labels) {
            let y = if l == 1 { 1.0 } else { -1.0 };
            let f: f64 = w[..dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[dim];
            if y * f < 1.0 {
                for (g, v) in grad[..dim].iter_mut().zip(x) {
                    *g -= inv_n * y * v;
                }
                grad[dim] -= inv_n * y;
            }
        }
        for (wv, g) in w.iter_mut().zip(&grad) {
            *wv -= eta * g;
        }
    }

    let bias = w[dim];
    w.truncate(dim);
    Ok(LinearSvm {
        weights: Tensor::from_vec(&[dim], w)?,
        bias,
        lambda,
    })
}

/// Predicted class: 1 when the decision value is strictly positive.
pub fn svm_predict(svm: &LinearSvm, x: &[f64]) -> u8 {
    u8::from(svm.decision(x) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_1d_reaches_perfect_training_accuracy() {
        let rows = vec![vec![-1.0], vec![1.0]];
        let labels = vec![0u8, 1u8];
        let svm = svm_train(&rows, &labels, 1e-2, 200, 0).unwrap();
        assert_eq!(svm_predict(&svm, &rows[0]), 0);
        assert_eq!(svm_predict(&svm, &rows[1]), 1);
    }

    #[test]
    fn training_is_seed_independent_and_deterministic() {
        let rows = vec![vec![-1.0, 0.3], vec![1.0, -0.2], vec![-0.8, 0.1], vec![0.9, 0.4]];
        let labels = vec![0, 1, 0, 1];
        let a = svm_train(&rows, &labels, 1e-2, 300, 1).unwrap();
        let b = svm_train(&rows, &labels, 1e-2, 300, 999).unwrap();
        assert_eq!(a.weights.data(), b.weights.data());
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn seeded_separable_set_reaches_zero_hinge_within_500_epochs() {
        // 20 points in 2-D with margin 1 around the separator x0 = 0.
        let mut rng = crate::rng::RngStream::new(13);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for k in 0..20 {
            let label = (k % 2) as u8;
            let sign = if label == 1 { 1.0 } else { -1.0 };
            rows.push(vec![sign * (2.0 + rng.uniform()), rng.normal()]);
            labels.push(label);
        }
        let svm = svm_train(&rows, &labels, 1e-3, 500, 7).unwrap();
        let loss = hinge_loss(&svm, &rows, &labels);
        assert!(loss < 1e-9, "hinge loss {loss}");
    }

    #[test]
    fn prediction_invariant_under_positive_scaling() {
        let svm = LinearSvm {
            weights: Tensor::from_vec(&[2], vec![0.5, -1.0]).unwrap(),
            bias: 0.25,
            lambda: 0.1,
        };
        let mut scaled = svm.clone();
        scaled.weights.scale(7.0);
        scaled.bias *= 7.0;
        for x in [[0.1, 0.2], [-1.0, 0.5], [2.0, -0.3], [0.0, 0.0]] {
            assert_eq!(svm_predict(&svm, &x), svm_predict(&scaled, &x));
        }
    }

    #[test]
    fn single_class_rejected() {
        let rows = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            svm_train(&rows, &[1, 1], 0.1, 10, 0),
            Err(Error::InvalidArgument(_))
        ));
    }
}
