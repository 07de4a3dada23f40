//! Finite-difference gradient oracle.
//!
//! Every differentiable operation in the network is verified against this
//! estimator; it therefore must stay independent of any backward-pass code.

use crate::error::Result;
use crate::tensor::Tensor;

pub const DEFAULT_STEP: f64 = 1e-5;

/// Central-difference gradient of a scalar function of a tensor:
/// (f(x + h*e_i) - f(x - h*e_i)) / (2h) per element.
pub fn finite_diff_gradient<F>(mut f: F, x: &Tensor, h: f64) -> Result<Tensor>
where
    F: FnMut(&Tensor) -> Result<f64>,
{
    let mut grad = Tensor::zeros(x.shape());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let orig = probe.data()[i];
        probe.data_mut()[i] = orig + h;
        let plus = f(&probe)?;
        probe.data_mut()[i] = orig - h;
        let minus = f(&probe)?;
        probe.data_mut()[i] = orig;
        grad.data_mut()[i] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

/// Relative error |a - b| / max(1e-8, |a| + |b|).
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1e-8_f64).max(a.abs() + b.abs())
}

/// Largest element-wise relative error between two same-shaped tensors.
pub fn max_relative_error(a: &Tensor, b: &Tensor) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_relative_error shape mismatch");
    a.data()
        .iter()
        .zip(b.data().iter())
        .map(|(&x, &y)| relative_error(x, y))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_sum_is_ones() {
        let x = Tensor::from_vec(&[2, 2], vec![0.3, -1.2, 4.0, 0.0]).unwrap();
        let g = finite_diff_gradient(|t| Ok(t.sum()), &x, DEFAULT_STEP).unwrap();
        for v in g.data() {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_of_sum_of_squares() {
        let x = Tensor::from_vec(&[2], vec![1.0, 2.0]).unwrap();
        let g = finite_diff_gradient(
            |t| Ok(t.data().iter().map(|v| v * v).sum()),
            &x,
            DEFAULT_STEP,
        )
        .unwrap();
        assert!((g.data()[0] - 2.0).abs() < 1e-6);
        assert!((g.data()[1] - 4.0).abs() < 1e-6);
    }

    #[test]
    fn evaluation_failure_propagates() {
        let x = Tensor::scalar(1.0);
        let r = finite_diff_gradient(
            |_| Err(crate::error::Error::numeric("boom")),
            &x,
            DEFAULT_STEP,
        );
        assert!(r.is_err());
    }

    #[test]
    fn relative_error_uses_spec_denominator() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        // Tiny absolute difference near zero is measured against 1e-8.
        assert!(relative_error(1e-12, 0.0) < 1e-3);
    }
}
