//! Adam optimizer, applied per parameter.

use crate::error::{Error, Result};
use crate::param::Parameter;

/// Adam hyper-parameters. Defaults: beta1 0.9, beta2 0.999, eps 1e-8.
#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> AdamConfig {
        AdamConfig {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One Adam update with bias correction:
///   m <- b1*m + (1-b1)*g
///   v <- b2*v + (1-b2)*g^2
///   value <- value - lr * m_hat / (sqrt(v_hat) + eps)
///
/// Increments the parameter's step count. The caller zeroes the gradient
/// afterwards (gradients are accumulators across a batch).
pub fn adam_step(p: &mut Parameter, lr: f64) -> Result<()> {
    adam_step_with(p, &AdamConfig::with_lr(lr))
}

pub fn adam_step_with(p: &mut Parameter, cfg: &AdamConfig) -> Result<()> {
    if !p.grad.all_finite() {
        return Err(Error::numeric(format!(
            "non-finite gradient for parameter \"{}\"",
            p.name()
        )));
    }
    p.step_count += 1;
    let t = p.step_count as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for (((value, g), m), v) in p
        .value
        .data_mut()
        .iter_mut()
        .zip(p.grad.data().iter())
        .zip(p.adam_m.data_mut().iter_mut())
        .zip(p.adam_v.data_mut().iter_mut())
    {
        *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
        *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *value -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    fn scalar_param(value: f64, grad: f64) -> Parameter {
        let mut p = Parameter::new("theta", Tensor::scalar(value));
        p.grad_mut().data_mut()[0] = grad;
        p
    }

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        // With bias correction, step 1 reduces to lr * g / (|g| + eps').
        let mut p = scalar_param(1.0, 2.0);
        adam_step(&mut p, 0.001).unwrap();
        let expected = 1.0 - 0.001 * (2.0 / (2.0 + 1e-8));
        assert!((p.value().data()[0] - expected).abs() < 1e-12);
        assert_eq!(p.step_count(), 1);
    }

    #[test]
    fn zero_gradient_leaves_value_unchanged() {
        let mut p = scalar_param(0.7, 0.0);
        adam_step(&mut p, 0.01).unwrap();
        assert_eq!(p.value().data()[0], 0.7);
        assert_eq!(p.step_count(), 1);
    }

    #[test]
    fn nonfinite_gradient_names_parameter() {
        let mut p = scalar_param(1.0, f64::NAN);
        let err = adam_step(&mut p, 0.01).unwrap_err();
        assert!(err.to_string().contains("theta"), "{err}");
    }

    #[test]
    fn shapes_unchanged_by_step() {
        let mut p = Parameter::zeros("w", &[2, 3]);
        p.grad_mut().fill(0.5);
        adam_step(&mut p, 0.05).unwrap();
        assert_eq!(p.value().shape(), &[2, 3]);
        assert_eq!(p.adam_m().shape(), &[2, 3]);
        assert_eq!(p.adam_v().shape(), &[2, 3]);
    }

    #[test]
    fn quadratic_converges_and_matches_scalar_recursion() {
        // Independent scalar recursion as the oracle for 200 steps on
        // f(theta) = theta^2 from theta = 1 with lr 0.05.
        let (beta1, beta2, eps, lr) = (0.9, 0.999, 1e-8, 0.05);
        let (mut theta, mut m, mut v) = (1.0_f64, 0.0_f64, 0.0_f64);
        let mut oracle = Vec::new();
        for t in 1..=200 {
            let g = 2.0 * theta;
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g * g;
            let m_hat = m / (1.0 - beta1.powi(t));
            let v_hat = v / (1.0 - beta2.powi(t));
            theta -= lr * m_hat / (v_hat.sqrt() + eps);
            oracle.push(theta);
        }
        assert!(theta.abs() < 0.05, "oracle recursion ended at {theta}");

        let mut p = scalar_param(1.0, 0.0);
        for step in 0..200 {
            let g = 2.0 * p.value().data()[0];
            p.grad_mut().data_mut()[0] = g;
            adam_step(&mut p, lr).unwrap();
            p.zero_grad();
            assert!(
                (p.value().data()[0] - oracle[step]).abs() < 1e-12,
                "diverged from oracle at step {step}"
            );
        }
    }
}
