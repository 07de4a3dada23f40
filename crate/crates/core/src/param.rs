//! Trainable parameters: a value tensor paired with its gradient accumulator
//! and Adam moment estimates.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tensor::Tensor;

/// Gaussian-initialized tensor: independent zero-mean normal draws.
pub fn gaussian_init(shape: &[usize], std: f64, rng: &mut RngStream) -> Result<Tensor> {
    if !(std > 0.0) {
        return Err(Error::invalid(format!(
            "gaussian_init std must be positive, got {std}"
        )));
    }
    if shape.is_empty() || shape.iter().any(|&e| e == 0) {
        return Err(Error::invalid(format!(
            "gaussian_init shape must be non-empty with positive extents, got {shape:?}"
        )));
    }
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        *v = std * rng.normal();
    }
    Ok(t)
}

/// A trainable tensor. `value`, `grad`, `adam_m` and `adam_v` always share
/// one shape; `step_count` counts optimizer steps applied to this parameter.
///
/// Gradients accumulate across a batch; the training loop zeroes them after
/// each optimizer step.
#[derive(Debug, Clone)]
pub struct Parameter {
    name: String,
    pub(crate) value: Tensor,
    pub(crate) grad: Tensor,
    pub(crate) adam_m: Tensor,
    pub(crate) adam_v: Tensor,
    pub(crate) step_count: u64,
}

impl Parameter {
    pub fn new(name: impl Into<String>, value: Tensor) -> Parameter {
        let shape = value.shape().to_vec();
        Parameter {
            name: name.into(),
            value,
            grad: Tensor::zeros(&shape),
            adam_m: Tensor::zeros(&shape),
            adam_v: Tensor::zeros(&shape),
            step_count: 0,
        }
    }

    /// Weight parameter drawn from N(0, std^2).
    pub fn gaussian(
        name: impl Into<String>,
        shape: &[usize],
        std: f64,
        rng: &mut RngStream,
    ) -> Result<Parameter> {
        Ok(Parameter::new(name, gaussian_init(shape, std, rng)?))
    }

    pub fn zeros(name: impl Into<String>, shape: &[usize]) -> Parameter {
        Parameter::new(name, Tensor::zeros(shape))
    }

    pub fn constant(name: impl Into<String>, shape: &[usize], v: f64) -> Parameter {
        Parameter::new(name, Tensor::filled(shape, v))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> &Tensor {
        &self.value
    }

    pub fn value_mut(&mut self) -> &mut Tensor {
        &mut self.value
    }

    pub fn grad(&self) -> &Tensor {
        &self.grad
    }

    pub fn grad_mut(&mut self) -> &mut Tensor {
        &mut self.grad
    }

    /// Split borrow: read the value while accumulating into the gradient.
    pub fn value_and_grad_mut(&mut self) -> (&Tensor, &mut Tensor) {
        (&self.value, &mut self.grad)
    }

    pub fn adam_m(&self) -> &Tensor {
        &self.adam_m
    }

    pub fn adam_v(&self) -> &Tensor {
        &self.adam_v
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn zero_grad(&mut self) {
        self.grad.zero();
    }

    /// Add another parameter's accumulated gradient into this one
    /// (used to merge per-worker gradients after a parallel batch).
    pub fn absorb_grad(&mut self, other: &Parameter) -> Result<()> {
        self.grad.add_assign(&other.grad)
    }
}
