//! Learning dynamic functional-connectivity sequences from ROI time series.
//!
//! The pipeline: tapered-window correlation extraction ([`dfc`]), a recurrent
//! residual encoder-decoder trained unsupervised by sequence prediction and
//! fine-tuned for classification ([`dnet`]), linear-SVM baselines
//! ([`baselines`]), a seeded synthetic cohort ([`synthgen`]), and a
//! subject-wise cross-validation harness ([`harness`]). All numerics are
//! f64 on hand-rolled dense tensors with layer-local backward passes,
//! verified against a finite-difference oracle ([`gradcheck`]).

pub mod baselines;
pub mod dfc;
pub mod dnet;
pub mod error;
pub mod gradcheck;
pub mod harness;
pub mod layers;
pub mod optim;
pub mod param;
pub mod rng;
pub mod synthgen;
pub mod tensor;

pub use error::{Error, Result};
pub use param::{gaussian_init, Parameter};
pub use rng::RngStream;
pub use tensor::Tensor;
