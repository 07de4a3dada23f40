//! Differentiable primitives the network is assembled from. Each layer
//! exposes a forward pass and a layer-local backward pass; the network
//! composes them explicitly (no general computation graph).

pub mod activation;
pub mod concat;
pub mod conv;
pub mod convlstm;
pub mod loss;
pub mod pool;
pub mod upconv;

pub use activation::{elu, elu_backward, sigmoid_scalar, softmax, softmax_backward, tanh_backward, tanh_map};
pub use concat::{concat_channels, split_channels};
pub use conv::{Conv1x1, Conv2D};
pub use convlstm::{ConvLSTMCell, ConvLstmCache, LstmCarry};
pub use loss::{bce_loss, bce_loss_backward, mse_loss, mse_loss_backward, BCE_CLAMP};
pub use pool::{avgpool2, avgpool2_backward};
pub use upconv::UpConv2;
