//! The recurrent residual encoder-decoder and its two training phases:
//! unsupervised sequence-prediction pre-training and supervised fine-tuning
//! of the contracting path plus classifier.

pub mod blocks;
pub mod net;
pub mod train;

pub use blocks::{ResCLSTMBlock, ResDBlock, ResUBlock};
pub use net::{
    model_inputs, ParamScope, ResidualDNet, StepCache, FRAME_SIDE, INPUT_STEPS, SEQ_LEN,
    Z_LAST_LEN, Z_LAST_SHAPE,
};
pub use train::{finetune, pretrain, FinetuneReport, TrainSettings};
