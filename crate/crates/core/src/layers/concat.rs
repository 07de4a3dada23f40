//! Channel concatenation for skip connections.

use crate::error::{Error, Result};
use crate::layers::conv::chw;
use crate::tensor::Tensor;

/// Stacks `a`'s channels first, then `b`'s. Spatial extents must match.
pub fn concat_channels(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    let (ca, ha, wa) = chw(a)?;
    let (cb, hb, wb) = chw(b)?;
    if (ha, wa) != (hb, wb) {
        return Err(Error::shape(format!(
            "concat_channels spatial mismatch: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mut data = Vec::with_capacity(a.len() + b.len());
    data.extend_from_slice(a.data());
    data.extend_from_slice(b.data());
    Tensor::from_vec(&[ca + cb, ha, wa], data)
}

/// Splits a channel-concatenated gradient back into the two input shapes.
pub fn split_channels(dy: &Tensor, c_first: usize) -> Result<(Tensor, Tensor)> {
    let (c, h, w) = chw(dy)?;
    if c_first == 0 || c_first >= c {
        return Err(Error::shape(format!(
            "split_channels: cannot split {c} channels at {c_first}"
        )));
    }
    let cut = c_first * h * w;
    let first = Tensor::from_vec(&[c_first, h, w], dy.data()[..cut].to_vec())?;
    let second = Tensor::from_vec(&[c - c_first, h, w], dy.data()[cut..].to_vec())?;
    Ok((first, second))
}
