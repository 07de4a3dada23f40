//! The three residual building blocks:
//!
//! * down block: out = avgpool2(F_d(x) + shortcut(x)), F_d two 3x3 convs
//!   with ELU, shortcut identity (or a 1x1 projection when channel counts
//!   change); spatial extents halve.
//! * up block: out = F_u([up(x); skip]) + up(x), up a 2x2 stride-2
//!   transposed conv; spatial extents double.
//! * recurrent block: two stacked convolutional LSTM layers with an identity
//!   bypass, out = h^(2) + x; shapes unchanged.

use crate::error::{Error, Result};
use crate::layers::{
    avgpool2, avgpool2_backward, concat_channels, elu, elu_backward, split_channels, Conv1x1,
    Conv2D, ConvLSTMCell, ConvLstmCache, LstmCarry, UpConv2,
};
use crate::param::Parameter;
use crate::rng::RngStream;
use crate::tensor::Tensor;

// ---------------------------------------------------------------------------
// Down-sampling residual block

#[derive(Debug, Clone)]
pub struct ResDBlock {
    conv1: Conv2D,
    conv2: Conv2D,
    shortcut: Option<Conv1x1>, // None: identity (c_in == c_out)
}

/// Forward activations a down block needs for its backward pass.
#[derive(Debug, Clone)]
pub struct ResDCache {
    x: Tensor,
    a1: Tensor,
    a2: Tensor,
}

impl ResDBlock {
    pub fn new(name: &str, c_in: usize, c_out: usize, rng: &mut RngStream) -> Result<ResDBlock> {
        let shortcut = if c_in == c_out {
            None
        } else {
            Some(Conv1x1::new(&format!("{name}.shortcut"), c_in, c_out, rng)?)
        };
        Ok(ResDBlock {
            conv1: Conv2D::new(&format!("{name}.conv1"), c_in, c_out, rng)?,
            conv2: Conv2D::new(&format!("{name}.conv2"), c_out, c_out, rng)?,
            shortcut,
        })
    }

    pub fn params(&self) -> Vec<&Parameter> {
        let mut ps = self.conv1.params();
        ps.extend(self.conv2.params());
        if let Some(sc) = &self.shortcut {
            ps.extend(sc.params());
        }
        ps
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut ps = self.conv1.params_mut();
        ps.extend(self.conv2.params_mut());
        if let Some(sc) = &mut self.shortcut {
            ps.extend(sc.params_mut());
        }
        ps
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_cached(x)?.0)
    }

    pub fn forward_cached(&self, x: &Tensor) -> Result<(Tensor, ResDCache)> {
        let a1 = elu(&self.conv1.forward(x)?);
        let a2 = elu(&self.conv2.forward(&a1)?);
        let mut sum = a2.clone();
        match &self.shortcut {
            Some(sc) => sum.add_assign(&sc.forward(x)?)?,
            None => sum.add_assign(x)?,
        }
        let y = avgpool2(&sum)?;
        Ok((
            y,
            ResDCache {
                x: x.clone(),
                a1,
                a2,
            },
        ))
    }

    pub fn backward(&mut self, cache: &ResDCache, d_out: &Tensor) -> Result<Tensor> {
        let d_sum = avgpool2_backward(d_out, cache.a2.shape())?;
        let d_pre2 = elu_backward(&cache.a2, &d_sum);
        let d_a1 = self.conv2.backward(&cache.a1, &d_pre2)?;
        let d_pre1 = elu_backward(&cache.a1, &d_a1);
        let mut d_x = self.conv1.backward(&cache.x, &d_pre1)?;
        match &mut self.shortcut {
            Some(sc) => d_x.add_assign(&sc.backward(&cache.x, &d_sum)?)?,
            None => d_x.add_assign(&d_sum)?,
        }
        Ok(d_x)
    }
}

// ---------------------------------------------------------------------------
// Up-sampling residual block

#[derive(Debug, Clone)]
pub struct ResUBlock {
    up: UpConv2,
    conv1: Conv2D, // (c_out + c_skip) -> c_out
    conv2: Conv2D, // c_out -> c_out
    c_out: usize,
    c_skip: usize, // 0: no skip input
}

#[derive(Debug, Clone)]
pub struct ResUCache {
    x: Tensor,
    cat: Tensor, // the up-convolved input, concatenated with the skip if any
    b1: Tensor,
    b2: Tensor,
}

impl ResUBlock {
    pub fn new(
        name: &str,
        c_in: usize,
        c_out: usize,
        c_skip: usize,
        rng: &mut RngStream,
    ) -> Result<ResUBlock> {
        Ok(ResUBlock {
            up: UpConv2::new(&format!("{name}.up"), c_in, c_out, rng)?,
            conv1: Conv2D::new(&format!("{name}.conv1"), c_out + c_skip, c_out, rng)?,
            conv2: Conv2D::new(&format!("{name}.conv2"), c_out, c_out, rng)?,
            c_out,
            c_skip,
        })
    }

    pub fn params(&self) -> Vec<&Parameter> {
        let mut ps = self.up.params();
        ps.extend(self.conv1.params());
        ps.extend(self.conv2.params());
        ps
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut ps = self.up.params_mut();
        ps.extend(self.conv1.params_mut());
        ps.extend(self.conv2.params_mut());
        ps
    }

    pub fn forward(&self, x: &Tensor, skip: Option<&Tensor>) -> Result<Tensor> {
        Ok(self.forward_cached(x, skip)?.0)
    }

    pub fn forward_cached(&self, x: &Tensor, skip: Option<&Tensor>) -> Result<(Tensor, ResUCache)> {
        match (self.c_skip, skip) {
            (0, None) => {}
            (c, Some(z)) if z.shape().first() == Some(&c) => {}
            _ => {
                return Err(Error::shape(format!(
                    "up block expects skip channels {}, got {:?}",
                    self.c_skip,
                    skip.map(|z| z.shape().to_vec())
                )))
            }
        }
        let y_up = self.up.forward(x)?;
        let cat = match skip {
            Some(z) => concat_channels(&y_up, z)?,
            None => y_up.clone(),
        };
        let b1 = elu(&self.conv1.forward(&cat)?);
        let b2 = elu(&self.conv2.forward(&b1)?);
        let mut y = b2.clone();
        y.add_assign(&y_up)?;
        Ok((
            y,
            ResUCache {
                x: x.clone(),
                cat,
                b1,
                b2,
            },
        ))
    }

    /// Returns the input gradient and, when the block has a skip input, the
    /// gradient flowing back through that skip connection.
    pub fn backward(&mut self, cache: &ResUCache, d_out: &Tensor) -> Result<(Tensor, Option<Tensor>)> {
        let d_pre2 = elu_backward(&cache.b2, d_out);
        let d_b1 = self.conv2.backward(&cache.b1, &d_pre2)?;
        let d_pre1 = elu_backward(&cache.b1, &d_b1);
        let d_cat = self.conv1.backward(&cache.cat, &d_pre1)?;
        let (mut d_yup, d_skip) = if self.c_skip > 0 {
            let (a, b) = split_channels(&d_cat, self.c_out)?;
            (a, Some(b))
        } else {
            (d_cat, None)
        };
        d_yup.add_assign(d_out)?; // residual bypass around F_u
        let d_x = self.up.backward(&cache.x, &d_yup)?;
        Ok((d_x, d_skip))
    }
}

// ---------------------------------------------------------------------------
// Residual convolutional LSTM block

#[derive(Debug, Clone)]
pub struct ResCLSTMBlock {
    cell1: ConvLSTMCell,
    cell2: ConvLSTMCell,
}

#[derive(Debug, Clone)]
pub struct ResClstmCache {
    c1: ConvLstmCache,
    c2: ConvLstmCache,
}

/// Recurrent gradient carry for both stacked cells.
#[derive(Debug, Clone)]
pub struct ClstmBlockCarry {
    c1: LstmCarry,
    c2: LstmCarry,
}

impl ResCLSTMBlock {
    pub fn new(
        name: &str,
        channels: usize,
        height: usize,
        width: usize,
        rng: &mut RngStream,
    ) -> Result<ResCLSTMBlock> {
        Ok(ResCLSTMBlock {
            cell1: ConvLSTMCell::new(&format!("{name}.cell1"), channels, channels, height, width, rng)?,
            cell2: ConvLSTMCell::new(&format!("{name}.cell2"), channels, channels, height, width, rng)?,
        })
    }

    pub fn params(&self) -> Vec<&Parameter> {
        let mut ps = self.cell1.params();
        ps.extend(self.cell2.params());
        ps
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut ps = self.cell1.params_mut();
        ps.extend(self.cell2.params_mut());
        ps
    }

    pub fn reset(&mut self) {
        self.cell1.reset();
        self.cell2.reset();
    }

    pub fn carry(&self) -> ClstmBlockCarry {
        let shape = self.cell1.hidden().shape();
        ClstmBlockCarry {
            c1: LstmCarry::zeros(shape[0], shape[1], shape[2]),
            c2: LstmCarry::zeros(shape[0], shape[1], shape[2]),
        }
    }

    pub fn step(&mut self, x: &Tensor) -> Result<Tensor> {
        let h1 = self.cell1.step(x)?;
        let h2 = self.cell2.step(&h1)?;
        let mut y = h2;
        y.add_assign(x)?;
        Ok(y)
    }

    pub fn step_cached(&mut self, x: &Tensor) -> Result<(Tensor, ResClstmCache)> {
        let (h1, c1) = self.cell1.step_cached(x)?;
        let (h2, c2) = self.cell2.step_cached(&h1)?;
        let mut y = h2;
        y.add_assign(x)?;
        Ok((y, ResClstmCache { c1, c2 }))
    }

    /// One reverse time step; `carry` is replaced with the carry for t - 1.
    pub fn backward_step(
        &mut self,
        cache: &ResClstmCache,
        d_out: &Tensor,
        carry: &mut ClstmBlockCarry,
    ) -> Result<Tensor> {
        let taken = std::mem::replace(carry, self.carry());
        let (d_h1, carry2) = self.cell2.backward_step(&cache.c2, d_out, taken.c2)?;
        let (mut d_x, carry1) = self.cell1.backward_step(&cache.c1, &d_h1, taken.c1)?;
        d_x.add_assign(d_out)?; // identity bypass
        *carry = ClstmBlockCarry {
            c1: carry1,
            c2: carry2,
        };
        Ok(d_x)
    }
}

/// The contracting-path caches of one time step, shared by the prediction
/// and classification backward passes.
#[derive(Debug, Clone)]
pub struct ContractingStepCache {
    pub(crate) d1: ResDCache,
    pub(crate) l1: ResClstmCache,
    pub(crate) d2: ResDCache,
    pub(crate) l2: ResClstmCache,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::gaussian_init;

    #[test]
    fn down_block_halves_extents() {
        let mut rng = RngStream::new(0);
        let block = ResDBlock::new("d", 1, 16, &mut rng).unwrap();
        let x = gaussian_init(&[1, 28, 28], 1.0, &mut rng).unwrap();
        let y = block.forward(&x).unwrap();
        assert_eq!(y.shape(), &[16, 14, 14]);
    }

    #[test]
    fn down_block_with_zero_residual_unit_is_avgpool() {
        // F_d forced to zero and identity shortcut: out = avgpool2(x).
        let mut rng = RngStream::new(1);
        let mut block = ResDBlock::new("d", 16, 16, &mut rng).unwrap();
        assert!(block.shortcut.is_none());
        block.conv1.weight.value_mut().zero();
        block.conv1.bias.value_mut().zero();
        block.conv2.weight.value_mut().zero();
        block.conv2.bias.value_mut().zero();
        let x = gaussian_init(&[16, 8, 8], 1.0, &mut rng).unwrap();
        let y = block.forward(&x).unwrap();
        let pooled = avgpool2(&x).unwrap();
        assert_eq!(y.data(), pooled.data());
    }

    #[test]
    fn up_block_doubles_extents_and_zero_residual_unit_is_upconv() {
        let mut rng = RngStream::new(2);
        let mut block = ResUBlock::new("u", 32, 16, 16, &mut rng).unwrap();
        block.conv1.weight.value_mut().zero();
        block.conv1.bias.value_mut().zero();
        block.conv2.weight.value_mut().zero();
        block.conv2.bias.value_mut().zero();
        let x = gaussian_init(&[32, 7, 7], 1.0, &mut rng).unwrap();
        let skip = gaussian_init(&[16, 14, 14], 1.0, &mut rng).unwrap();
        let y = block.forward(&x, Some(&skip)).unwrap();
        assert_eq!(y.shape(), &[16, 14, 14]);
        let y_up = block.up.forward(&x).unwrap();
        assert_eq!(y.data(), y_up.data());
    }

    #[test]
    fn clstm_block_with_zero_gates_is_identity() {
        let mut rng = RngStream::new(3);
        let mut block = ResCLSTMBlock::new("r", 4, 6, 6, &mut rng).unwrap();
        for p in block.params_mut() {
            p.value_mut().zero();
        }
        let x = gaussian_init(&[4, 6, 6], 1.0, &mut rng).unwrap();
        let y = block.step(&x).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn missing_skip_is_a_shape_error() {
        let mut rng = RngStream::new(4);
        let block = ResUBlock::new("u", 8, 4, 4, &mut rng).unwrap();
        let x = Tensor::zeros(&[8, 4, 4]);
        assert!(block.forward(&x, None).is_err());
    }
}
