//! Convolutional LSTM cell with full backpropagation through time.
//!
//! All four gates come from one fused 3x3 same-padding convolution over the
//! channel-concatenated `[input; hidden]` map. Gate order is fixed and
//! documented: (i, f, g, o) — input, forget, candidate, output. `i`, `f`,
//! `o` pass through the logistic sigmoid and `g` through tanh:
//!
//!   c_t = f .* c_{t-1} + i .* g
//!   h_t = o .* tanh(c_t)
//!
//! No peephole connections. Hidden and cell state are all-zero at sequence
//! start; forget-gate bias starts at 1.

use crate::error::{Error, Result};
use crate::layers::activation::sigmoid_scalar;
use crate::layers::concat::{concat_channels, split_channels};
use crate::layers::conv::{chw, Conv2D};
use crate::param::Parameter;
use crate::rng::RngStream;
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct ConvLSTMCell {
    gates: Conv2D, // (in_ch + hidden_ch) -> 4 * hidden_ch
    in_ch: usize,
    hidden_ch: usize,
    height: usize,
    width: usize,
    h: Tensor,
    c: Tensor,
}

/// Per-step activations retained for backpropagation through time.
#[derive(Debug, Clone)]
pub struct ConvLstmCache {
    cat: Tensor, // [in_ch + hidden_ch, H, W], the gate-conv input
    i: Tensor,
    f: Tensor,
    g: Tensor,
    o: Tensor,
    c_prev: Tensor,
    tanh_c: Tensor,
}

/// Gradient flowing into (h_t, c_t) from later time steps.
#[derive(Debug, Clone)]
pub struct LstmCarry {
    pub dh: Tensor,
    pub dc: Tensor,
}

impl LstmCarry {
    pub fn zeros(hidden_ch: usize, height: usize, width: usize) -> LstmCarry {
        LstmCarry {
            dh: Tensor::zeros(&[hidden_ch, height, width]),
            dc: Tensor::zeros(&[hidden_ch, height, width]),
        }
    }
}

impl ConvLSTMCell {
    pub fn new(
        name: &str,
        in_ch: usize,
        hidden_ch: usize,
        height: usize,
        width: usize,
        rng: &mut RngStream,
    ) -> Result<ConvLSTMCell> {
        let mut gates = Conv2D::new(&format!("{name}.gates"), in_ch + hidden_ch, 4 * hidden_ch, rng)?;
        // Forget-gate bias 1.0 helps long-sequence training; other biases zero.
        for b in &mut gates.bias.value_mut().data_mut()[hidden_ch..2 * hidden_ch] {
            *b = 1.0;
        }
        let state_shape = [hidden_ch, height, width];
        Ok(ConvLSTMCell {
            gates,
            in_ch,
            hidden_ch,
            height,
            width,
            h: Tensor::zeros(&state_shape),
            c: Tensor::zeros(&state_shape),
        })
    }

    pub fn hidden_ch(&self) -> usize {
        self.hidden_ch
    }

    pub fn hidden(&self) -> &Tensor {
        &self.h
    }

    pub fn cell(&self) -> &Tensor {
        &self.c
    }

    pub fn params(&self) -> Vec<&Parameter> {
        self.gates.params()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        self.gates.params_mut()
    }

    /// Zeroes hidden and cell state; call before every new sequence.
    pub fn reset(&mut self) {
        self.h.zero();
        self.c.zero();
    }

    /// Overrides the recurrent state. Intended for tests and diagnostics.
    pub fn set_state(&mut self, h: Tensor, c: Tensor) -> Result<()> {
        if h.shape() != self.h.shape() || c.shape() != self.c.shape() {
            return Err(Error::shape(format!(
                "set_state: expected {:?}, got {:?} / {:?}",
                self.h.shape(),
                h.shape(),
                c.shape()
            )));
        }
        self.h = h;
        self.c = c;
        Ok(())
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        let (c, h, w) = chw(x)?;
        if c != self.in_ch || h != self.height || w != self.width {
            return Err(Error::shape(format!(
                "convlstm_step: expected input [{}, {}, {}], got {:?}",
                self.in_ch,
                self.height,
                self.width,
                x.shape()
            )));
        }
        Ok(())
    }

    /// Advances the recurrent state one step and returns the new hidden map.
    pub fn step(&mut self, x: &Tensor) -> Result<Tensor> {
        Ok(self.step_internal(x)?.0)
    }

    /// Like [`ConvLSTMCell::step`] but also returns the activation cache
    /// needed by [`ConvLSTMCell::backward_step`].
    pub fn step_cached(&mut self, x: &Tensor) -> Result<(Tensor, ConvLstmCache)> {
        self.step_internal(x)
    }

    fn step_internal(&mut self, x: &Tensor) -> Result<(Tensor, ConvLstmCache)> {
        self.check_input(x)?;
        let cat = concat_channels(x, &self.h)?;
        let pre = self.gates.forward(&cat)?;

        let plane = self.height * self.width;
        let n = self.hidden_ch * plane;
        let gate_shape = [self.hidden_ch, self.height, self.width];
        let mut i = Tensor::zeros(&gate_shape);
        let mut f = Tensor::zeros(&gate_shape);
        let mut g = Tensor::zeros(&gate_shape);
        let mut o = Tensor::zeros(&gate_shape);
        let pd = pre.data();
        for k in 0..n {
            i.data_mut()[k] = sigmoid_scalar(pd[k]);
            f.data_mut()[k] = sigmoid_scalar(pd[n + k]);
            g.data_mut()[k] = pd[2 * n + k].tanh();
            o.data_mut()[k] = sigmoid_scalar(pd[3 * n + k]);
        }

        let c_prev = std::mem::replace(&mut self.c, Tensor::zeros(&gate_shape));
        let mut tanh_c = Tensor::zeros(&gate_shape);
        for k in 0..n {
            let c_new = f.data()[k] * c_prev.data()[k] + i.data()[k] * g.data()[k];
            self.c.data_mut()[k] = c_new;
            tanh_c.data_mut()[k] = c_new.tanh();
        }
        let mut h_new = Tensor::zeros(&gate_shape);
        for k in 0..n {
            h_new.data_mut()[k] = o.data()[k] * tanh_c.data()[k];
        }
        self.h = h_new.clone();

        Ok((
            h_new,
            ConvLstmCache {
                cat,
                i,
                f,
                g,
                o,
                c_prev,
                tanh_c,
            },
        ))
    }

    /// One step of backpropagation through time, walked in reverse order.
    ///
    /// `d_out` is the gradient arriving at h_t from the output path at step
    /// t; `carry` holds the gradients flowing into (h_t, c_t) from step
    /// t + 1. Returns the input gradient and the carry for step t - 1.
    /// Gate-convolution gradients accumulate into the cell's parameters.
    pub fn backward_step(
        &mut self,
        cache: &ConvLstmCache,
        d_out: &Tensor,
        carry: LstmCarry,
    ) -> Result<(Tensor, LstmCarry)> {
        let n = self.hidden_ch * self.height * self.width;
        let gate_shape = [self.hidden_ch, self.height, self.width];

        let mut dh = d_out.clone();
        dh.add_assign(&carry.dh)?;

        let mut d_pre = Tensor::zeros(&[4 * self.hidden_ch, self.height, self.width]);
        let mut dc_prev = Tensor::zeros(&gate_shape);
        {
            let dp = d_pre.data_mut();
            for k in 0..n {
                let (i, f, g, o) = (
                    cache.i.data()[k],
                    cache.f.data()[k],
                    cache.g.data()[k],
                    cache.o.data()[k],
                );
                let tc = cache.tanh_c.data()[k];
                let dhk = dh.data()[k];
                let d_o = dhk * tc;
                let d_c = dhk * o * (1.0 - tc * tc) + carry.dc.data()[k];
                let d_f = d_c * cache.c_prev.data()[k];
                let d_i = d_c * g;
                let d_g = d_c * i;
                dc_prev.data_mut()[k] = d_c * f;
                dp[k] = d_i * i * (1.0 - i);
                dp[n + k] = d_f * f * (1.0 - f);
                dp[2 * n + k] = d_g * (1.0 - g * g);
                dp[3 * n + k] = d_o * o * (1.0 - o);
            }
        }

        let d_cat = self.gates.backward(&cache.cat, &d_pre)?;
        let (dx, dh_prev) = split_channels(&d_cat, self.in_ch)?;
        Ok((
            dx,
            LstmCarry {
                dh: dh_prev,
                dc: dc_prev,
            },
        ))
    }
}
