//! Transposed convolution with a 2x2 kernel and stride 2, no padding.
//! Each input pixel scatters a weighted 2x2 block; blocks do not overlap,
//! so both spatial extents exactly double.

use crate::error::{Error, Result};
use crate::layers::conv::chw;
use crate::param::Parameter;
use crate::rng::RngStream;
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct UpConv2 {
    pub(crate) weight: Parameter, // [in_ch, out_ch, 2, 2]
    in_ch: usize,
    out_ch: usize,
}

impl UpConv2 {
    pub fn new(name: &str, in_ch: usize, out_ch: usize, rng: &mut RngStream) -> Result<UpConv2> {
        let std = (2.0 / in_ch as f64).sqrt();
        Ok(UpConv2 {
            weight: Parameter::gaussian(format!("{name}.weight"), &[in_ch, out_ch, 2, 2], std, rng)?,
            in_ch,
            out_ch,
        })
    }

    pub fn params(&self) -> Vec<&Parameter> {
        vec![&self.weight]
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.weight]
    }

    fn check_input(&self, x: &Tensor) -> Result<(usize, usize)> {
        let (c, h, w) = chw(x)?;
        if c != self.in_ch {
            return Err(Error::shape(format!(
                "upconv2 expects {} input channels (weight shape {:?}), got input shape {:?}",
                self.in_ch,
                self.weight.value().shape(),
                x.shape()
            )));
        }
        Ok((h, w))
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let (h, w) = self.check_input(x)?;
        let (oh, ow) = (2 * h, 2 * w);
        let mut y = Tensor::zeros(&[self.out_ch, oh, ow]);
        let wt = self.weight.value().data();
        for ic in 0..self.in_ch {
            let xp = &x.data()[ic * h * w..(ic + 1) * h * w];
            for oc in 0..self.out_ch {
                let yp = &mut y.data_mut()[oc * oh * ow..(oc + 1) * oh * ow];
                let wbase = (ic * self.out_ch + oc) * 4;
                for dy in 0..2 {
                    for dxk in 0..2 {
                        let wv = wt[wbase + dy * 2 + dxk];
                        for iy in 0..h {
                            let src = &xp[iy * w..(iy + 1) * w];
                            let orow = (2 * iy + dy) * ow + dxk;
                            for (j, s) in src.iter().enumerate() {
                                yp[orow + 2 * j] += wv * *s;
                            }
                        }
                    }
                }
            }
        }
        Ok(y)
    }

    pub fn backward(&mut self, x: &Tensor, dy: &Tensor) -> Result<Tensor> {
        let (h, w) = self.check_input(x)?;
        let (oc_got, oh, ow) = chw(dy)?;
        if (oc_got, oh, ow) != (self.out_ch, 2 * h, 2 * w) {
            return Err(Error::shape(format!(
                "upconv2 backward: grad {:?} does not match [{}, {}, {}]",
                dy.shape(),
                self.out_ch,
                2 * h,
                2 * w
            )));
        }
        let mut dx = Tensor::zeros(x.shape());
        let (wvals, wgrad) = self.weight.value_and_grad_mut();
        let wt = wvals.data();
        let dwt = wgrad.data_mut();
        for ic in 0..self.in_ch {
            let xp = &x.data()[ic * h * w..(ic + 1) * h * w];
            let dxp = &mut dx.data_mut()[ic * h * w..(ic + 1) * h * w];
            for oc in 0..self.out_ch {
                let dyp = &dy.data()[oc * oh * ow..(oc + 1) * oh * ow];
                let wbase = (ic * self.out_ch + oc) * 4;
                for dyk in 0..2 {
                    for dxk in 0..2 {
                        let wv = wt[wbase + dyk * 2 + dxk];
                        let mut wacc = 0.0;
                        for iy in 0..h {
                            let orow = (2 * iy + dyk) * ow + dxk;
                            for j in 0..w {
                                let g = dyp[orow + 2 * j];
                                dxp[iy * w + j] += wv * g;
                                wacc += g * xp[iy * w + j];
                            }
                        }
                        dwt[wbase + dyk * 2 + dxk] += wacc;
                    }
                }
            }
        }
        Ok(dx)
    }
}
