//! Same-padding 3x3 convolution and the 1x1 projection used by residual
//! shortcuts. Cross-correlation convention, stride 1.
//!
//! The kernels below are written as shifted row operations so the inner
//! loops are contiguous mul-adds; at desk scale these run the bulk of the
//! training FLOPs.

use crate::error::{Error, Result};
use crate::param::Parameter;
use crate::rng::RngStream;
use crate::tensor::Tensor;

pub(crate) fn chw(t: &Tensor) -> Result<(usize, usize, usize)> {
    match t.shape() {
        [c, h, w] => Ok((*c, *h, *w)),
        other => Err(Error::shape(format!(
            "expected a C x H x W tensor, got shape {other:?}"
        ))),
    }
}

/// 3x3 convolution, zero "same" padding, stride 1, per-output-channel bias.
/// Output spatial extents equal input spatial extents.
#[derive(Debug, Clone)]
pub struct Conv2D {
    pub(crate) weight: Parameter, // [out_ch, in_ch, 3, 3]
    pub(crate) bias: Parameter,   // [out_ch]
    in_ch: usize,
    out_ch: usize,
}

impl Conv2D {
    /// Weights ~ N(0, sqrt(2 / fan_in)) with fan_in = in_ch * 9, bias zero.
    pub fn new(name: &str, in_ch: usize, out_ch: usize, rng: &mut RngStream) -> Result<Conv2D> {
        let std = (2.0 / (in_ch * 9) as f64).sqrt();
        Ok(Conv2D {
            weight: Parameter::gaussian(
                format!("{name}.weight"),
                &[out_ch, in_ch, 3, 3],
                std,
                rng,
            )?,
            bias: Parameter::zeros(format!("{name}.bias"), &[out_ch]),
            in_ch,
            out_ch,
        })
    }

    pub fn in_ch(&self) -> usize {
        self.in_ch
    }

    pub fn out_ch(&self) -> usize {
        self.out_ch
    }

    pub fn params(&self) -> Vec<&Parameter> {
        vec![&self.weight, &self.bias]
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.weight, &mut self.bias]
    }

    fn check_input(&self, x: &Tensor) -> Result<(usize, usize)> {
        let (c, h, w) = chw(x)?;
        if c != self.in_ch {
            return Err(Error::shape(format!(
                "conv2d expects {} input channels (weight shape {:?}), got input shape {:?}",
                self.in_ch,
                self.weight.value().shape(),
                x.shape()
            )));
        }
        Ok((h, w))
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let (h, w) = self.check_input(x)?;
        let mut y = Tensor::zeros(&[self.out_ch, h, w]);
        conv3x3_forward(
            self.weight.value().data(),
            self.bias.value().data(),
            x.data(),
            self.in_ch,
            self.out_ch,
            h,
            w,
            y.data_mut(),
        );
        Ok(y)
    }

    /// Accumulates weight/bias gradients into this layer; returns the input
    /// gradient. `x` must be the input the forward pass saw.
    pub fn backward(&mut self, x: &Tensor, dy: &Tensor) -> Result<Tensor> {
        let (h, w) = self.check_input(x)?;
        let (dc, dh, dw) = chw(dy)?;
        if (dc, dh, dw) != (self.out_ch, h, w) {
            return Err(Error::shape(format!(
                "conv2d backward: output grad {:?} does not match [{}, {h}, {w}]",
                dy.shape(),
                self.out_ch
            )));
        }
        let mut dx = Tensor::zeros(x.shape());
        conv3x3_backward_input(
            self.weight.value().data(),
            dy.data(),
            self.in_ch,
            self.out_ch,
            h,
            w,
            dx.data_mut(),
        );
        conv3x3_backward_params(
            x.data(),
            dy.data(),
            self.in_ch,
            self.out_ch,
            h,
            w,
            self.weight.grad_mut().data_mut(),
            self.bias.grad_mut().data_mut(),
        );
        Ok(dx)
    }
}

// The 3x3 kernels run as im2col + register-blocked GEMM: the patch matrix
// P[k][p] (k = ic*9 + ky*3 + kx, p = oy*w + ox) holds the zero-padded input
// window column/row shifts, the flattened weight matrix is [out_ch x K]
// with exactly matching k order, and forward / input-grad / weight-grad are
// the three GEMM orientations over it.

const MR: usize = 4; // output rows per microkernel tile
const NR: usize = 8; // spatial columns per microkernel tile

/// Fills `patches` (K x plane, pre-zeroed or overwritten) from x (C x H x W).
fn build_patches(x: &[f64], in_ch: usize, h: usize, w: usize, patches: &mut [f64]) {
    let plane = h * w;
    patches.fill(0.0);
    for ic in 0..in_ch {
        let xp = &x[ic * plane..(ic + 1) * plane];
        for ky in 0..3usize {
            for kx in 0..3usize {
                let row = &mut patches[(ic * 9 + ky * 3 + kx) * plane..(ic * 9 + ky * 3 + kx + 1) * plane];
                let (ox_lo, ox_hi) = (usize::from(kx == 0), if kx == 2 { w - 1 } else { w });
                for oy in 0..h {
                    let iy = oy + ky;
                    if iy == 0 || iy > h {
                        continue;
                    }
                    let src = &xp[(iy - 1) * w + ox_lo + kx - 1..(iy - 1) * w + ox_hi + kx - 1];
                    row[oy * w + ox_lo..oy * w + ox_hi].copy_from_slice(src);
                }
            }
        }
    }
}

/// Scatter-adds a patch-layout gradient back into input layout (the
/// transpose of [`build_patches`]).
fn scatter_patches(dpatches: &[f64], in_ch: usize, h: usize, w: usize, dx: &mut [f64]) {
    let plane = h * w;
    for ic in 0..in_ch {
        let dxp = &mut dx[ic * plane..(ic + 1) * plane];
        for ky in 0..3usize {
            for kx in 0..3usize {
                let row = &dpatches[(ic * 9 + ky * 3 + kx) * plane..(ic * 9 + ky * 3 + kx + 1) * plane];
                let (ox_lo, ox_hi) = (usize::from(kx == 0), if kx == 2 { w - 1 } else { w });
                for oy in 0..h {
                    let iy = oy + ky;
                    if iy == 0 || iy > h {
                        continue;
                    }
                    let dst = &mut dxp[(iy - 1) * w + ox_lo + kx - 1..(iy - 1) * w + ox_hi + kx - 1];
                    for (d, s) in dst.iter_mut().zip(&row[oy * w + ox_lo..oy * w + ox_hi]) {
                        *d += s;
                    }
                }
            }
        }
    }
}

/// C[m..m+rows][p-tile] += A[m..][k] * B[k][p-tile]; accumulators stay in
/// registers across the whole k loop.
#[inline(always)]
fn gemm_tile(
    a: &[f64],      // [m_total x kc], row-major
    lda: usize,
    m0: usize,
    rows: usize,
    b: &[f64],      // [kc x n_total], row-major
    ldb: usize,
    kc: usize,
    p0: usize,
    c: &mut [f64],  // [m_total x n_total]
    ldc: usize,
) {
    debug_assert!(rows <= MR);
    let mut acc = [[0.0_f64; NR]; MR];
    for k in 0..kc {
        let r = &b[k * ldb + p0..k * ldb + p0 + NR];
        for (i, acc_row) in acc.iter_mut().enumerate().take(rows) {
            let wv = a[(m0 + i) * lda + k];
            for (j, dst) in acc_row.iter_mut().enumerate() {
                *dst += wv * r[j];
            }
        }
    }
    for (i, acc_row) in acc.iter().enumerate().take(rows) {
        let dst = &mut c[(m0 + i) * ldc + p0..(m0 + i) * ldc + p0 + NR];
        for (d, s) in dst.iter_mut().zip(acc_row) {
            *d += s;
        }
    }
}

/// C += A (m x k, row-major) * B (k x n, row-major). Plain tail loops cover
/// the ragged edges.
fn gemm_accumulate(a: &[f64], m: usize, kc: usize, b: &[f64], n: usize, c: &mut [f64]) {
    let n_main = n - n % NR;
    let mut m0 = 0;
    while m0 < m {
        let rows = MR.min(m - m0);
        let mut p0 = 0;
        while p0 < n_main {
            gemm_tile(a, kc, m0, rows, b, n, kc, p0, c, n);
            p0 += NR;
        }
        if n_main < n {
            for i in 0..rows {
                let arow = &a[(m0 + i) * kc..(m0 + i + 1) * kc];
                for k in 0..kc {
                    let wv = arow[k];
                    if wv == 0.0 {
                        continue;
                    }
                    let brow = &b[k * n + n_main..(k + 1) * n];
                    let crow = &mut c[(m0 + i) * n + n_main..(m0 + i + 1) * n];
                    for (d, s) in crow.iter_mut().zip(brow) {
                        *d += wv * s;
                    }
                }
            }
        }
        m0 += MR;
    }
}

#[allow(clippy::too_many_arguments)]
fn conv3x3_forward(
    wt: &[f64],
    bias: &[f64],
    x: &[f64],
    in_ch: usize,
    out_ch: usize,
    h: usize,
    w: usize,
    y: &mut [f64],
) {
    let plane = h * w;
    let kc = in_ch * 9;
    let mut patches = vec![0.0; kc * plane];
    build_patches(x, in_ch, h, w, &mut patches);
    for oc in 0..out_ch {
        y[oc * plane..(oc + 1) * plane].fill(bias[oc]);
    }
    gemm_accumulate(wt, out_ch, kc, &patches, plane, y);
}

fn conv3x3_backward_input(
    wt: &[f64],
    dy: &[f64],
    in_ch: usize,
    out_ch: usize,
    h: usize,
    w: usize,
    dx: &mut [f64],
) {
    // dpatch = W^T (K x out_ch) * dy (out_ch x plane), then col2im.
    let plane = h * w;
    let kc = in_ch * 9;
    let mut wt_t = vec![0.0; kc * out_ch];
    for oc in 0..out_ch {
        for k in 0..kc {
            wt_t[k * out_ch + oc] = wt[oc * kc + k];
        }
    }
    let mut dpatches = vec![0.0; kc * plane];
    gemm_accumulate(&wt_t, kc, out_ch, dy, plane, &mut dpatches);
    scatter_patches(&dpatches, in_ch, h, w, dx);
}

#[allow(clippy::too_many_arguments)]
fn conv3x3_backward_params(
    x: &[f64],
    dy: &[f64],
    in_ch: usize,
    out_ch: usize,
    h: usize,
    w: usize,
    dwt: &mut [f64],
    dbias: &mut [f64],
) {
    let plane = h * w;
    let kc = in_ch * 9;
    let mut patches = vec![0.0; kc * plane];
    build_patches(x, in_ch, h, w, &mut patches);
    // dW[oc][k] += dot(dy[oc], P[k]); 4 k-rows share one dy pass.
    for oc in 0..out_ch {
        let dyp = &dy[oc * plane..(oc + 1) * plane];
        dbias[oc] += dyp.iter().sum::<f64>();
        let dwrow = &mut dwt[oc * kc..(oc + 1) * kc];
        let mut k = 0;
        while k + 4 <= kc {
            let (mut a0, mut a1, mut a2, mut a3) = (0.0, 0.0, 0.0, 0.0);
            let r0 = &patches[k * plane..(k + 1) * plane];
            let r1 = &patches[(k + 1) * plane..(k + 2) * plane];
            let r2 = &patches[(k + 2) * plane..(k + 3) * plane];
            let r3 = &patches[(k + 3) * plane..(k + 4) * plane];
            for p in 0..plane {
                let g = dyp[p];
                a0 += g * r0[p];
                a1 += g * r1[p];
                a2 += g * r2[p];
                a3 += g * r3[p];
            }
            dwrow[k] += a0;
            dwrow[k + 1] += a1;
            dwrow[k + 2] += a2;
            dwrow[k + 3] += a3;
            k += 4;
        }
        while k < kc {
            let r = &patches[k * plane..(k + 1) * plane];
            dwrow[k] += dyp.iter().zip(r).map(|(a, b)| a * b).sum::<f64>();
            k += 1;
        }
    }
}

/// 1x1 convolution without bias; the projection shortcut for residual
/// blocks whose channel counts change.
#[derive(Debug, Clone)]
pub struct Conv1x1 {
    pub(crate) weight: Parameter, // [out_ch, in_ch]
    in_ch: usize,
    out_ch: usize,
}

impl Conv1x1 {
    pub fn new(name: &str, in_ch: usize, out_ch: usize, rng: &mut RngStream) -> Result<Conv1x1> {
        let std = (2.0 / in_ch as f64).sqrt();
        Ok(Conv1x1 {
            weight: Parameter::gaussian(format!("{name}.weight"), &[out_ch, in_ch], std, rng)?,
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

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let (c, h, w) = chw(x)?;
        if c != self.in_ch {
            return Err(Error::shape(format!(
                "conv1x1 expects {} channels, got input shape {:?}",
                self.in_ch,
                x.shape()
            )));
        }
        let plane = h * w;
        let mut y = Tensor::zeros(&[self.out_ch, h, w]);
        let wt = self.weight.value().data();
        for oc in 0..self.out_ch {
            let yp = &mut y.data_mut()[oc * plane..(oc + 1) * plane];
            for ic in 0..self.in_ch {
                let wv = wt[oc * self.in_ch + ic];
                let xp = &x.data()[ic * plane..(ic + 1) * plane];
                for (d, s) in yp.iter_mut().zip(xp) {
                    *d += wv * *s;
                }
            }
        }
        Ok(y)
    }

    pub fn backward(&mut self, x: &Tensor, dy: &Tensor) -> Result<Tensor> {
        let (_, h, w) = chw(x)?;
        let plane = h * w;
        let mut dx = Tensor::zeros(x.shape());
        let (wvals, wgrad) = self.weight.value_and_grad_mut();
        let wt = wvals.data();
        {
            let dwt = wgrad.data_mut();
            for oc in 0..self.out_ch {
                let dyp = &dy.data()[oc * plane..(oc + 1) * plane];
                for ic in 0..self.in_ch {
                    let xp = &x.data()[ic * plane..(ic + 1) * plane];
                    let dxp = &mut dx.data_mut()[ic * plane..(ic + 1) * plane];
                    let wv = wt[oc * self.in_ch + ic];
                    let mut acc = 0.0;
                    for ((d, s), xv) in dxp.iter_mut().zip(dyp).zip(xp) {
                        *d += wv * *s;
                        acc += *s * *xv;
                    }
                    dwt[oc * self.in_ch + ic] += acc;
                }
            }
        }
        Ok(dx)
    }
}
