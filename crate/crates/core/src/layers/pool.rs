//! 2x2 average pooling with uniform gradient redistribution.

use crate::error::{Error, Result};
use crate::layers::conv::chw;
use crate::tensor::Tensor;

/// Mean over non-overlapping 2x2 blocks; halves both spatial extents.
pub fn avgpool2(x: &Tensor) -> Result<Tensor> {
    let (c, h, w) = chw(x)?;
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::shape(format!(
            "avgpool2 needs even spatial extents, got {:?}",
            x.shape()
        )));
    }
    let (oh, ow) = (h / 2, w / 2);
    let mut y = Tensor::zeros(&[c, oh, ow]);
    for ch in 0..c {
        let xp = &x.data()[ch * h * w..(ch + 1) * h * w];
        let yp = &mut y.data_mut()[ch * oh * ow..(ch + 1) * oh * ow];
        for oy in 0..oh {
            let r0 = &xp[(2 * oy) * w..(2 * oy + 1) * w];
            let r1 = &xp[(2 * oy + 1) * w..(2 * oy + 2) * w];
            for ox in 0..ow {
                yp[oy * ow + ox] =
                    0.25 * (r0[2 * ox] + r0[2 * ox + 1] + r1[2 * ox] + r1[2 * ox + 1]);
            }
        }
    }
    Ok(y)
}

/// Distributes each output gradient uniformly (1/4) over its 2x2 block.
pub fn avgpool2_backward(dy: &Tensor, input_shape: &[usize]) -> Result<Tensor> {
    let (c, oh, ow) = chw(dy)?;
    let expected = [c, oh * 2, ow * 2];
    if input_shape != expected {
        return Err(Error::shape(format!(
            "avgpool2 backward: grad {:?} does not match input {:?}",
            dy.shape(),
            input_shape
        )));
    }
    let (h, w) = (oh * 2, ow * 2);
    let mut dx = Tensor::zeros(input_shape);
    for ch in 0..c {
        let dyp = &dy.data()[ch * oh * ow..(ch + 1) * oh * ow];
        let dxp = &mut dx.data_mut()[ch * h * w..(ch + 1) * h * w];
        for oy in 0..oh {
            for ox in 0..ow {
                let g = 0.25 * dyp[oy * ow + ox];
                dxp[(2 * oy) * w + 2 * ox] = g;
                dxp[(2 * oy) * w + 2 * ox + 1] = g;
                dxp[(2 * oy + 1) * w + 2 * ox] = g;
                dxp[(2 * oy + 1) * w + 2 * ox + 1] = g;
            }
        }
    }
    Ok(dx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_input_gives_constant_output() {
        let x = Tensor::filled(&[3, 4, 4], 2.5);
        let y = avgpool2(&x).unwrap();
        assert_eq!(y.shape(), &[3, 2, 2]);
        assert!(y.data().iter().all(|v| *v == 2.5));
    }

    #[test]
    fn block_mean_arithmetic() {
        let x = Tensor::from_vec(&[1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = avgpool2(&x).unwrap();
        assert_eq!(y.data(), &[2.5]);
    }

    #[test]
    fn odd_extent_is_a_shape_error() {
        let x = Tensor::zeros(&[1, 3, 4]);
        assert!(matches!(avgpool2(&x), Err(Error::Shape(_))));
    }

    #[test]
    fn backward_of_sum_loss_is_quarter_everywhere() {
        // d(sum of outputs)/dx distributes 1/4 to each input element.
        let dy = Tensor::filled(&[2, 2, 2], 1.0);
        let dx = avgpool2_backward(&dy, &[2, 4, 4]).unwrap();
        assert!(dx.data().iter().all(|v| *v == 0.25));
    }
}
