use alloc::format;
use alloc::vec;

use crate::error::{shape_err, Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    /// No padding; windows must fit entirely inside the input.
    Valid,
    /// Zero padding so that `out = ceil(in / stride)`. Odd padding puts the
    /// extra row/column at the bottom/right.
    Same,
}

/// Kernel, bias and geometry for a (depthwise) convolution.
///
/// The kernel is `(kh, kw, in_ch, out_ch)` for a full convolution and
/// `(kh, kw, ch, 1)` for a depthwise one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvParams {
    pub kernel: Tensor,
    pub bias: Tensor,
    pub stride: usize,
    pub padding: Padding,
}

impl ConvParams {
    pub fn new(kernel: Tensor, bias: Tensor, stride: usize, padding: Padding) -> Result<Self> {
        let params = ConvParams {
            kernel,
            bias,
            stride,
            padding,
        };
        params.kernel_dims()?;
        Ok(params)
    }

    /// Unbiased convolution.
    pub fn without_bias(kernel: Tensor, stride: usize, padding: Padding) -> Result<Self> {
        let out = match kernel.shape() {
            [_, _, _, o] => *o,
            s => return Err(shape_err(format!("conv kernel must be rank 4, got {s:?}"))),
        };
        ConvParams::new(kernel, Tensor::zeros(vec![out])?, stride, padding)
    }

    /// Unbiased depthwise convolution over a `(kh, kw, ch, 1)` kernel.
    pub fn depthwise_without_bias(kernel: Tensor, stride: usize, padding: Padding) -> Result<Self> {
        let ch = match kernel.shape() {
            [_, _, c, _] => *c,
            s => return Err(shape_err(format!("conv kernel must be rank 4, got {s:?}"))),
        };
        ConvParams::new(kernel, Tensor::zeros(vec![ch])?, stride, padding)
    }

    fn kernel_dims(&self) -> Result<(usize, usize, usize, usize)> {
        let (kh, kw, ci, co) = match self.kernel.shape() {
            [a, b, c, d] => (*a, *b, *c, *d),
            s => return Err(shape_err(format!("conv kernel must be rank 4, got {s:?}"))),
        };
        if self.stride == 0 {
            return Err(Error::InvalidArgument("stride must be at least 1".into()));
        }
        Ok((kh, kw, ci, co))
    }
}

/// Output length and leading pad for one spatial axis.
pub fn output_geometry(
    input: usize,
    kernel: usize,
    stride: usize,
    padding: Padding,
) -> Result<(usize, usize)> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    match padding {
        Padding::Valid => {
            if input < kernel {
                return Err(shape_err(format!(
                    "valid convolution of extent {input} with kernel {kernel} has no output"
                )));
            }
            Ok(((input - kernel) / stride + 1, 0))
        }
        Padding::Same => {
            let out = input.div_ceil(stride);
            let total = ((out - 1) * stride + kernel).saturating_sub(input);
            Ok((out, total / 2))
        }
    }
}

/// Standard cross-correlation with per-output-channel bias.
pub fn conv2d(input: &Tensor, params: &ConvParams) -> Result<Tensor> {
    let (h, w, c) = input.dims3()?;
    let (kh, kw, ci, co) = params.kernel_dims()?;
    if ci != c {
        return Err(shape_err(format!(
            "conv kernel expects {ci} input channels, input has {c}"
        )));
    }
    check_bias(params, co)?;
    let (oh, pad_top) = output_geometry(h, kh, params.stride, params.padding)?;
    let (ow, pad_left) = output_geometry(w, kw, params.stride, params.padding)?;

    let x = input.data();
    let k = params.kernel.data();
    let bias = params.bias.data();
    let mut out = vec![0.0f32; oh * ow * co];
    for oy in 0..oh {
        for ox in 0..ow {
            let acc = &mut out[(oy * ow + ox) * co..][..co];
            acc.copy_from_slice(bias);
            for ky in 0..kh {
                let iy = (oy * params.stride + ky) as isize - pad_top as isize;
                if iy < 0 || iy >= h as isize {
                    continue;
                }
                for kx in 0..kw {
                    let ix = (ox * params.stride + kx) as isize - pad_left as isize;
                    if ix < 0 || ix >= w as isize {
                        continue;
                    }
                    let pixel = &x[(iy as usize * w + ix as usize) * c..][..c];
                    let taps = &k[(ky * kw + kx) * ci * co..][..ci * co];
                    for (xi, row) in pixel.iter().zip(taps.chunks_exact(co)) {
                        for (a, &wt) in acc.iter_mut().zip(row) {
                            *a += xi * wt;
                        }
                    }
                }
            }
        }
    }
    Tensor::hwc(oh, ow, co, out)
}

/// Per-channel convolution; channel `c` only sees filter `kernel[.., .., c, 0]`.
pub fn depthwise_conv2d(input: &Tensor, params: &ConvParams) -> Result<Tensor> {
    let (h, w, c) = input.dims3()?;
    let (kh, kw, kc, mult) = params.kernel_dims()?;
    if mult != 1 {
        return Err(shape_err(format!(
            "depthwise kernel must have channel multiplier 1, got {mult}"
        )));
    }
    if kc != c {
        return Err(shape_err(format!(
            "depthwise kernel covers {kc} channels, input has {c}"
        )));
    }
    check_bias(params, c)?;
    let (oh, pad_top) = output_geometry(h, kh, params.stride, params.padding)?;
    let (ow, pad_left) = output_geometry(w, kw, params.stride, params.padding)?;

    let x = input.data();
    let k = params.kernel.data();
    let mut out = vec![0.0f32; oh * ow * c];
    for oy in 0..oh {
        for ox in 0..ow {
            let acc = &mut out[(oy * ow + ox) * c..][..c];
            acc.copy_from_slice(params.bias.data());
            for ky in 0..kh {
                let iy = (oy * params.stride + ky) as isize - pad_top as isize;
                if iy < 0 || iy >= h as isize {
                    continue;
                }
                for kx in 0..kw {
                    let ix = (ox * params.stride + kx) as isize - pad_left as isize;
                    if ix < 0 || ix >= w as isize {
                        continue;
                    }
                    let pixel = &x[(iy as usize * w + ix as usize) * c..][..c];
                    let taps = &k[(ky * kw + kx) * c..][..c];
                    for ((a, &xi), &wt) in acc.iter_mut().zip(pixel).zip(taps) {
                        *a += xi * wt;
                    }
                }
            }
        }
    }
    Tensor::hwc(oh, ow, c, out)
}

fn check_bias(params: &ConvParams, channels: usize) -> Result<()> {
    if params.bias.shape() != [channels] {
        return Err(shape_err(format!(
            "conv bias must have shape [{channels}], got {:?}",
            params.bias.shape()
        )));
    }
    Ok(())
}
