use alloc::vec;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Bilinear resize with half-pixel centers (no corner alignment).
///
/// Source coordinate for destination index `d` is `(d + 0.5) * in / out - 0.5`,
/// clamped to `[0, in - 1]`.
pub fn resize_bilinear(input: &Tensor, out_h: usize, out_w: usize) -> Result<Tensor> {
    let (h, w, c) = input.dims3()?;
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidArgument(
            "resize target dims must be positive".into(),
        ));
    }
    let ys: alloc::vec::Vec<_> = (0..out_h).map(|d| sample_axis(d, h, out_h)).collect();
    let xs: alloc::vec::Vec<_> = (0..out_w).map(|d| sample_axis(d, w, out_w)).collect();
    let x = input.data();
    let mut out = vec![0.0f32; out_h * out_w * c];
    for (oy, &(y0, y1, fy)) in ys.iter().enumerate() {
        for (ox, &(x0, x1, fx)) in xs.iter().enumerate() {
            let dst = &mut out[(oy * out_w + ox) * c..][..c];
            for k in 0..c {
                let at = |yy: usize, xx: usize| x[(yy * w + xx) * c + k] as f64;
                let top = at(y0, x0) * (1.0 - fx) + at(y0, x1) * fx;
                let bottom = at(y1, x0) * (1.0 - fx) + at(y1, x1) * fx;
                dst[k] = (top * (1.0 - fy) + bottom * fy) as f32;
            }
        }
    }
    Tensor::hwc(out_h, out_w, c, out)
}

/// Neighbouring source indices and the weight of the second one.
fn sample_axis(dst: usize, in_len: usize, out_len: usize) -> (usize, usize, f64) {
    let scale = in_len as f64 / out_len as f64;
    let src = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (in_len - 1) as f64);
    let lo = libm::floor(src) as usize;
    let hi = (lo + 1).min(in_len - 1);
    (lo, hi, src - lo as f64)
}
