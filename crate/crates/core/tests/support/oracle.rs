//! Naive reference implementations used as test oracles.
//!
//! These work on plain `f64` buffers in `(h, w, c)` row-major order and do
//! not share code with the library kernels. Padding is applied by
//! materializing a zero-padded copy of the input, then running a valid
//! convolution with six nested loops.
#![allow(dead_code, clippy::too_many_arguments, clippy::needless_range_loop)]

pub struct Volume {
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub data: Vec<f64>,
}

impl Volume {
    pub fn from_f32(h: usize, w: usize, c: usize, data: &[f32]) -> Volume {
        assert_eq!(data.len(), h * w * c);
        Volume {
            h,
            w,
            c,
            data: data.iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn at(&self, y: usize, x: usize, k: usize) -> f64 {
        self.data[(y * self.w + x) * self.c + k]
    }
}

/// Leading and trailing pad plus output length for "same" padding; the
/// odd cell goes at the end.
pub fn same_pad(len: usize, k: usize, stride: usize) -> (usize, usize, usize) {
    let out = len.div_ceil(stride);
    let needed = (out - 1) * stride + k;
    let total = needed.saturating_sub(len);
    (total / 2, total - total / 2, out)
}

pub fn zero_pad(v: &Volume, top: usize, bottom: usize, left: usize, right: usize) -> Volume {
    let (h, w) = (v.h + top + bottom, v.w + left + right);
    let mut data = vec![0.0; h * w * v.c];
    for y in 0..v.h {
        for x in 0..v.w {
            for k in 0..v.c {
                data[((y + top) * w + (x + left)) * v.c + k] = v.at(y, x, k);
            }
        }
    }
    Volume { h, w, c: v.c, data }
}

fn pad_for(v: &Volume, kh: usize, kw: usize, stride: usize, same: bool) -> Volume {
    if same {
        let (t, b, _) = same_pad(v.h, kh, stride);
        let (l, r, _) = same_pad(v.w, kw, stride);
        zero_pad(v, t, b, l, r)
    } else {
        Volume {
            h: v.h,
            w: v.w,
            c: v.c,
            data: v.data.clone(),
        }
    }
}

/// kernel is (kh, kw, cin, cout) row-major.
pub fn conv2d(
    input: &Volume,
    kernel: &[f32],
    kh: usize,
    kw: usize,
    cout: usize,
    bias: &[f32],
    stride: usize,
    same: bool,
) -> Volume {
    let cin = input.c;
    let p = pad_for(input, kh, kw, stride, same);
    let oh = (p.h - kh) / stride + 1;
    let ow = (p.w - kw) / stride + 1;
    let mut out = vec![0.0; oh * ow * cout];
    for oy in 0..oh {
        for ox in 0..ow {
            for co in 0..cout {
                let mut s = bias[co] as f64;
                for ky in 0..kh {
                    for kx in 0..kw {
                        for ci in 0..cin {
                            let wgt = kernel[((ky * kw + kx) * cin + ci) * cout + co] as f64;
                            s += wgt * p.at(oy * stride + ky, ox * stride + kx, ci);
                        }
                    }
                }
                out[(oy * ow + ox) * cout + co] = s;
            }
        }
    }
    Volume {
        h: oh,
        w: ow,
        c: cout,
        data: out,
    }
}

/// kernel is (kh, kw, c, 1) row-major.
pub fn depthwise_conv2d(
    input: &Volume,
    kernel: &[f32],
    kh: usize,
    kw: usize,
    bias: &[f32],
    stride: usize,
    same: bool,
) -> Volume {
    // one single-channel full convolution per channel
    let c = input.c;
    let mut channels = Vec::new();
    for k in 0..c {
        let plane = Volume {
            h: input.h,
            w: input.w,
            c: 1,
            data: (0..input.h * input.w)
                .map(|i| input.data[i * c + k])
                .collect(),
        };
        let filt: Vec<f32> = (0..kh * kw).map(|t| kernel[t * c + k]).collect();
        channels.push(conv2d(&plane, &filt, kh, kw, 1, &[bias[k]], stride, same));
    }
    let (oh, ow) = (channels[0].h, channels[0].w);
    let mut data = vec![0.0; oh * ow * c];
    for (k, ch) in channels.iter().enumerate() {
        for i in 0..oh * ow {
            data[i * c + k] = ch.data[i];
        }
    }
    Volume {
        h: oh,
        w: ow,
        c,
        data,
    }
}

pub fn batch_norm(
    x: &Volume,
    gamma: &[f32],
    beta: &[f32],
    mean: &[f32],
    var: &[f32],
    eps: f32,
) -> Volume {
    let mut data = x.data.clone();
    for (i, v) in data.iter_mut().enumerate() {
        let k = i % x.c;
        *v = gamma[k] as f64 * (*v - mean[k] as f64) / (var[k] as f64 + eps as f64).sqrt()
            + beta[k] as f64;
    }
    Volume { data, ..*x }
}

pub fn relu6(x: &Volume) -> Volume {
    Volume {
        data: x.data.iter().map(|v| v.clamp(0.0, 6.0)).collect(),
        ..*x
    }
}

pub fn relu(x: &Volume) -> Volume {
    Volume {
        data: x.data.iter().map(|v| v.max(0.0)).collect(),
        ..*x
    }
}

pub fn gap(x: &Volume) -> Vec<f64> {
    (0..x.c)
        .map(|k| {
            let mut s = 0.0;
            for y in 0..x.h {
                for xx in 0..x.w {
                    s += x.at(y, xx, k);
                }
            }
            s / (x.h * x.w) as f64
        })
        .collect()
}

/// weights (n, m) row-major.
pub fn matvec(x: &[f64], weights: &[f32], m: usize, bias: &[f32]) -> Vec<f64> {
    (0..m)
        .map(|c| {
            let mut s = bias[c] as f64;
            for k in 0..x.len() {
                s += weights[k * m + c] as f64 * x[k];
            }
            s
        })
        .collect()
}

pub fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().cloned().fold(f64::MIN, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Half-pixel bilinear resize evaluated one output value at a time.
pub fn resize_bilinear(x: &Volume, oh: usize, ow: usize) -> Volume {
    let src = |d: usize, n_in: usize, n_out: usize| -> f64 {
        let s = (d as f64 + 0.5) * (n_in as f64 / n_out as f64) - 0.5;
        s.max(0.0).min((n_in - 1) as f64)
    };
    let mut data = Vec::with_capacity(oh * ow * x.c);
    for y in 0..oh {
        for xx in 0..ow {
            for k in 0..x.c {
                let sy = src(y, x.h, oh);
                let sx = src(xx, x.w, ow);
                let (y0, x0) = (sy.floor() as usize, sx.floor() as usize);
                let (y1, x1) = ((y0 + 1).min(x.h - 1), (x0 + 1).min(x.w - 1));
                let (dy, dx) = (sy - y0 as f64, sx - x0 as f64);
                let v = x.at(y0, x0, k) * (1.0 - dy) * (1.0 - dx)
                    + x.at(y0, x1, k) * (1.0 - dy) * dx
                    + x.at(y1, x0, k) * dy * (1.0 - dx)
                    + x.at(y1, x1, k) * dy * dx;
                data.push(v);
            }
        }
    }
    Volume {
        h: oh,
        w: ow,
        c: x.c,
        data,
    }
}

/// Direct double sum `sum_k w[k][class] * a[y][x][k]` per cell.
pub fn cam(act: &Volume, weights: &[f32], classes: usize, class: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for y in 0..act.h {
        for x in 0..act.w {
            let mut s = 0.0;
            for k in 0..act.c {
                s += weights[k * classes + class] as f64 * act.at(y, x, k);
            }
            out.push(s);
        }
    }
    out
}

pub fn max_abs_diff(a: &[f32], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 - y).abs())
        .fold(0.0, f64::max)
}
