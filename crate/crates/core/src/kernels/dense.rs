use alloc::format;
use alloc::vec::Vec;

use crate::error::{shape_err, Result};
use crate::tensor::Tensor;

/// Fully connected layer: `out[c] = sum_k weights[k][c] * input[k] + bias[c]`.
///
/// `weights` is `(n, m)` row-major, one row per input feature.
pub fn dense(input: &Tensor, weights: &Tensor, bias: &Tensor) -> Result<Tensor> {
    let n = input.dims1()?;
    let (wn, m) = match weights.shape() {
        [a, b] => (*a, *b),
        s => {
            return Err(shape_err(format!(
                "dense weights must be rank 2, got {s:?}"
            )))
        }
    };
    if wn != n {
        return Err(shape_err(format!(
            "dense weights expect {wn} inputs, got {n}"
        )));
    }
    if bias.shape() != [m] {
        return Err(shape_err(format!(
            "dense bias must have shape [{m}], got {:?}",
            bias.shape()
        )));
    }
    let mut acc: Vec<f64> = bias.data().iter().map(|&b| b as f64).collect();
    for (&x, row) in input.data().iter().zip(weights.data().chunks_exact(m)) {
        let x = x as f64;
        for (a, &w) in acc.iter_mut().zip(row) {
            *a += w as f64 * x;
        }
    }
    Tensor::vector(acc.into_iter().map(|v| v as f32).collect())
}
