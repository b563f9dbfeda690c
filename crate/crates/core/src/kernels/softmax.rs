use alloc::vec::Vec;

use crate::error::Result;
use crate::tensor::Tensor;

/// Max-subtracted softmax over a rank-1 tensor.
pub fn softmax(input: &Tensor) -> Result<Tensor> {
    input.dims1()?;
    let max = input
        .data()
        .iter()
        .copied()
        .fold(f32::NEG_INFINITY, f32::max) as f64;
    let exps: Vec<f64> = input
        .data()
        .iter()
        .map(|&v| libm::exp(v as f64 - max))
        .collect();
    let total: f64 = exps.iter().sum();
    Tensor::vector(exps.into_iter().map(|e| (e / total) as f32).collect())
}
