use alloc::vec;

use crate::error::Result;
use crate::tensor::Tensor;

/// Spatial mean per channel: `(h, w, c) -> (c)`.
pub fn global_average_pool(input: &Tensor) -> Result<Tensor> {
    let (h, w, c) = input.dims3()?;
    let mut sums = vec![0.0f64; c];
    for pixel in input.data().chunks_exact(c) {
        for (s, &v) in sums.iter_mut().zip(pixel) {
            *s += v as f64;
        }
    }
    let n = (h * w) as f64;
    Tensor::vector(sums.into_iter().map(|s| (s / n) as f32).collect())
}
