use alloc::format;

use crate::error::{shape_err, Error, Result};
use crate::tensor::Tensor;

/// Inference-mode batch normalization parameters, one entry per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormParams {
    pub gamma: Tensor,
    pub beta: Tensor,
    pub mean: Tensor,
    pub variance: Tensor,
    pub epsilon: f32,
}

/// `y = gamma * (x - mean) / sqrt(variance + epsilon) + beta`, channel-wise
/// over the last axis.
pub fn batch_norm(input: &Tensor, params: &BatchNormParams) -> Result<Tensor> {
    if params.epsilon.is_nan() || params.epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "batch norm epsilon must be positive, got {}",
            params.epsilon
        )));
    }
    let c = *input.shape().last().expect("tensor rank >= 1");
    for (name, t) in [
        ("gamma", &params.gamma),
        ("beta", &params.beta),
        ("mean", &params.mean),
        ("variance", &params.variance),
    ] {
        if t.shape() != [c] {
            return Err(shape_err(format!(
                "batch norm {name} must have shape [{c}], got {:?}",
                t.shape()
            )));
        }
    }
    let eps = params.epsilon as f64;
    let (gamma, beta, mean, var) = (
        params.gamma.data(),
        params.beta.data(),
        params.mean.data(),
        params.variance.data(),
    );
    let mut out = input.clone();
    for pixel in out.data_mut().chunks_exact_mut(c) {
        for k in 0..c {
            let x = pixel[k] as f64;
            let y = gamma[k] as f64 * (x - mean[k] as f64) / libm::sqrt(var[k] as f64 + eps)
                + beta[k] as f64;
            pixel[k] = y as f32;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params(c: usize, gamma: f32, beta: f32, mean: f32, var: f32, eps: f32) -> BatchNormParams {
        BatchNormParams {
            gamma: Tensor::filled(vec![c], gamma).unwrap(),
            beta: Tensor::filled(vec![c], beta).unwrap(),
            mean: Tensor::filled(vec![c], mean).unwrap(),
            variance: Tensor::filled(vec![c], var).unwrap(),
            epsilon: eps,
        }
    }

    #[test]
    fn unit_params_are_identity() {
        let x = Tensor::hwc(2, 2, 2, vec![1.0, -2.0, 3.0, 0.5, 0.0, 9.0, -7.5, 1e-3]).unwrap();
        let y = batch_norm(&x, &params(2, 1.0, 0.0, 0.0, 1.0, 1e-12)).unwrap();
        for (a, b) in x.data().iter().zip(y.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_gamma_gives_beta() {
        let x = Tensor::hwc(1, 3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let mut p = params(2, 0.0, 0.0, 0.3, 2.0, 1e-3);
        p.beta = Tensor::vector(vec![0.25, -4.0]).unwrap();
        let y = batch_norm(&x, &p).unwrap();
        for px in y.data().chunks(2) {
            assert_eq!(px, &[0.25, -4.0]);
        }
    }

    #[test]
    fn rejects_bad_epsilon_and_lengths() {
        let x = Tensor::zeros(vec![2, 2, 3]).unwrap();
        assert!(matches!(
            batch_norm(&x, &params(3, 1.0, 0.0, 0.0, 1.0, 0.0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            batch_norm(&x, &params(2, 1.0, 0.0, 0.0, 1.0, 1e-3)),
            Err(Error::Shape(_))
        ));
    }
}
