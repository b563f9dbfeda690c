use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{shape_err, Result};

/// Dense row-major `f32` array.
///
/// Activations are rank 3 in `(height, width, channels)` order; pooled
/// features and logits are rank 1. Weight tensors use whatever rank their
/// layer needs (conv kernels are rank 4, classifier matrices rank 2).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        if shape.is_empty() {
            return Err(shape_err("tensor rank must be at least 1"));
        }
        if shape.contains(&0) {
            return Err(shape_err(format!(
                "tensor dims must be positive, got {shape:?}"
            )));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(shape_err(format!(
                "shape {shape:?} needs {len} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let len = shape.iter().product();
        Tensor::new(shape, vec![0.0; len])
    }

    pub fn filled(shape: Vec<usize>, value: f32) -> Result<Self> {
        let len = shape.iter().product();
        Tensor::new(shape, vec![value; len])
    }

    pub fn vector(data: Vec<f32>) -> Result<Self> {
        Tensor::new(vec![data.len()], data)
    }

    pub fn hwc(height: usize, width: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        Tensor::new(vec![height, width, channels], data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    /// `(height, width, channels)` of a rank-3 tensor.
    pub fn dims3(&self) -> Result<(usize, usize, usize)> {
        match self.shape[..] {
            [h, w, c] => Ok((h, w, c)),
            _ => Err(shape_err(format!(
                "expected rank-3 (h, w, c) tensor, got shape {:?}",
                self.shape
            ))),
        }
    }

    pub fn dims1(&self) -> Result<usize> {
        match self.shape[..] {
            [n] => Ok(n),
            _ => Err(shape_err(format!(
                "expected rank-1 tensor, got shape {:?}",
                self.shape
            ))),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}
