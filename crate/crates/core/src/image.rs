use alloc::format;
use alloc::vec::Vec;

use crate::error::{shape_err, Error, Result};
use crate::kernels::resize_bilinear;
use crate::tensor::Tensor;

/// 8-bit RGB image, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(shape_err("image dims must be positive"));
        }
        if pixels.len() != width * height * 3 {
            return Err(shape_err(format!(
                "{width}x{height} RGB image needs {} bytes, got {}",
                width * height * 3,
                pixels.len()
            )));
        }
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        f: impl Fn(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        RgbImage::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    /// `(height, width, 3)` tensor of the raw 0..=255 byte values.
    pub fn to_tensor(&self) -> Tensor {
        let data = self.pixels.iter().map(|&b| b as f32).collect();
        Tensor::hwc(self.height, self.width, 3, data).expect("dims checked at construction")
    }
}

/// Resizes to the model input size and maps each byte `v` to
/// `v / 127.5 - 1`, so values land in `[-1, 1]`.
pub fn preprocess(image: &RgbImage, target_h: usize, target_w: usize) -> Result<Tensor> {
    if target_h == 0 || target_w == 0 {
        return Err(Error::InvalidArgument(
            "preprocess target dims must be positive".into(),
        ));
    }
    let resized = resize_bilinear(&image.to_tensor(), target_h, target_w)?;
    Ok(resized.map(|v| v / 127.5 - 1.0))
}
