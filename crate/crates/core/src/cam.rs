//! Class activation maps.
//!
//! For a model whose last convolutional volume `f_k(x, y)` is globally
//! average-pooled and fed to a single dense classifier with weights
//! `w[k][c]`, the map for class `c` is `M_c(x, y) = sum_k w[k][c] f_k(x, y)`.
//! Its spatial mean equals the class logit minus the classifier bias.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{shape_err, Error, Result};
use crate::image::RgbImage;
use crate::model::{ForwardResult, Model};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassActivationMap {
    pub class_index: usize,
    pub height: usize,
    pub width: usize,
    /// Row-major `M_c` values, unrectified.
    pub raw: Vec<f32>,
    /// Min-max scaled copy of `raw` in `[0, 1]`, once normalized.
    pub normalized: Option<Vec<f32>>,
}

/// Boolean grid of CAM cells at or above a display threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CamMask {
    pub height: usize,
    pub width: usize,
    pub cells: Vec<bool>,
}

impl CamMask {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.width + col]
    }

    pub fn active_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Weighted sum of activation channels for one class; the bias is left out.
pub fn compute_cam(
    activations: &Tensor,
    classifier_weights: &Tensor,
    class_index: usize,
) -> Result<ClassActivationMap> {
    let (h, w, k) = activations.dims3()?;
    let (wk, classes) = match classifier_weights.shape() {
        [a, b] => (*a, *b),
        s => {
            return Err(shape_err(format!(
                "classifier weights must be rank 2, got {s:?}"
            )))
        }
    };
    if wk != k {
        return Err(shape_err(format!(
            "classifier expects {wk} feature channels, activations have {k}"
        )));
    }
    if class_index >= classes {
        return Err(Error::InvalidArgument(format!(
            "class index {class_index} out of range for {classes} classes"
        )));
    }
    let column: Vec<f64> = classifier_weights
        .data()
        .chunks_exact(classes)
        .map(|row| row[class_index] as f64)
        .collect();
    let raw = activations
        .data()
        .chunks_exact(k)
        .map(|cell| {
            cell.iter()
                .zip(&column)
                .map(|(&a, &w)| a as f64 * w)
                .sum::<f64>() as f32
        })
        .collect();
    Ok(ClassActivationMap {
        class_index,
        height: h,
        width: w,
        raw,
        normalized: None,
    })
}

/// `(raw - min) / (max - min)`; a constant grid normalizes to all zeros.
pub fn normalize_cam(mut cam: ClassActivationMap) -> ClassActivationMap {
    let (min, max) = cam
        .raw
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let normalized = if max > min {
        let (lo, span) = (min as f64, max as f64 - min as f64);
        cam.raw
            .iter()
            .map(|&v| ((v as f64 - lo) / span) as f32)
            .collect()
    } else {
        alloc::vec![0.0; cam.raw.len()]
    };
    cam.normalized = Some(normalized);
    cam
}

/// Cells whose normalized value is at least `t`.
pub fn threshold_mask(cam: &ClassActivationMap, t: f32) -> Result<CamMask> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in [0, 1], got {t}"
        )));
    }
    let normalized = cam
        .normalized
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("CAM has not been normalized".into()))?;
    Ok(CamMask {
        height: cam.height,
        width: cam.width,
        cells: normalized.iter().map(|&v| v >= t).collect(),
    })
}

/// Pixel rows (or columns) covered by grid cell `cell` of `cells`.
///
/// Cell `i` spans `[floor(i * n / cells), floor((i + 1) * n / cells))`, so the
/// blocks tile the image exactly.
pub fn block_span(cell: usize, cells: usize, pixels: usize) -> core::ops::Range<usize> {
    (cell * pixels / cells)..((cell + 1) * pixels / cells)
}

/// Blends active mask cells toward pure red:
/// `out = round((1 - alpha) * pixel + alpha * (255, 0, 0))`.
/// Pixels in inactive cells are left untouched.
pub fn render_overlay(image: &RgbImage, mask: &CamMask, alpha: f32) -> Result<RgbImage> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if mask.height == 0 || mask.width == 0 || mask.cells.len() != mask.height * mask.width {
        return Err(shape_err("mask grid is empty or inconsistent"));
    }
    let a = alpha as f64;
    let blend = |p: u8, target: f64| libm::round((1.0 - a) * p as f64 + a * target) as u8;
    let (w, h) = (image.width(), image.height());
    let mut out = image.clone();
    let px = out.pixels_mut();
    for row in 0..mask.height {
        for col in 0..mask.width {
            if !mask.get(row, col) {
                continue;
            }
            for y in block_span(row, mask.height, h) {
                for x in block_span(col, mask.width, w) {
                    let i = (y * w + x) * 3;
                    px[i] = blend(px[i], 255.0);
                    px[i + 1] = blend(px[i + 1], 0.0);
                    px[i + 2] = blend(px[i + 2], 0.0);
                }
            }
        }
    }
    Ok(out)
}

/// Normalized CAM for `class_index` from a forward pass of `model`.
pub fn class_activation_map(
    model: &Model,
    result: &ForwardResult,
    class_index: usize,
) -> Result<ClassActivationMap> {
    let cam = compute_cam(
        &result.last_conv_activations,
        model.classifier_weights(),
        class_index,
    )?;
    Ok(normalize_cam(cam))
}
