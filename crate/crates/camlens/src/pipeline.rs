//! decode -> preprocess -> forward -> top-k -> CAM, shared by the CLI and
//! the service so both emit the same numbers.

use camlens_core::cam::class_activation_map;
use camlens_core::{
    preprocess, top_k, ClassActivationMap, ForwardResult, Model, Prediction, RgbImage,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub h: usize,
    pub w: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionJson {
    pub index: usize,
    pub label: String,
    pub probability: f32,
}

impl From<&Prediction> for PredictionJson {
    fn from(p: &Prediction) -> Self {
        PredictionJson {
            index: p.index,
            label: p.label.clone(),
            probability: p.probability,
        }
    }
}

/// Numeric result of classifying one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyPayload {
    pub grid: GridDims,
    pub predictions: Vec<PredictionJson>,
    /// Normalized CAM per prediction, row-major `h * w` values each.
    pub cams: Vec<Vec<f32>>,
}

pub struct Classification {
    pub forward: ForwardResult,
    pub predictions: Vec<Prediction>,
    pub cams: Vec<ClassActivationMap>,
}

impl Classification {
    pub fn payload(&self, grid: (usize, usize)) -> ClassifyPayload {
        ClassifyPayload {
            grid: GridDims {
                h: grid.0,
                w: grid.1,
            },
            predictions: self.predictions.iter().map(PredictionJson::from).collect(),
            cams: self
                .cams
                .iter()
                .map(|c| c.normalized.clone().expect("normalized above"))
                .collect(),
        }
    }
}

/// Runs the model on an image and computes a normalized CAM for each of the
/// `k` best classes. `k` is capped at the class count.
pub fn classify(model: &Model, image: &RgbImage, k: usize) -> Result<Classification> {
    let [h, w, _] = model.input_shape();
    let input = preprocess(image, h, w)?;
    let forward = model.forward(&input)?;
    let k = k.min(model.num_classes());
    if k == 0 {
        return Err(Error::InvalidRequest("top-k must be at least 1".into()));
    }
    let predictions = top_k(&forward.probabilities, model.labels(), k)?;
    let cams = predictions
        .iter()
        .map(|p| class_activation_map(model, &forward, p.index))
        .collect::<camlens_core::Result<Vec<_>>>()?;
    Ok(Classification {
        forward,
        predictions,
        cams,
    })
}
