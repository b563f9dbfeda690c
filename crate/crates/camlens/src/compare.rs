//! Side-by-side comparison of two captures, e.g. the same object with one
//! factor changed between shots.

use camlens_core::cam::class_activation_map;
use camlens_core::Model;
use serde::{Deserialize, Serialize};

use crate::codec::decode_image;
use crate::error::{Error, Result};
use crate::pipeline::{classify, GridDims};
use crate::store::{CaptureRecord, CaptureStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDelta {
    pub index: usize,
    pub label: String,
    pub probability_a: f32,
    pub probability_b: f32,
    /// `probability_b - probability_a`
    pub delta: f32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankChange {
    pub index: usize,
    pub label: String,
    /// 1-based rank in the top predictions, if present.
    pub rank_a: Option<usize>,
    pub rank_b: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: String,
    pub b: String,
    /// The class of interest.
    pub class: ClassDelta,
    pub grid: GridDims,
    /// Per-cell `normalized_b - normalized_a` for the class of interest.
    pub cam_difference: Vec<f32>,
    /// Deltas for every class in either capture's top predictions.
    pub class_deltas: Vec<ClassDelta>,
    pub rank_changes: Vec<RankChange>,
}

pub fn compare_captures(
    store: &CaptureStore,
    model: &Model,
    id_a: &str,
    id_b: &str,
    class_index: usize,
) -> Result<ComparisonReport> {
    let a = store.get(id_a)?;
    let b = store.get(id_b)?;
    let classes = model.num_classes();
    if class_index >= classes {
        return Err(Error::InvalidRequest(format!(
            "class {class_index} out of range for {classes} classes"
        )));
    }
    for r in [&a, &b] {
        if r.probabilities.len() != classes {
            return Err(Error::Store(format!(
                "capture `{}` was made with a different model",
                r.id
            )));
        }
    }
    let delta = |index: usize| ClassDelta {
        index,
        label: model.labels()[index].clone(),
        probability_a: a.probabilities[index],
        probability_b: b.probabilities[index],
        delta: b.probabilities[index] - a.probabilities[index],
    };

    let cam_a = cam_for(store, model, &a, class_index)?;
    let cam_b = cam_for(store, model, &b, class_index)?;
    let cam_difference = cam_b.iter().zip(&cam_a).map(|(y, x)| y - x).collect();

    let mut union: Vec<usize> = a.predictions.iter().map(|p| p.index).collect();
    for p in &b.predictions {
        if !union.contains(&p.index) {
            union.push(p.index);
        }
    }
    let rank = |r: &CaptureRecord, index: usize| {
        r.predictions
            .iter()
            .position(|p| p.index == index)
            .map(|i| i + 1)
    };
    let rank_changes = union
        .iter()
        .filter_map(|&index| {
            let (rank_a, rank_b) = (rank(&a, index), rank(&b, index));
            (rank_a != rank_b).then(|| RankChange {
                index,
                label: model.labels()[index].clone(),
                rank_a,
                rank_b,
            })
        })
        .collect();

    Ok(ComparisonReport {
        a: a.id.clone(),
        b: b.id.clone(),
        class: delta(class_index),
        grid: a.grid,
        cam_difference,
        class_deltas: union.iter().map(|&i| delta(i)).collect(),
        rank_changes,
    })
}

/// The stored grid when the class was among the capture's predictions,
/// otherwise recomputed from the stored image (inference is deterministic).
fn cam_for(
    store: &CaptureStore,
    model: &Model,
    record: &CaptureRecord,
    class: usize,
) -> Result<Vec<f32>> {
    if let Some(i) = record.predictions.iter().position(|p| p.index == class) {
        return Ok(record.cam_grids[i].clone());
    }
    let bytes = std::fs::read(store.image_path(record))?;
    let image = decode_image(&bytes)?;
    let forward = classify(model, &image, 1)?.forward;
    let cam = class_activation_map(model, &forward, class)?;
    Ok(cam.normalized.expect("normalized"))
}
