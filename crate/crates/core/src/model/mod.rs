//! Declarative CAM-compatible models: manifest types, architecture
//! validation, weight binding, the forward pass and top-k ranking.

mod manifest;
mod predict;
mod runtime;

pub use manifest::{
    validate_cam_compatible, ActivationKind, CamViolation, InputShape, LayerSpec, ModelManifest,
};
pub use predict::{top_k, Prediction};
pub use runtime::{ForwardResult, LayerSummary, Model, WeightStore};
