//! Core numerics for camlens.
//!
//! Everything in this crate is pure computation over owned buffers: the
//! layer kernels a CAM-compatible CNN needs, the model runtime that binds
//! a declarative layer list to weights and runs it, the class activation
//! map math, and model-input preprocessing. It needs `alloc` but not `std`,
//! so file formats, image codecs and the service live in the `camlens`
//! crate.

#![cfg_attr(not(test), no_std)]
// kernels index several buffers in lockstep
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod cam;
pub mod error;
pub mod image;
pub mod kernels;
pub mod model;
pub mod tensor;

pub use cam::{
    compute_cam, normalize_cam, render_overlay, threshold_mask, CamMask, ClassActivationMap,
};
pub use error::{Error, Result};
pub use image::{preprocess, RgbImage};
pub use model::{
    top_k, validate_cam_compatible, ActivationKind, CamViolation, ForwardResult, LayerSpec, Model,
    ModelManifest, Prediction, WeightStore,
};
pub use tensor::Tensor;

/// Number of predictions shown to the user by default.
pub const DEFAULT_TOP_K: usize = 3;
/// Default display threshold applied to normalized CAM grids.
pub const DEFAULT_THRESHOLD: f32 = 0.6;
/// Default blend factor for the red overlay blocks.
pub const DEFAULT_ALPHA: f32 = 0.45;
