//! File formats, image codecs, the capture store, the HTTP service and the
//! CLI built on top of `camlens-core`.

pub mod cli;
pub mod codec;
pub mod compare;
pub mod error;
pub mod fixtures;
pub mod loader;
pub mod manifest;
pub mod pipeline;
pub mod service;
pub mod store;
pub mod weights;

pub use error::{Error, Result};
pub use loader::{load_model, load_model_files, serialize_model};
