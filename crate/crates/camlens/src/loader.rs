use std::fs;
use std::path::Path;

use camlens_core::Model;

use crate::error::Result;
use crate::manifest::{manifest_to_json, parse_manifest};
use crate::weights::{decode_weights, encode_weights};

/// Parses a JSON manifest and a `CAMW` blob, validates the architecture and
/// binds every weight.
pub fn load_model(manifest_text: &[u8], weights_blob: &[u8]) -> Result<Model> {
    let manifest = parse_manifest(manifest_text)?;
    let weights = decode_weights(weights_blob)?;
    Ok(Model::new(manifest, &weights)?)
}

pub fn load_model_files(manifest: &Path, weights: &Path) -> Result<Model> {
    let text = fs::read(manifest)?;
    let blob = fs::read(weights)?;
    load_model(&text, &blob)
}

/// `(manifest JSON, weight blob)` for a loaded model.
pub fn serialize_model(model: &Model) -> (String, Vec<u8>) {
    (
        manifest_to_json(model.manifest()),
        encode_weights(&model.export_weights()),
    )
}
