use std::io;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] camlens_core::Error),
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("invalid manifest JSON: {0}")]
    ManifestJson(#[from] serde_json::Error),
    #[error("invalid weight blob: {0}")]
    Weights(String),
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error("cannot encode image: {0}")]
    Encode(String),
    #[error("capture store: {0}")]
    Store(String),
    #[error("unknown capture `{0}`")]
    UnknownCapture(String),
    #[error("unknown tag `{0}` (expected impressive, funny, puzzling or none)")]
    UnknownTag(String),
    #[error("{0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
