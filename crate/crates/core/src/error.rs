use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::CamViolation;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Tensor shapes or lengths do not line up.
    Shape(String),
    /// A scalar argument is outside its allowed range.
    InvalidArgument(String),
    /// The manifest references a weight tensor the weight store lacks.
    MissingWeight(String),
    /// A weight tensor exists but has the wrong shape.
    WeightShape {
        name: String,
        expected: Vec<usize>,
        actual: Vec<usize>,
    },
    /// The layer sequence cannot produce class activation maps.
    CamIncompatible(CamViolation),
    /// The image handed to `forward` does not match the manifest input.
    InputShape {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::MissingWeight(name) => write!(f, "missing weight tensor `{name}`"),
            Error::WeightShape {
                name,
                expected,
                actual,
            } => write!(
                f,
                "weight tensor `{name}` has shape {actual:?}, expected {expected:?}"
            ),
            Error::CamIncompatible(v) => write!(f, "model is not CAM-compatible: {v}"),
            Error::InputShape { expected, actual } => write!(
                f,
                "input shape mismatch: expected {expected:?}, got {actual:?}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn shape_err(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
