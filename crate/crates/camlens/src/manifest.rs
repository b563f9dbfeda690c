//! JSON model manifests.
//!
//! ```json
//! {
//!   "name": "tiny",
//!   "input": {"height": 8, "width": 8, "channels": 3},
//!   "labels": ["a", "b"],
//!   "layers": [
//!     {"kind": "conv", "params": {"stride": 2, "padding": "same"},
//!      "weights": {"kernel": "conv0/kernel", "bias": "conv0/bias"}},
//!     {"kind": "activation", "params": {"activation": "relu6"}},
//!     {"kind": "global_average_pool"},
//!     {"kind": "dense", "weights": {"weights": "fc/weights", "bias": "fc/bias"}},
//!     {"kind": "softmax"}
//!   ]
//! }
//! ```

use std::collections::BTreeMap;

use camlens_core::kernels::Padding;
use camlens_core::model::InputShape;
use camlens_core::{ActivationKind, LayerSpec, ModelManifest};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

const DEFAULT_EPSILON: f32 = 1e-3;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    name: String,
    input: RawInput,
    labels: Vec<String>,
    layers: Vec<RawLayer>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    height: usize,
    width: usize,
    channels: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    kind: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    weights: BTreeMap<String, String>,
}

pub fn parse_manifest(text: &[u8]) -> Result<ModelManifest> {
    let raw: RawManifest = serde_json::from_slice(text)?;
    let layers = raw
        .layers
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            layer_from_raw(l).map_err(|e| match e {
                Error::Manifest(msg) => Error::Manifest(format!("layer {i}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelManifest {
        name: raw.name,
        input: InputShape {
            height: raw.input.height,
            width: raw.input.width,
            channels: raw.input.channels,
        },
        labels: raw.labels,
        layers,
    })
}

pub fn manifest_to_json(manifest: &ModelManifest) -> String {
    let raw = RawManifest {
        name: manifest.name.clone(),
        input: RawInput {
            height: manifest.input.height,
            width: manifest.input.width,
            channels: manifest.input.channels,
        },
        labels: manifest.labels.clone(),
        layers: manifest.layers.iter().map(layer_to_raw).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("manifest serializes")
}

fn layer_from_raw(raw: RawLayer) -> Result<LayerSpec> {
    let RawLayer {
        kind,
        params,
        mut weights,
    } = raw;
    let mut params = Params(params);
    let mut weight = |key: &str| {
        weights
            .remove(key)
            .ok_or_else(|| Error::Manifest(format!("{kind} layer needs weight `{key}`")))
    };
    let spec = match kind.as_str() {
        "conv" | "depthwise_conv" => {
            let stride = params.stride()?;
            let padding = params.padding()?;
            let kernel = weight("kernel")?;
            let bias = weights.remove("bias");
            if kind == "conv" {
                LayerSpec::Conv {
                    stride,
                    padding,
                    kernel,
                    bias,
                }
            } else {
                LayerSpec::DepthwiseConv {
                    stride,
                    padding,
                    kernel,
                    bias,
                }
            }
        }
        "batch_norm" => LayerSpec::BatchNorm {
            epsilon: params.epsilon()?,
            gamma: weight("gamma")?,
            beta: weight("beta")?,
            mean: weight("mean")?,
            variance: weight("variance")?,
        },
        "activation" => LayerSpec::Activation(params.activation()?),
        "global_average_pool" => LayerSpec::GlobalAveragePool,
        "dense" => {
            let w = weight("weights")?;
            LayerSpec::Dense {
                weights: w,
                bias: weights.remove("bias"),
            }
        }
        "softmax" => LayerSpec::Softmax,
        other => return Err(Error::Manifest(format!("unknown layer kind `{other}`"))),
    };
    if let Some(key) = params.0.keys().next() {
        return Err(Error::Manifest(format!(
            "unexpected param `{key}` for {kind} layer"
        )));
    }
    if let Some(key) = weights.keys().next() {
        return Err(Error::Manifest(format!(
            "unexpected weight `{key}` for {kind} layer"
        )));
    }
    Ok(spec)
}

fn layer_to_raw(spec: &LayerSpec) -> RawLayer {
    let mut params = Map::new();
    let mut weights = BTreeMap::new();
    match spec {
        LayerSpec::Conv {
            stride,
            padding,
            kernel,
            bias,
        }
        | LayerSpec::DepthwiseConv {
            stride,
            padding,
            kernel,
            bias,
        } => {
            params.insert("stride".into(), (*stride).into());
            let pad = match padding {
                Padding::Same => "same",
                Padding::Valid => "valid",
            };
            params.insert("padding".into(), pad.into());
            weights.insert("kernel".into(), kernel.clone());
            if let Some(b) = bias {
                weights.insert("bias".into(), b.clone());
            }
        }
        LayerSpec::BatchNorm {
            epsilon,
            gamma,
            beta,
            mean,
            variance,
        } => {
            params.insert("epsilon".into(), (*epsilon as f64).into());
            weights.insert("gamma".into(), gamma.clone());
            weights.insert("beta".into(), beta.clone());
            weights.insert("mean".into(), mean.clone());
            weights.insert("variance".into(), variance.clone());
        }
        LayerSpec::Activation(kind) => {
            params.insert("activation".into(), kind.as_str().into());
        }
        LayerSpec::Dense { weights: w, bias } => {
            weights.insert("weights".into(), w.clone());
            if let Some(b) = bias {
                weights.insert("bias".into(), b.clone());
            }
        }
        LayerSpec::GlobalAveragePool | LayerSpec::Softmax => {}
    }
    RawLayer {
        kind: spec.kind().to_owned(),
        params,
        weights,
    }
}

/// Layer params; each accessor consumes its key so leftovers can be reported.
struct Params(Map<String, Value>);

impl Params {
    fn stride(&mut self) -> Result<usize> {
        match self.0.remove("stride") {
            None => Ok(1),
            Some(v) => v
                .as_u64()
                .filter(|&s| s >= 1)
                .map(|s| s as usize)
                .ok_or_else(|| {
                    Error::Manifest(format!("stride must be a positive integer, got {v}"))
                }),
        }
    }

    fn padding(&mut self) -> Result<Padding> {
        match self.0.remove("padding") {
            None => Ok(Padding::Same),
            Some(v) => match v.as_str() {
                Some("same") => Ok(Padding::Same),
                Some("valid") => Ok(Padding::Valid),
                _ => Err(Error::Manifest(format!(
                    "padding must be \"same\" or \"valid\", got {v}"
                ))),
            },
        }
    }

    fn epsilon(&mut self) -> Result<f32> {
        match self.0.remove("epsilon") {
            None => Ok(DEFAULT_EPSILON),
            Some(v) => v
                .as_f64()
                .filter(|&e| e > 0.0)
                .map(|e| e as f32)
                .ok_or_else(|| Error::Manifest(format!("epsilon must be positive, got {v}"))),
        }
    }

    fn activation(&mut self) -> Result<ActivationKind> {
        match self.0.remove("activation") {
            Some(v) => match v.as_str() {
                Some("relu") => Ok(ActivationKind::Relu),
                Some("relu6") => Ok(ActivationKind::Relu6),
                _ => Err(Error::Manifest(format!(
                    "activation must be \"relu\" or \"relu6\", got {v}"
                ))),
            },
            None => Err(Error::Manifest(
                "activation layer needs param `activation`".into(),
            )),
        }
    }
}
