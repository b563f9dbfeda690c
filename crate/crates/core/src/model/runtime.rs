use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::manifest::{validate_cam_compatible, ActivationKind, LayerSpec, ModelManifest};
use crate::error::{shape_err, Error, Result};
use crate::kernels::{self, BatchNormParams, ConvParams};
use crate::tensor::Tensor;

/// Named weight tensors, as stored in a weight blob.
pub type WeightStore = BTreeMap<String, Tensor>;

#[derive(Debug, Clone)]
enum BoundLayer {
    Conv(ConvParams),
    Depthwise(ConvParams),
    BatchNorm(BatchNormParams),
    Activation(ActivationKind),
    GlobalAveragePool,
    Dense,
    Softmax,
}

/// Per-layer row of a model summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSummary {
    pub kind: &'static str,
    pub output_shape: Vec<usize>,
    pub parameters: usize,
}

/// Output of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardResult {
    /// Pre-softmax class scores.
    pub logits: Tensor,
    pub probabilities: Tensor,
    /// The `(h, w, k)` volume that fed the global average pool.
    pub last_conv_activations: Tensor,
}

/// A validated model with all weights bound. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Model {
    manifest: ModelManifest,
    layers: Vec<BoundLayer>,
    summaries: Vec<LayerSummary>,
    classifier_weights: Tensor,
    classifier_bias: Tensor,
    feature_shape: (usize, usize, usize),
}

impl Model {
    /// Validates the architecture and binds every referenced weight,
    /// checking shapes layer by layer.
    pub fn new(manifest: ModelManifest, weights: &WeightStore) -> Result<Model> {
        validate_cam_compatible(&manifest).map_err(Error::CamIncompatible)?;
        let input = manifest.input;
        if input.height == 0 || input.width == 0 || input.channels == 0 {
            return Err(shape_err("manifest input dims must be positive"));
        }
        if manifest.labels.is_empty() {
            return Err(shape_err("manifest has no labels"));
        }

        let mut shape = vec![input.height, input.width, input.channels];
        let mut layers = Vec::with_capacity(manifest.layers.len());
        let mut summaries = Vec::with_capacity(manifest.layers.len());
        let mut classifier = None;
        let mut feature_shape = None;

        for spec in &manifest.layers {
            let (bound, parameters) = match spec {
                LayerSpec::Conv {
                    stride,
                    padding,
                    kernel,
                    bias,
                } => {
                    let k = fetch(weights, kernel)?;
                    let [kh, kw, _, co] = rank4(kernel, k)?;
                    expect_shape(kernel, k, &[kh, kw, shape[2], co])?;
                    let b = fetch_bias(weights, bias.as_deref(), co)?;
                    let params = ConvParams::new(k.clone(), b, *stride, *padding)?;
                    shape = conv_shape(&shape, kh, kw, co, &params)?;
                    let n = k.len() + bias.as_ref().map_or(0, |_| co);
                    (BoundLayer::Conv(params), n)
                }
                LayerSpec::DepthwiseConv {
                    stride,
                    padding,
                    kernel,
                    bias,
                } => {
                    let k = fetch(weights, kernel)?;
                    let [kh, kw, _, _] = rank4(kernel, k)?;
                    let c = shape[2];
                    expect_shape(kernel, k, &[kh, kw, c, 1])?;
                    let b = fetch_bias(weights, bias.as_deref(), c)?;
                    let params = ConvParams::new(k.clone(), b, *stride, *padding)?;
                    shape = conv_shape(&shape, kh, kw, c, &params)?;
                    let n = k.len() + bias.as_ref().map_or(0, |_| c);
                    (BoundLayer::Depthwise(params), n)
                }
                LayerSpec::BatchNorm {
                    epsilon,
                    gamma,
                    beta,
                    mean,
                    variance,
                } => {
                    if epsilon.is_nan() || *epsilon <= 0.0 {
                        return Err(Error::InvalidArgument(format!(
                            "batch norm epsilon must be positive, got {epsilon}"
                        )));
                    }
                    let c = shape[2];
                    let per_channel = |name: &str| -> Result<Tensor> {
                        let t = fetch(weights, name)?;
                        expect_shape(name, t, &[c])?;
                        Ok(t.clone())
                    };
                    let params = BatchNormParams {
                        gamma: per_channel(gamma)?,
                        beta: per_channel(beta)?,
                        mean: per_channel(mean)?,
                        variance: per_channel(variance)?,
                        epsilon: *epsilon,
                    };
                    (BoundLayer::BatchNorm(params), 4 * c)
                }
                LayerSpec::Activation(kind) => (BoundLayer::Activation(*kind), 0),
                LayerSpec::GlobalAveragePool => {
                    feature_shape = Some((shape[0], shape[1], shape[2]));
                    shape = vec![shape[2]];
                    (BoundLayer::GlobalAveragePool, 0)
                }
                LayerSpec::Dense {
                    weights: wname,
                    bias,
                } => {
                    let w = fetch(weights, wname)?;
                    let classes = manifest.labels.len();
                    expect_shape(wname, w, &[shape[0], classes])?;
                    let b = fetch_bias(weights, bias.as_deref(), classes)?;
                    let n = w.len() + bias.as_ref().map_or(0, |_| classes);
                    classifier = Some((w.clone(), b));
                    shape = vec![classes];
                    (BoundLayer::Dense, n)
                }
                LayerSpec::Softmax => (BoundLayer::Softmax, 0),
            };
            layers.push(bound);
            summaries.push(LayerSummary {
                kind: spec.kind(),
                output_shape: shape.clone(),
                parameters,
            });
        }

        // validation guarantees exactly one pool and one dense layer
        let (classifier_weights, classifier_bias) = classifier.expect("validated classifier");
        let feature_shape = feature_shape.expect("validated pool");
        Ok(Model {
            manifest,
            layers,
            summaries,
            classifier_weights,
            classifier_bias,
            feature_shape,
        })
    }

    pub fn manifest(&self) -> &ModelManifest {
        &self.manifest
    }

    pub fn labels(&self) -> &[String] {
        &self.manifest.labels
    }

    /// `(height, width, channels)` the model expects.
    pub fn input_shape(&self) -> [usize; 3] {
        let i = self.manifest.input;
        [i.height, i.width, i.channels]
    }

    /// Classifier matrix `(K, C)`: row `k` holds the weights of feature
    /// channel `k` for every class.
    pub fn classifier_weights(&self) -> &Tensor {
        &self.classifier_weights
    }

    pub fn classifier_bias(&self) -> &Tensor {
        &self.classifier_bias
    }

    /// Channel count K of the last convolutional volume.
    pub fn feature_channels(&self) -> usize {
        self.feature_shape.2
    }

    /// Class count C.
    pub fn num_classes(&self) -> usize {
        self.manifest.labels.len()
    }

    /// Spatial `(height, width)` of the CAM grid.
    pub fn cam_grid(&self) -> (usize, usize) {
        (self.feature_shape.0, self.feature_shape.1)
    }

    pub fn layer_summaries(&self) -> &[LayerSummary] {
        &self.summaries
    }

    pub fn parameter_count(&self) -> usize {
        self.summaries.iter().map(|s| s.parameters).sum()
    }

    /// Rebuilds the weight store from the bound layers, keyed by the
    /// manifest's tensor names. Absent biases are not materialized.
    pub fn export_weights(&self) -> WeightStore {
        let mut store = WeightStore::new();
        for (spec, bound) in self.manifest.layers.iter().zip(&self.layers) {
            match (spec, bound) {
                (
                    LayerSpec::Conv { kernel, bias, .. }
                    | LayerSpec::DepthwiseConv { kernel, bias, .. },
                    BoundLayer::Conv(p) | BoundLayer::Depthwise(p),
                ) => {
                    store.insert(kernel.clone(), p.kernel.clone());
                    if let Some(b) = bias {
                        store.insert(b.clone(), p.bias.clone());
                    }
                }
                (
                    LayerSpec::BatchNorm {
                        gamma,
                        beta,
                        mean,
                        variance,
                        ..
                    },
                    BoundLayer::BatchNorm(p),
                ) => {
                    store.insert(gamma.clone(), p.gamma.clone());
                    store.insert(beta.clone(), p.beta.clone());
                    store.insert(mean.clone(), p.mean.clone());
                    store.insert(variance.clone(), p.variance.clone());
                }
                (LayerSpec::Dense { weights, bias }, BoundLayer::Dense) => {
                    store.insert(weights.clone(), self.classifier_weights.clone());
                    if let Some(b) = bias {
                        store.insert(b.clone(), self.classifier_bias.clone());
                    }
                }
                _ => {}
            }
        }
        store
    }

    /// Runs every layer in order, keeping the volume that enters the
    /// global average pool.
    pub fn forward(&self, image: &Tensor) -> Result<ForwardResult> {
        let expected = self.input_shape();
        if image.shape() != expected {
            return Err(Error::InputShape {
                expected: expected.to_vec(),
                actual: image.shape().to_vec(),
            });
        }
        if !image.is_finite() {
            return Err(Error::InvalidArgument(
                "input contains non-finite values".into(),
            ));
        }

        let mut x = image.clone();
        let mut activations = None;
        let mut logits = None;
        for layer in &self.layers {
            x = match layer {
                BoundLayer::Conv(p) => kernels::conv2d(&x, p)?,
                BoundLayer::Depthwise(p) => kernels::depthwise_conv2d(&x, p)?,
                BoundLayer::BatchNorm(p) => kernels::batch_norm(&x, p)?,
                BoundLayer::Activation(kind) => kernels::activation(&x, *kind),
                BoundLayer::GlobalAveragePool => {
                    let pooled = kernels::global_average_pool(&x)?;
                    activations = Some(x);
                    pooled
                }
                BoundLayer::Dense => {
                    let out = kernels::dense(&x, &self.classifier_weights, &self.classifier_bias)?;
                    logits = Some(out.clone());
                    out
                }
                BoundLayer::Softmax => kernels::softmax(&x)?,
            };
        }
        Ok(ForwardResult {
            logits: logits.expect("validated classifier"),
            probabilities: x,
            last_conv_activations: activations.expect("validated pool"),
        })
    }
}

fn fetch<'a>(weights: &'a WeightStore, name: &str) -> Result<&'a Tensor> {
    weights
        .get(name)
        .ok_or_else(|| Error::MissingWeight(name.into()))
}

fn fetch_bias(weights: &WeightStore, name: Option<&str>, len: usize) -> Result<Tensor> {
    match name {
        Some(name) => {
            let b = fetch(weights, name)?;
            expect_shape(name, b, &[len])?;
            Ok(b.clone())
        }
        None => Tensor::zeros(vec![len]),
    }
}

fn rank4(name: &str, t: &Tensor) -> Result<[usize; 4]> {
    match t.shape() {
        [a, b, c, d] => Ok([*a, *b, *c, *d]),
        s => Err(shape_err(format!(
            "weight tensor `{name}` must be rank 4, got shape {s:?}"
        ))),
    }
}

fn expect_shape(name: &str, t: &Tensor, expected: &[usize]) -> Result<()> {
    if t.shape() != expected {
        return Err(Error::WeightShape {
            name: name.into(),
            expected: expected.to_vec(),
            actual: t.shape().to_vec(),
        });
    }
    Ok(())
}

fn conv_shape(
    input: &[usize],
    kh: usize,
    kw: usize,
    out_channels: usize,
    params: &ConvParams,
) -> Result<Vec<usize>> {
    let (oh, _) = kernels::output_geometry(input[0], kh, params.stride, params.padding)?;
    let (ow, _) = kernels::output_geometry(input[1], kw, params.stride, params.padding)?;
    Ok(vec![oh, ow, out_channels])
}
