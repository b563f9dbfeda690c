use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::kernels::Padding;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    Relu,
    Relu6,
}

impl ActivationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActivationKind::Relu => "relu",
            ActivationKind::Relu6 => "relu6",
        }
    }
}

/// One layer of a model, with the names of the weight tensors it binds.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    Conv {
        stride: usize,
        padding: Padding,
        kernel: String,
        bias: Option<String>,
    },
    DepthwiseConv {
        stride: usize,
        padding: Padding,
        kernel: String,
        bias: Option<String>,
    },
    BatchNorm {
        epsilon: f32,
        gamma: String,
        beta: String,
        mean: String,
        variance: String,
    },
    Activation(ActivationKind),
    GlobalAveragePool,
    Dense {
        weights: String,
        bias: Option<String>,
    },
    Softmax,
}

impl LayerSpec {
    /// Manifest spelling of the layer kind.
    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Conv { .. } => "conv",
            LayerSpec::DepthwiseConv { .. } => "depthwise_conv",
            LayerSpec::BatchNorm { .. } => "batch_norm",
            LayerSpec::Activation(_) => "activation",
            LayerSpec::GlobalAveragePool => "global_average_pool",
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Softmax => "softmax",
        }
    }

    /// Weight tensor names this layer references, in a fixed order.
    pub fn weight_names(&self) -> Vec<&str> {
        match self {
            LayerSpec::Conv { kernel, bias, .. }
            | LayerSpec::DepthwiseConv { kernel, bias, .. } => core::iter::once(kernel.as_str())
                .chain(bias.as_deref())
                .collect(),
            LayerSpec::BatchNorm {
                gamma,
                beta,
                mean,
                variance,
                ..
            } => alloc::vec![
                gamma.as_str(),
                beta.as_str(),
                mean.as_str(),
                variance.as_str()
            ],
            LayerSpec::Dense { weights, bias } => core::iter::once(weights.as_str())
                .chain(bias.as_deref())
                .collect(),
            LayerSpec::Activation(_) | LayerSpec::GlobalAveragePool | LayerSpec::Softmax => {
                Vec::new()
            }
        }
    }

    fn is_feature_layer(&self) -> bool {
        matches!(
            self,
            LayerSpec::Conv { .. }
                | LayerSpec::DepthwiseConv { .. }
                | LayerSpec::BatchNorm { .. }
                | LayerSpec::Activation(_)
        )
    }

    fn is_convolution(&self) -> bool {
        matches!(
            self,
            LayerSpec::Conv { .. } | LayerSpec::DepthwiseConv { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputShape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelManifest {
    pub name: String,
    pub input: InputShape,
    pub labels: Vec<String>,
    pub layers: Vec<LayerSpec>,
}

/// Why a layer sequence cannot produce class activation maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CamViolation {
    MissingClassifier,
    MultipleDense,
    MissingGlobalAveragePool,
    MultipleGlobalAveragePool,
    DenseBeforeGlobalAveragePool,
    PoolNotFeedingClassifier,
    MissingSoftmax,
    LayersAfterSoftmax,
    NoConvolution,
    UnexpectedFeatureLayer { index: usize, kind: &'static str },
}

impl fmt::Display for CamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CamViolation::MissingClassifier => f.write_str("missing dense classifier layer"),
            CamViolation::MultipleDense => f.write_str("multiple dense layers"),
            CamViolation::MissingGlobalAveragePool => {
                f.write_str("missing global average pool before classifier")
            }
            CamViolation::MultipleGlobalAveragePool => {
                f.write_str("multiple global average pool layers")
            }
            CamViolation::DenseBeforeGlobalAveragePool => {
                f.write_str("dense layer before global average pool")
            }
            CamViolation::PoolNotFeedingClassifier => {
                f.write_str("global average pool must feed the dense classifier directly")
            }
            CamViolation::MissingSoftmax => f.write_str("classifier must be followed by softmax"),
            CamViolation::LayersAfterSoftmax => f.write_str("layers after final softmax"),
            CamViolation::NoConvolution => f.write_str("no convolution before global average pool"),
            CamViolation::UnexpectedFeatureLayer { index, kind } => write!(
                f,
                "layer {index} ({kind}) is not allowed before global average pool"
            ),
        }
    }
}

/// Accepts exactly the `features -> global_average_pool -> dense -> softmax`
/// layout, with a single dense layer and at least one convolution feeding
/// the pool.
pub fn validate_cam_compatible(manifest: &ModelManifest) -> Result<(), CamViolation> {
    let layers = &manifest.layers;
    let dense: Vec<usize> = positions(layers, |l| matches!(l, LayerSpec::Dense { .. }));
    let pools: Vec<usize> = positions(layers, |l| matches!(l, LayerSpec::GlobalAveragePool));

    let classifier = match dense[..] {
        [] => return Err(CamViolation::MissingClassifier),
        [d] => d,
        _ => return Err(CamViolation::MultipleDense),
    };
    let pool = match pools[..] {
        [] => return Err(CamViolation::MissingGlobalAveragePool),
        [p] => p,
        _ => return Err(CamViolation::MultipleGlobalAveragePool),
    };
    if pool > classifier {
        return Err(CamViolation::DenseBeforeGlobalAveragePool);
    }
    if pool + 1 != classifier {
        return Err(CamViolation::PoolNotFeedingClassifier);
    }
    match layers.get(classifier + 1) {
        Some(LayerSpec::Softmax) => {}
        _ => return Err(CamViolation::MissingSoftmax),
    }
    if layers.len() > classifier + 2 {
        return Err(CamViolation::LayersAfterSoftmax);
    }
    if let Some((index, layer)) = layers[..pool]
        .iter()
        .enumerate()
        .find(|(_, l)| !l.is_feature_layer())
    {
        return Err(CamViolation::UnexpectedFeatureLayer {
            index,
            kind: layer.kind(),
        });
    }
    if !layers[..pool].iter().any(LayerSpec::is_convolution) {
        return Err(CamViolation::NoConvolution);
    }
    Ok(())
}

fn positions(layers: &[LayerSpec], pred: impl Fn(&LayerSpec) -> bool) -> Vec<usize> {
    layers
        .iter()
        .enumerate()
        .filter(|(_, l)| pred(l))
        .map(|(i, _)| i)
        .collect()
}
