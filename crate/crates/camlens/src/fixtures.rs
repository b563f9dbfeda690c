//! Deterministic synthetic models.
//!
//! `tiny_model` is the desk-scale fixture shipped under `fixtures/tiny`: an
//! 8x8x3 input reduced to a 2x2 CAM grid over 6 feature channels and 4
//! classes. Its last pointwise convolution pins feature channel 0 to a
//! constant 4.0 and only class 0 reads that channel, so class 0 wins for
//! every input.
//!
//! `reference_scale_model` mirrors the geometry of a MobileNet-style
//! classifier (224x224x3 input, 7x7 grid, 1000 classes) with random
//! weights and far fewer channels, for shape and timing checks.

use camlens_core::kernels::Padding;
use camlens_core::model::InputShape;
use camlens_core::{
    ActivationKind, LayerSpec, Model, ModelManifest, RgbImage, Tensor, WeightStore,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TINY_SEED: u64 = 0x00CA_3E45;
pub const REFERENCE_SEED: u64 = 224;
pub const TINY_LABELS: [&str; 4] = ["remote control", "digital watch", "running shoe", "sandal"];

struct Builder {
    rng: ChaCha8Rng,
    layers: Vec<LayerSpec>,
    weights: WeightStore,
    channels: usize,
}

impl Builder {
    fn new(seed: u64, channels: usize) -> Builder {
        Builder {
            rng: ChaCha8Rng::seed_from_u64(seed),
            layers: Vec::new(),
            weights: WeightStore::new(),
            channels,
        }
    }

    /// Uniform in `[lo, hi)` from the top 24 bits of one draw.
    fn uniform(&mut self, lo: f32, hi: f32) -> f32 {
        let unit = (self.rng.next_u32() >> 8) as f32 / (1u32 << 24) as f32;
        lo + (hi - lo) * unit
    }

    fn tensor(&mut self, shape: Vec<usize>, lo: f32, hi: f32) -> Tensor {
        let n = shape.iter().product();
        let data = (0..n).map(|_| self.uniform(lo, hi)).collect();
        Tensor::new(shape, data).expect("generated shape")
    }

    fn put(&mut self, name: String, t: Tensor) -> String {
        self.weights.insert(name.clone(), t);
        name
    }

    fn conv(&mut self, name: &str, k: usize, out: usize, stride: usize) -> (String, String) {
        let fan_in = (k * k * self.channels) as f32;
        let bound = (3.0 / fan_in).sqrt();
        let kernel = self.tensor(vec![k, k, self.channels, out], -bound, bound);
        let bias = self.tensor(vec![out], -0.1, 0.1);
        let kn = self.put(format!("{name}/kernel"), kernel);
        let bn = self.put(format!("{name}/bias"), bias);
        self.layers.push(LayerSpec::Conv {
            stride,
            padding: Padding::Same,
            kernel: kn.clone(),
            bias: Some(bn.clone()),
        });
        self.channels = out;
        (kn, bn)
    }

    fn depthwise(&mut self, name: &str, stride: usize) {
        let c = self.channels;
        let kernel = self.tensor(vec![3, 3, c, 1], -0.6, 0.6);
        let bias = self.tensor(vec![c], -0.1, 0.1);
        let kernel = self.put(format!("{name}/kernel"), kernel);
        let bias = self.put(format!("{name}/bias"), bias);
        self.layers.push(LayerSpec::DepthwiseConv {
            stride,
            padding: Padding::Same,
            kernel,
            bias: Some(bias),
        });
    }

    fn batch_norm(&mut self, name: &str) {
        let c = self.channels;
        let gamma = self.tensor(vec![c], 0.8, 1.2);
        let beta = self.tensor(vec![c], -0.1, 0.1);
        let mean = self.tensor(vec![c], -0.1, 0.1);
        let variance = self.tensor(vec![c], 0.5, 1.5);
        let layer = LayerSpec::BatchNorm {
            epsilon: 1e-3,
            gamma: self.put(format!("{name}/gamma"), gamma),
            beta: self.put(format!("{name}/beta"), beta),
            mean: self.put(format!("{name}/moving_mean"), mean),
            variance: self.put(format!("{name}/moving_variance"), variance),
        };
        self.layers.push(layer);
    }

    fn relu6(&mut self) {
        self.layers
            .push(LayerSpec::Activation(ActivationKind::Relu6));
    }

    fn classifier(&mut self, weights: Tensor, bias: Tensor) {
        self.layers.push(LayerSpec::GlobalAveragePool);
        let w = self.put("classifier/weights".into(), weights);
        let b = self.put("classifier/bias".into(), bias);
        self.layers.push(LayerSpec::Dense {
            weights: w,
            bias: Some(b),
        });
        self.layers.push(LayerSpec::Softmax);
    }

    fn finish(
        self,
        name: &str,
        input: InputShape,
        labels: Vec<String>,
    ) -> (ModelManifest, WeightStore) {
        let manifest = ModelManifest {
            name: name.into(),
            input,
            labels,
            layers: self.layers,
        };
        (manifest, self.weights)
    }
}

/// Manifest and weights of the shipped desk-scale fixture.
pub fn tiny_model_parts() -> (ModelManifest, WeightStore) {
    let mut b = Builder::new(TINY_SEED, 3);
    b.conv("stem", 3, 8, 2);
    b.batch_norm("stem/bn");
    b.relu6();
    b.depthwise("block1/depthwise", 2);
    b.batch_norm("block1/depthwise_bn");
    b.relu6();
    let (kernel, bias) = b.conv("block1/pointwise", 1, 6, 1);
    b.relu6();

    // feature channel 0 ignores its input and sits at relu6(4.0) = 4.0
    let k = b.weights.get_mut(&kernel).unwrap();
    for row in k.data_mut().chunks_exact_mut(6) {
        row[0] = 0.0;
    }
    b.weights.get_mut(&bias).unwrap().data_mut()[0] = 4.0;

    // class 0 reads channel 0 with weight 1.5; every other weight is
    // below 0.05 in magnitude, so logit_0 >= 6 - 5*6*0.05 - 0.05 = 4.45
    // while the rest stay <= 5*6*0.05 + 0.05 = 1.55
    let mut w = b.tensor(vec![6, 4], -0.05, 0.05);
    let data = w.data_mut();
    data[..4].copy_from_slice(&[1.5, 0.0, 0.0, 0.0]);
    let bias = b.tensor(vec![4], -0.05, 0.05);
    b.classifier(w, bias);

    let input = InputShape {
        height: 8,
        width: 8,
        channels: 3,
    };
    b.finish(
        "camlens-tiny",
        input,
        TINY_LABELS.iter().map(|s| s.to_string()).collect(),
    )
}

pub fn tiny_model() -> Model {
    let (m, w) = tiny_model_parts();
    Model::new(m, &w).expect("fixture is valid")
}

/// 32x24 test card: horizontal red ramp, vertical green ramp, and a blue
/// square in the lower right.
pub fn tiny_image() -> RgbImage {
    RgbImage::from_fn(32, 24, |x, y| {
        let blue = if (18..28).contains(&x) && (12..22).contains(&y) {
            220
        } else {
            30
        };
        [(x * 8) as u8, (y * 10) as u8, blue]
    })
    .expect("fixture dims")
}

/// MobileNet-shaped random model: 224x224x3 input, five stride-2 stages
/// down to a 7x7x`width * 16` volume, `classes` outputs.
pub fn reference_scale_parts(seed: u64, classes: usize) -> (ModelManifest, WeightStore) {
    let mut b = Builder::new(seed, 3);
    b.conv("stem", 3, 8, 2);
    b.batch_norm("stem/bn");
    b.relu6();
    let blocks = [(1, 16), (2, 32), (2, 64), (2, 64), (2, 128)];
    for (i, (stride, out)) in blocks.into_iter().enumerate() {
        b.depthwise(&format!("block{i}/depthwise"), stride);
        b.batch_norm(&format!("block{i}/depthwise_bn"));
        b.relu6();
        b.conv(&format!("block{i}/pointwise"), 1, out, 1);
        b.batch_norm(&format!("block{i}/pointwise_bn"));
        b.relu6();
    }
    let k = b.channels;
    let w = b.tensor(vec![k, classes], -0.1, 0.1);
    let bias = b.tensor(vec![classes], -0.01, 0.01);
    b.classifier(w, bias);
    let input = InputShape {
        height: 224,
        width: 224,
        channels: 3,
    };
    let labels = (0..classes).map(|i| format!("class_{i:04}")).collect();
    b.finish("camlens-reference-scale", input, labels)
}

pub fn reference_scale_model() -> Model {
    let (m, w) = reference_scale_parts(REFERENCE_SEED, 1000);
    Model::new(m, &w).expect("generated model is valid")
}
