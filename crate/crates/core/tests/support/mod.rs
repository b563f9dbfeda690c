#![allow(dead_code)]

pub mod oracle;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f32, hi: f32) -> Vec<f32> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

use camlens_core::kernels::Padding;
use camlens_core::model::InputShape;
use camlens_core::{ActivationKind, LayerSpec, ModelManifest, Tensor, WeightStore};

/// 8x8x3 input, two convolutions, 4 classes, random weights.
pub fn tiny_random_model(seed: u64) -> (ModelManifest, WeightStore) {
    let mut r = rng(seed);
    let mut w = WeightStore::new();
    let mut put = |name: &str, shape: Vec<usize>, lo: f32, hi: f32, r: &mut ChaCha8Rng| {
        let n = shape.iter().product();
        w.insert(
            name.into(),
            Tensor::new(shape, uniform(r, n, lo, hi)).unwrap(),
        );
    };
    put("c1/k", vec![3, 3, 3, 6], -0.5, 0.5, &mut r);
    put("c1/b", vec![6], -0.1, 0.1, &mut r);
    put("bn/gamma", vec![6], 0.5, 1.5, &mut r);
    put("bn/beta", vec![6], -0.2, 0.2, &mut r);
    put("bn/mean", vec![6], -0.1, 0.1, &mut r);
    put("bn/var", vec![6], 0.5, 2.0, &mut r);
    put("c2/k", vec![3, 3, 6, 5], -0.5, 0.5, &mut r);
    put("c2/b", vec![5], -0.1, 0.1, &mut r);
    put("fc/w", vec![5, 4], -1.0, 1.0, &mut r);
    put("fc/b", vec![4], -0.3, 0.3, &mut r);
    let manifest = ModelManifest {
        name: format!("random-{seed}"),
        input: InputShape {
            height: 8,
            width: 8,
            channels: 3,
        },
        labels: (0..4).map(|i| format!("class {i}")).collect(),
        layers: vec![
            LayerSpec::Conv {
                stride: 2,
                padding: Padding::Same,
                kernel: "c1/k".into(),
                bias: Some("c1/b".into()),
            },
            LayerSpec::BatchNorm {
                epsilon: 1e-3,
                gamma: "bn/gamma".into(),
                beta: "bn/beta".into(),
                mean: "bn/mean".into(),
                variance: "bn/var".into(),
            },
            LayerSpec::Activation(ActivationKind::Relu6),
            LayerSpec::Conv {
                stride: 1,
                padding: Padding::Valid,
                kernel: "c2/k".into(),
                bias: Some("c2/b".into()),
            },
            LayerSpec::Activation(ActivationKind::Relu),
            LayerSpec::GlobalAveragePool,
            LayerSpec::Dense {
                weights: "fc/w".into(),
                bias: Some("fc/b".into()),
            },
            LayerSpec::Softmax,
        ],
    };
    (manifest, w)
}

/// Straight-line evaluation of `tiny_random_model` with the naive oracles.
/// Returns (logits, last conv activations).
pub fn tiny_random_forward(w: &WeightStore, image: &[f32]) -> (Vec<f64>, oracle::Volume) {
    let d = |n: &str| w[n].data();
    let x = oracle::Volume::from_f32(8, 8, 3, image);
    let x = oracle::conv2d(&x, d("c1/k"), 3, 3, 6, d("c1/b"), 2, true);
    let x = oracle::batch_norm(
        &x,
        d("bn/gamma"),
        d("bn/beta"),
        d("bn/mean"),
        d("bn/var"),
        1e-3,
    );
    let x = oracle::relu6(&x);
    let x = oracle::conv2d(&x, d("c2/k"), 3, 3, 5, d("c2/b"), 1, false);
    let x = oracle::relu(&x);
    let pooled = oracle::gap(&x);
    (oracle::matvec(&pooled, d("fc/w"), 4, d("fc/b")), x)
}
