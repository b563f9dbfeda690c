mod support;

use camlens_core::cam::class_activation_map;
use camlens_core::kernels::{dense, global_average_pool};
use camlens_core::{compute_cam, top_k, Error, Model, Tensor};
use support::oracle::{self, max_abs_diff};
use support::{rng, tiny_random_forward, tiny_random_model, uniform};

#[test]
fn forward_matches_straight_line_oracle() {
    for seed in 0..10 {
        let (m, w) = tiny_random_model(seed);
        let model = Model::new(m, &w).unwrap();
        assert_eq!(model.cam_grid(), (2, 2));
        assert_eq!(model.feature_channels(), 5);
        assert_eq!(model.num_classes(), 4);
        let mut r = rng(100 + seed);
        let image = uniform(&mut r, 8 * 8 * 3, -1.0, 1.0);
        let got = model
            .forward(&Tensor::hwc(8, 8, 3, image.clone()).unwrap())
            .unwrap();
        let (logits, act) = tiny_random_forward(&w, &image);
        assert!(
            max_abs_diff(got.logits.data(), &logits) <= 1e-4,
            "seed {seed}"
        );
        assert!(max_abs_diff(got.last_conv_activations.data(), &act.data) <= 1e-4);
        let probs = oracle::softmax(&logits);
        assert!(max_abs_diff(got.probabilities.data(), &probs) <= 1e-5);
    }
}

#[test]
fn captured_activations_reproduce_logits() {
    let (m, w) = tiny_random_model(3);
    let model = Model::new(m, &w).unwrap();
    let mut r = rng(7);
    for _ in 0..20 {
        let x = Tensor::hwc(8, 8, 3, uniform(&mut r, 192, -1.0, 1.0)).unwrap();
        let out = model.forward(&x).unwrap();
        let pooled = global_average_pool(&out.last_conv_activations).unwrap();
        let again = dense(&pooled, model.classifier_weights(), model.classifier_bias()).unwrap();
        let want: Vec<f64> = out.logits.data().iter().map(|&v| v as f64).collect();
        assert!(max_abs_diff(again.data(), &want) <= 1e-5);

        let sum: f64 = out.probabilities.data().iter().map(|&p| p as f64).sum();
        assert!((sum - 1.0).abs() <= 1e-6);

        let all = top_k(&out.probabilities, model.labels(), 4).unwrap();
        let mut idx: Vec<usize> = all.iter().map(|p| p.index).collect();
        assert!(all.windows(2).all(|p| p[0].probability >= p[1].probability));
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2, 3]);
    }
}

#[test]
fn cam_mean_equals_logit_minus_bias() {
    let (m, w) = tiny_random_model(4);
    let model = Model::new(m, &w).unwrap();
    let mut r = rng(8);
    let x = Tensor::hwc(8, 8, 3, uniform(&mut r, 192, -1.0, 1.0)).unwrap();
    let out = model.forward(&x).unwrap();
    for c in 0..4 {
        let cam = compute_cam(&out.last_conv_activations, model.classifier_weights(), c).unwrap();
        let (h, wd, k) = out.last_conv_activations.dims3().unwrap();
        let act = oracle::Volume::from_f32(h, wd, k, out.last_conv_activations.data());
        let want = oracle::cam(&act, model.classifier_weights().data(), 4, c);
        assert!(max_abs_diff(&cam.raw, &want) <= 1e-5);
        let mean = cam.raw.iter().map(|&v| v as f64).sum::<f64>() / cam.raw.len() as f64;
        let expect = out.logits.data()[c] as f64 - model.classifier_bias().data()[c] as f64;
        assert!((mean - expect).abs() <= 1e-5);

        let normalized = class_activation_map(&model, &out, c).unwrap();
        assert_eq!(normalized.raw, cam.raw);
        assert!(normalized.normalized.is_some());
    }
}

#[test]
fn forward_rejects_wrong_input() {
    let (m, w) = tiny_random_model(0);
    let model = Model::new(m, &w).unwrap();
    let err = model
        .forward(&Tensor::zeros(vec![8, 8, 1]).unwrap())
        .unwrap_err();
    assert!(matches!(err, Error::InputShape { .. }));
    assert!(err.to_string().contains("[8, 8, 3]"));
    let nan = Tensor::filled(vec![8, 8, 3], f32::NAN).unwrap();
    assert!(model.forward(&nan).is_err());
}

#[test]
fn mis_shaped_weight_is_reported() {
    let (m, mut w) = tiny_random_model(0);
    w.insert("c2/k".into(), Tensor::zeros(vec![3, 3, 4, 5]).unwrap());
    match Model::new(m, &w) {
        Err(Error::WeightShape {
            name,
            expected,
            actual,
        }) => {
            assert_eq!(name, "c2/k");
            assert_eq!(expected, vec![3, 3, 6, 5]);
            assert_eq!(actual, vec![3, 3, 4, 5]);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn summaries_report_shapes_and_parameters() {
    let (m, w) = tiny_random_model(0);
    let model = Model::new(m, &w).unwrap();
    let shapes: Vec<_> = model
        .layer_summaries()
        .iter()
        .map(|s| (s.kind, s.output_shape.clone(), s.parameters))
        .collect();
    assert_eq!(
        shapes,
        vec![
            ("conv", vec![4, 4, 6], 3 * 3 * 3 * 6 + 6),
            ("batch_norm", vec![4, 4, 6], 24),
            ("activation", vec![4, 4, 6], 0),
            ("conv", vec![2, 2, 5], 3 * 3 * 6 * 5 + 5),
            ("activation", vec![2, 2, 5], 0),
            ("global_average_pool", vec![5], 0),
            ("dense", vec![4], 5 * 4 + 4),
            ("softmax", vec![4], 0),
        ]
    );
}
