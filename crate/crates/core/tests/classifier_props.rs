use proptest::prelude::*;
use skelact_core::classifier::{
    decide, train_ova, vote, FrameDecision, LinearOvaModel, LinearSvm, Prediction, TrainConfig,
};
use skelact_core::metrics::compute_metrics;
use skelact_core::FeatureVector;

fn sample(values: Vec<f64>, label: u32) -> FeatureVector {
    FeatureVector {
        values,
        frame_index: 0,
        true_label: Some(label),
    }
}

/// Class `c` sits near the `c`-th unit vector, with bounded noise.
fn separable() -> impl Strategy<Value = Vec<FeatureVector>> {
    (2usize..5, 3usize..12).prop_flat_map(|(m, per)| {
        prop::collection::vec(prop::collection::vec(-0.2f64..0.2, m), m * per).prop_map(
            move |noise| {
                noise
                    .into_iter()
                    .enumerate()
                    .map(|(i, mut v)| {
                        let c = i % m;
                        v[c] += 1.0;
                        sample(v, c as u32 + 1)
                    })
                    .collect()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn separable_data_is_fit_exactly(data in separable(), seed in 0u64..1000) {
        let cfg = TrainConfig { seed, ..TrainConfig::default() };
        let model = train_ova(&data, &cfg).unwrap();
        for s in &data {
            let d = model.classify_frame(s).unwrap();
            prop_assert_eq!(d.label, Prediction::Class(s.true_label.unwrap()));
        }
    }

    #[test]
    fn training_is_deterministic(data in separable(), seed in 0u64..1000) {
        let cfg = TrainConfig { seed, ..TrainConfig::default() };
        let a = train_ova(&data, &cfg).unwrap();
        let b = train_ova(&data, &cfg).unwrap();
        for (x, y) in a.svms().iter().zip(b.svms()) {
            prop_assert_eq!(x.bias.to_bits(), y.bias.to_bits());
            for (u, v) in x.weights.iter().zip(&y.weights) {
                prop_assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn scores_are_affine_in_the_input(
        w in prop::collection::vec(-2.0f64..2.0, 4),
        b in -1.0f64..1.0,
        x in prop::collection::vec(-2.0f64..2.0, 4),
        y in prop::collection::vec(-2.0f64..2.0, 4),
        t in -3.0f64..3.0,
    ) {
        let svm = LinearSvm { weights: w, bias: b };
        let mix: Vec<f64> = x.iter().zip(&y).map(|(a, c)| a + t * c).collect();
        let lhs = svm.score(&mix) - b;
        let rhs = (svm.score(&x) - b) + t * (svm.score(&y) - b);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn all_negative_scores_reject(scores in prop::collection::vec(-10.0f64..-1e-9, 1..8)) {
        let classes: Vec<u32> = (1..=scores.len() as u32).collect();
        prop_assert_eq!(decide(&classes, &scores), Prediction::Background);
    }

    #[test]
    fn decision_invariant_under_positive_scaling(
        scores in prop::collection::vec(-5.0f64..5.0, 1..8),
        k in 0.01f64..100.0,
    ) {
        let classes: Vec<u32> = (1..=scores.len() as u32).collect();
        let scaled: Vec<f64> = scores.iter().map(|s| s * k).collect();
        prop_assert_eq!(decide(&classes, &scores), decide(&classes, &scaled));
    }

    #[test]
    fn rates_sum_to_one(pairs in prop::collection::vec((1u32..5, 0u32..5), 1..60)) {
        let classes = [1, 2, 3, 4];
        let decisions: Vec<(u32, Prediction)> = pairs
            .into_iter()
            .map(|(t, p)| (t, if p == 0 { Prediction::Background } else { Prediction::Class(p) }))
            .collect();
        let report = compute_metrics(&classes, &decisions).unwrap();
        for c in report.per_class.iter().filter(|c| c.samples > 0) {
            let r = c.rates;
            prop_assert!((r.recognition + r.error + r.miss - 1.0).abs() <= 1e-12);
        }
        let a = report.average;
        prop_assert!((a.recognition + a.error + a.miss - 1.0).abs() <= 1e-12);
    }
}

fn frame(label: Prediction, scores: &[f64]) -> FrameDecision {
    FrameDecision {
        label,
        scores: scores.to_vec(),
    }
}

#[test]
fn equal_scores_go_to_the_lower_index() {
    assert_eq!(decide(&[4, 7, 9], &[0.5, 0.5, 0.2]), Prediction::Class(4));
    assert_eq!(decide(&[4, 7, 9], &[0.1, 0.5, 0.5]), Prediction::Class(7));
    assert_eq!(decide(&[4, 7], &[0.0, 0.0]), Prediction::Background);
}

#[test]
fn vote_ties_use_mean_score_then_index() {
    let c = [1, 2, 3];
    let frames = [
        frame(Prediction::Class(1), &[0.4, 0.1, -1.0]),
        frame(Prediction::Class(2), &[0.1, 0.9, -1.0]),
        frame(Prediction::Background, &[-0.1, -0.1, -1.0]),
        frame(Prediction::Background, &[-0.1, -0.1, -1.0]),
        frame(Prediction::Background, &[-0.1, -0.1, -1.0]),
    ];
    let d = vote(&c, &frames).unwrap();
    assert_eq!(d.label, Prediction::Class(2));
    assert_eq!(d.class_votes, vec![1, 1, 0]);
    assert_eq!(d.background_votes, 3);

    let even = [
        frame(Prediction::Class(3), &[0.0, 0.0, 0.5]),
        frame(Prediction::Class(1), &[0.5, 0.0, 0.0]),
    ];
    assert_eq!(vote(&c, &even).unwrap().label, Prediction::Class(1));

    let none = [frame(Prediction::Background, &[-1.0, -1.0, -1.0])];
    assert_eq!(vote(&c, &none).unwrap().label, Prediction::Background);
}

#[test]
fn model_json_round_trip() {
    let data: Vec<_> = (0..20)
        .map(|i| sample(vec![(i % 2) as f64, 0.1 * i as f64], (i % 2) as u32 + 1))
        .collect();
    let m = train_ova(&data, &TrainConfig::default()).unwrap();
    assert_eq!(LinearOvaModel::from_json(&m.to_json()).unwrap(), m);
}

#[test]
fn training_needs_two_classes() {
    let data = vec![sample(vec![1.0], 1), sample(vec![2.0], 1)];
    assert!(train_ova(&data, &TrainConfig::default()).is_err());
}
