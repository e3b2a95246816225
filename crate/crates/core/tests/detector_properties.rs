use proptest::prelude::*;

use clickbait_its::detector::{classify, score, FEATURE_NAMES, REGISTRY_VERSION};
use clickbait_its::text::normalize_whitespace;
use clickbait_its::{Detector, FeatureExtractor, FeatureVector, Label, ModelWeights};

fn model(bias: f64, weights: Vec<f64>) -> ModelWeights {
    ModelWeights { registry_version: REGISTRY_VERSION.into(), bias, weights }
}

fn features(values: Vec<f64>) -> FeatureVector {
    FeatureVector { values, registry_version: REGISTRY_VERSION.into() }
}

fn arrays() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, FEATURE_NAMES.len())
}

proptest! {
    #[test]
    fn positive_weight_increase_raises_score(
        bias in -2.0f64..2.0,
        weights in arrays(),
        x in arrays(),
        k in 0usize..FEATURE_NAMES.len(),
        delta in 0.01f64..5.0,
    ) {
        let mut weights = weights;
        weights[k] = weights[k].abs() + 0.05;
        let m = model(bias, weights);
        let before = score(&features(x.clone()), &m).unwrap();
        let mut bumped = x;
        bumped[k] += delta;
        let after = score(&features(bumped), &m).unwrap();
        prop_assert!(after.score_1 > before.score_1);
    }

    #[test]
    fn classify_follows_the_logit_sign(
        bias in -3.0f64..3.0,
        weights in arrays(),
        x in arrays(),
        threshold in 0.05f64..0.95,
    ) {
        let m = model(bias, weights);
        let s = score(&features(x.clone()), &m).unwrap();
        let margin = m.linear_predictor(&x) - (threshold / (1.0 - threshold)).ln();
        prop_assume!(margin.abs() > 1e-9);
        let expected = if margin > 0.0 { Label::Clickbait } else { Label::NotClickbait };
        prop_assert_eq!(classify(s, threshold), expected);
        prop_assert_eq!(s.score_1 + s.score_2, 1.0);
    }

    #[test]
    fn extraction_is_deterministic_and_finite(raw in "[ -~\u{e9}\u{fc}\u{4e00}]{1,80}") {
        let text = normalize_whitespace(&raw);
        prop_assume!(!text.is_empty());
        let extractor = FeatureExtractor::default();
        let a = extractor.extract(&text).unwrap();
        let b = extractor.extract(&text).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.values.len(), FEATURE_NAMES.len());
        prop_assert!(a.values.iter().all(|v| v.is_finite()));
        let (_, s) = Detector::default().score_text(&text).unwrap();
        prop_assert!((0.0..=1.0).contains(&s.score_1));
    }
}
