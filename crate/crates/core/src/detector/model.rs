use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{parse_lexicon, FeatureExtractor, FeatureVector, DEFAULT_LEXICON};
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

const DEFAULT_MODEL: &str = include_str!("../../data/default_model.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelWeights {
    pub registry_version: String,
    pub bias: f64,
    pub weights: Vec<f64>,
}

impl ModelWeights {
    pub fn zeros(registry_version: &str, len: usize) -> Self {
        Self {
            registry_version: registry_version.to_string(),
            bias: 0.0,
            weights: vec![0.0; len],
        }
    }

    pub fn linear_predictor(&self, values: &[f64]) -> f64 {
        self.bias
            + self
                .weights
                .iter()
                .zip(values)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }

    fn check(&self) -> Result<()> {
        if !self.bias.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("model weights must be finite".into()));
        }
        Ok(())
    }
}

/// `score_1` is the clickbait probability; `score_2 = 1 - score_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickbaitScore {
    pub score_1: f64,
    pub score_2: f64,
}

impl ClickbaitScore {
    pub fn from_probability(p: f64) -> Self {
        let score_1 = p.clamp(0.0, 1.0);
        Self {
            score_1,
            score_2: 1.0 - score_1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Clickbait,
    NotClickbait,
}

/// Numerically stable `1 / (1 + exp(-z))`.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn score(features: &FeatureVector, model: &ModelWeights) -> Result<ClickbaitScore> {
    if features.registry_version != model.registry_version {
        return Err(Error::Config(format!(
            "feature registry {:?} does not match model registry {:?}",
            features.registry_version, model.registry_version
        )));
    }
    if features.values.len() != model.weights.len() {
        return Err(Error::Config(format!(
            "{} features but {} weights",
            features.values.len(),
            model.weights.len()
        )));
    }
    Ok(ClickbaitScore::from_probability(logistic(
        model.linear_predictor(&features.values),
    )))
}

/// Clickbait iff `score_1 >= threshold`.
pub fn classify(score: ClickbaitScore, threshold: f64) -> Label {
    if score.score_1 >= threshold {
        Label::Clickbait
    } else {
        Label::NotClickbait
    }
}

/// Fraction of examples whose label is predicted correctly.
pub fn evaluate(
    model: &ModelWeights,
    examples: &[(FeatureVector, bool)],
    threshold: f64,
) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::Input("evaluation corpus is empty".into()));
    }
    let mut correct = 0usize;
    for (features, is_clickbait) in examples {
        let predicted = classify(score(features, model)?, threshold) == Label::Clickbait;
        if predicted == *is_clickbait {
            correct += 1;
        }
    }
    Ok(correct as f64 / examples.len() as f64)
}

/// On-disk model: weights plus the lexicon phrases they were trained with.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    registry_version: String,
    bias: f64,
    weights: Vec<f64>,
    lexicon: Vec<String>,
}

/// A feature extractor paired with the weights trained against it.
#[derive(Debug, Clone)]
pub struct Detector {
    pub extractor: FeatureExtractor,
    pub model: ModelWeights,
}

impl Default for Detector {
    fn default() -> Self {
        Self::from_json(DEFAULT_MODEL).expect("bundled model is valid")
    }
}

impl Detector {
    pub fn new(extractor: FeatureExtractor, model: ModelWeights) -> Result<Self> {
        model.check()?;
        if model.registry_version != extractor.registry_version() {
            return Err(Error::Config(format!(
                "model registry {:?} is not {:?}",
                model.registry_version,
                extractor.registry_version()
            )));
        }
        if model.weights.len() != extractor.len() {
            return Err(Error::Config(format!(
                "model has {} weights, registry has {} features",
                model.weights.len(),
                extractor.len()
            )));
        }
        Ok(Self { extractor, model })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("model file: {e}")))?;
        let lexicon = if file.lexicon.is_empty() {
            parse_lexicon(DEFAULT_LEXICON)
        } else {
            file.lexicon
        };
        Self::new(
            FeatureExtractor::with_lexicon(lexicon),
            ModelWeights {
                registry_version: file.registry_version,
                bias: file.bias,
                weights: file.weights,
            },
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            registry_version: self.model.registry_version.clone(),
            bias: self.model.bias,
            weights: self.model.weights.clone(),
            lexicon: self.extractor.lexicon().to_vec(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::file(path, e))
    }

    pub fn score_text(&self, headline: &str) -> Result<(FeatureVector, ClickbaitScore)> {
        let features = self.extractor.extract(headline)?;
        let s = score(&features, &self.model)?;
        Ok((features, s))
    }
}
