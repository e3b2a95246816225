//! Feature-based logistic clickbait detector.
//!
//! A headline is mapped to a fixed-order lexical [`FeatureVector`], scored
//! with a logistic linear model, and optionally thresholded into a [`Label`].
//! The model file bundles the weights with the phrase lexicon used by the
//! lexicon-hit feature so a model is always scored with the lexicon it was
//! trained against.

mod features;
mod model;
mod train;

pub use features::{FeatureExtractor, FeatureVector, FEATURE_NAMES, REGISTRY_VERSION};
pub use model::{
    classify, evaluate, logistic, score, ClickbaitScore, Detector, Label, ModelWeights,
    DEFAULT_THRESHOLD,
};
pub use train::{
    load_labeled_csv, loss_and_gradient, train_logistic, train_on_features, TrainParams,
    TrainedModel,
};
