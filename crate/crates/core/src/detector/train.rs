use std::path::Path;

use super::features::{FeatureExtractor, FeatureVector};
use super::model::{logistic, ModelWeights};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            iterations: 20_000,
            l2: 1e-3,
        }
    }
}

const GRADIENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub weights: ModelWeights,
    /// Objective value before each update, plus the final value.
    pub loss_history: Vec<f64>,
    pub iterations: usize,
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean cross-entropy plus `l2/2 * |w|^2` (bias unpenalized), and its
/// gradient as `(d/d bias, d/d w)`.
pub fn loss_and_gradient(
    model: &ModelWeights,
    features: &[Vec<f64>],
    labels: &[bool],
    l2: f64,
) -> (f64, f64, Vec<f64>) {
    let n = features.len() as f64;
    let mut loss = 0.0;
    let mut grad_bias = 0.0;
    let mut grad = vec![0.0; model.weights.len()];
    for (x, &y) in features.iter().zip(labels) {
        let z = model.linear_predictor(x);
        // -[y ln p + (1-y) ln(1-p)] with p = logistic(z)
        loss += if y { softplus(-z) } else { softplus(z) };
        let residual = logistic(z) - if y { 1.0 } else { 0.0 };
        grad_bias += residual;
        for (g, xi) in grad.iter_mut().zip(x) {
            *g += residual * xi;
        }
    }
    loss /= n;
    grad_bias /= n;
    let mut penalty = 0.0;
    for (g, w) in grad.iter_mut().zip(&model.weights) {
        *g = *g / n + l2 * w;
        penalty += w * w;
    }
    (loss + 0.5 * l2 * penalty, grad_bias, grad)
}

/// Full-batch gradient descent from all-zero weights.
pub fn train_on_features(
    features: &[Vec<f64>],
    labels: &[bool],
    params: TrainParams,
    registry_version: &str,
) -> Result<TrainedModel> {
    if features.len() != labels.len() {
        return Err(Error::Input("features and labels differ in length".into()));
    }
    if features.len() < 2 || !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
        return Err(Error::Training(
            "corpus needs at least two examples covering both labels".into(),
        ));
    }
    let dim = features[0].len();
    if features.iter().any(|x| x.len() != dim) {
        return Err(Error::Input("ragged feature matrix".into()));
    }

    let mut model = ModelWeights::zeros(registry_version, dim);
    let mut history = Vec::with_capacity(params.iterations.min(100_000) + 1);
    let mut done = 0;
    for iteration in 0..=params.iterations {
        let (loss, grad_bias, grad) = loss_and_gradient(&model, features, labels, params.l2);
        if !loss.is_finite() {
            return Err(Error::Training(format!(
                "loss became {loss} at iteration {iteration} (learning rate {}); \
                 bias {}, max |w| {}",
                params.learning_rate,
                model.bias,
                model.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()))
            )));
        }
        history.push(loss);
        let max_grad = grad.iter().fold(grad_bias.abs(), |m, g| m.max(g.abs()));
        if iteration == params.iterations || max_grad < GRADIENT_TOLERANCE {
            break;
        }
        model.bias -= params.learning_rate * grad_bias;
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= params.learning_rate * g;
        }
        done = iteration + 1;
    }
    Ok(TrainedModel {
        weights: model,
        loss_history: history,
        iterations: done,
    })
}

/// Extracts features from each headline and trains on them.
pub fn train_logistic(
    extractor: &FeatureExtractor,
    corpus: &[(String, bool)],
    params: TrainParams,
) -> Result<TrainedModel> {
    let features = corpus
        .iter()
        .map(|(text, _)| extractor.extract(text).map(|fv: FeatureVector| fv.values))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<bool> = corpus.iter().map(|(_, l)| *l).collect();
    train_on_features(&features, &labels, params, extractor.registry_version())
}

/// Reads a `text,label` CSV with a header row; labels are 0 or 1.
pub fn load_labeled_csv(path: &Path) -> Result<Vec<(String, bool)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::file(path, io),
            other => Error::Input(format!("{}: {other:?}", path.display())),
        })?;
    let headers = reader.headers()?.clone();
    let text_col = headers.iter().position(|h| h == "text");
    let label_col = headers.iter().position(|h| h == "label");
    let (Some(text_col), Some(label_col)) = (text_col, label_col) else {
        return Err(Error::Input(format!(
            "{}: expected columns text,label",
            path.display()
        )));
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let label = match record.get(label_col).map(str::trim) {
            Some("1") => true,
            Some("0") => false,
            other => {
                return Err(Error::CsvLine {
                    line,
                    reason: format!("label must be 0 or 1, got {other:?}"),
                })
            }
        };
        let text = record.get(text_col).unwrap_or("");
        rows.push((crate::text::normalize_whitespace(text), label));
    }
    Ok(rows)
}
