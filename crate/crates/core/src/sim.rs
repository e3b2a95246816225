//! Seeded generators for synthetic series: white noise, stationary AR(p)
//! errors, random walks and segmented interrupted-time-series responses.
//! Used by the tests, the benchmarks and the `simulate` command.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const BURN_IN: usize = 1000;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("finite, non-negative standard deviation")
}

pub fn white_noise(n: usize, sd: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let dist = normal(sd);
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

/// Zero-mean AR(p) with innovation standard deviation `sd`, started far
/// enough back that the initial transient is negligible.
pub fn ar_process(phi: &[f64], sd: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let dist = normal(sd);
    let p = phi.len();
    let total = n + BURN_IN + p;
    let mut x = vec![0.0; total];
    for t in p..total {
        let mut v = dist.sample(&mut rng);
        for (i, c) in phi.iter().enumerate() {
            v += c * x[t - 1 - i];
        }
        x[t] = v;
    }
    x.split_off(total - n)
}

pub fn random_walk(n: usize, sd: f64, seed: u64) -> Vec<f64> {
    let mut level = 0.0;
    white_noise(n, sd, seed)
        .into_iter()
        .map(|e| {
            level += e;
            level
        })
        .collect()
}

/// `intercept + trend*T + step*D + slope_change*P + errors` with the event at
/// 0-based observation `event_index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentedTruth {
    pub intercept: f64,
    pub trend: f64,
    pub step: f64,
    pub slope_change: f64,
}

impl SegmentedTruth {
    pub fn as_array(&self) -> [f64; 4] {
        [self.intercept, self.trend, self.step, self.slope_change]
    }
}

pub fn segmented_response(truth: SegmentedTruth, event_index: usize, errors: &[f64]) -> Vec<f64> {
    errors
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let t = (i + 1) as f64;
            let (d, p) = if i >= event_index {
                (1.0, (i - event_index + 1) as f64)
            } else {
                (0.0, 0.0)
            };
            truth.intercept + truth.trend * t + truth.step * d + truth.slope_change * p + e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(white_noise(10, 1.0, 3), white_noise(10, 1.0, 3));
        assert_ne!(white_noise(10, 1.0, 3), white_noise(10, 1.0, 4));
        assert_eq!(ar_process(&[0.5], 1.0, 7, 1).len(), 7);
    }

    #[test]
    fn segmented_columns() {
        let truth = SegmentedTruth {
            intercept: 1.0,
            trend: 0.0,
            step: 10.0,
            slope_change: 100.0,
        };
        let y = segmented_response(truth, 2, &[0.0; 4]);
        assert_eq!(y, vec![1.0, 1.0, 111.0, 211.0]);
    }
}
