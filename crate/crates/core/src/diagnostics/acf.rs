use std::fmt::Write as _;

use super::validate_series;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AcfResult {
    pub lags: Vec<usize>,
    pub coefficients: Vec<f64>,
    /// Half-width of the approximate 95% white-noise band, `1.96 / sqrt(n)`.
    pub confidence_band: f64,
}

impl AcfResult {
    /// `lag,coefficient` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,coefficient\n");
        for (lag, c) in self.lags.iter().zip(&self.coefficients) {
            let _ = writeln!(out, "{lag},{c:.6}");
        }
        out
    }

    pub fn coefficient(&self, lag: usize) -> Option<f64> {
        self.lags
            .iter()
            .position(|&l| l == lag)
            .map(|i| self.coefficients[i])
    }
}

fn check_lags(series: &[f64], max_lag: usize) -> Result<()> {
    validate_series(series, 2)?;
    if max_lag >= series.len() {
        return Err(Error::Input(format!(
            "max_lag {max_lag} must be below the series length {}",
            series.len()
        )));
    }
    Ok(())
}

/// Sample autocorrelations `r_0..=r_max_lag` with the biased (divide by `n`)
/// autocovariance.
pub fn acf(series: &[f64], max_lag: usize) -> Result<AcfResult> {
    check_lags(series, max_lag)?;
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let denom: f64 = centered.iter().map(|d| d * d).sum();
    if denom == 0.0 || series.iter().all(|v| *v == series[0]) {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    let coefficients = (0..=max_lag)
        .map(|k| {
            let s: f64 = centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum();
            s / denom
        })
        .collect();
    Ok(AcfResult {
        lags: (0..=max_lag).collect(),
        coefficients,
        confidence_band: 1.96 / (n as f64).sqrt(),
    })
}

/// Output of the Durbin-Levinson recursion over autocorrelations `r_0..r_K`.
#[derive(Debug, Clone)]
pub struct DurbinLevinson {
    /// Partial autocorrelations for lags `1..=K`.
    pub pacf: Vec<f64>,
    /// Order-`K` prediction coefficients.
    pub phi: Vec<f64>,
    /// Normalized prediction error variances for orders `0..=K`.
    pub variances: Vec<f64>,
}

/// Durbin-Levinson recursion. `r[0]` must be 1.
pub fn durbin_levinson(r: &[f64]) -> Result<DurbinLevinson> {
    let order = r.len().saturating_sub(1);
    let mut phi: Vec<f64> = Vec::with_capacity(order);
    let mut pacf = Vec::with_capacity(order);
    let mut variances = Vec::with_capacity(order + 1);
    let mut v = 1.0;
    variances.push(v);
    for k in 1..=order {
        if v <= 1e-14 {
            return Err(Error::Numerical(format!(
                "prediction error variance vanished before lag {k}"
            )));
        }
        let num = r[k] - (1..k).map(|j| phi[j - 1] * r[k - j]).sum::<f64>();
        let kappa = num / v;
        if !kappa.is_finite() || kappa.abs() >= 1.0 {
            return Err(Error::Numerical(format!(
                "partial autocorrelation {kappa} at lag {k} is not inside (-1, 1)"
            )));
        }
        let prev = phi.clone();
        for j in 1..k {
            phi[j - 1] = prev[j - 1] - kappa * prev[k - j - 1];
        }
        phi.push(kappa);
        pacf.push(kappa);
        v *= 1.0 - kappa * kappa;
        variances.push(v);
    }
    Ok(DurbinLevinson {
        pacf,
        phi,
        variances,
    })
}

/// Partial autocorrelations for lags `1..=max_lag` from the sample ACF.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<AcfResult> {
    let r = acf(series, max_lag)?;
    let dl = durbin_levinson(&r.coefficients)?;
    Ok(AcfResult {
        lags: (1..=max_lag).collect(),
        coefficients: dl.pacf,
        confidence_band: r.confidence_band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    /// Direct summation, written independently of `acf`.
    fn brute_acf(x: &[f64], k: usize) -> f64 {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let mut num = 0.0;
        for t in 0..x.len() - k {
            num += (x[t] - m) * (x[t + k] - m);
        }
        let den: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
        num / den
    }

    /// PACF at each lag as the last coefficient of the Yule-Walker system of
    /// that order, solved by LU.
    pub(crate) fn toeplitz_pacf(r: &[f64], max_lag: usize) -> Vec<f64> {
        (1..=max_lag)
            .map(|k| {
                let m = DMatrix::from_fn(k, k, |i, j| r[i.abs_diff(j)]);
                let rhs = DVector::from_fn(k, |i, _| r[i + 1]);
                let sol = m.lu().solve(&rhs).expect("nonsingular Toeplitz system");
                sol[k - 1]
            })
            .collect()
    }

    #[test]
    fn lag_zero_is_one() {
        let r = acf(&[1.0, 3.0, 2.0, 5.0, 4.0], 3).unwrap();
        assert_eq!(r.coefficients[0], 1.0);
        assert_eq!(r.lags, vec![0, 1, 2, 3]);
    }

    #[test]
    fn alternating_series() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = acf(&x, 2).unwrap();
        assert!((r.coefficients[1] + 0.99).abs() < 1e-12);
        assert!((r.coefficients[1] - brute_acf(&x, 1)).abs() < 1e-14);
        assert!((r.coefficients[2] - brute_acf(&x, 2)).abs() < 1e-14);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(acf(&[2.0; 10], 3), Err(Error::Degenerate(_))));
        assert!(acf(&[1.0, 2.0, 3.0], 3).is_err());
    }

    #[test]
    fn white_noise_stays_in_band() {
        let x = sim::white_noise(5000, 1.0, 17);
        let r = acf(&x, 20).unwrap();
        let inside = (1..=20)
            .filter(|&k| r.coefficients[k].abs() < r.confidence_band)
            .count();
        assert!(inside >= 18, "{inside} of 20 lags inside the band");
    }

    #[test]
    fn ar1_pacf_cuts_off() {
        let x = sim::ar_process(&[0.6], 1.0, 5000, 23);
        let p = pacf(&x, 20).unwrap();
        assert!((0.55..=0.65).contains(&p.coefficients[0]), "{}", p.coefficients[0]);
        let excursions = p.coefficients[1..].iter().filter(|c| c.abs() >= 0.05).count();
        assert!(excursions <= 1, "{excursions} excursions: {:?}", p.coefficients);
    }

    #[test]
    fn pacf_lag_one_equals_acf_lag_one() {
        let x = sim::white_noise(200, 1.0, 4);
        assert_eq!(pacf(&x, 5).unwrap().coefficients[0], acf(&x, 5).unwrap().coefficients[1]);
    }

    #[test]
    fn pacf_matches_toeplitz_solves() {
        let x = sim::ar_process(&[0.5, -0.3], 1.0, 300, 9);
        let r = acf(&x, 5).unwrap();
        let direct = toeplitz_pacf(&r.coefficients, 5);
        let dl = pacf(&x, 5).unwrap();
        for (a, b) in dl.coefficients.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_output() {
        let r = acf(&[1.0, 2.0, 1.0, 2.0], 1).unwrap();
        assert_eq!(r.to_csv(), "lag,coefficient\n0,1.000000\n1,-0.750000\n");
    }

    proptest! {
        #[test]
        fn acf_is_shift_and_scale_invariant(
            x in prop::collection::vec(-10.0f64..10.0, 10..60),
            shift in -100.0f64..100.0,
            scale in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0],
        ) {
            let base = match acf(&x, 5) { Ok(r) => r, Err(_) => return Ok(()) };
            let moved: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            let other = acf(&moved, 5).unwrap();
            for (a, b) in base.coefficients.iter().zip(&other.coefficients) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
