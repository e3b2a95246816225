//! Augmented Dickey-Fuller (null: unit root) and KPSS (null: stationarity).
//!
//! Critical values are static tables: MacKinnon's response-surface
//! coefficients for ADF, evaluated at the regression sample size, and the
//! asymptotic KPSS table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::validate_series;
use crate::linalg::least_squares;
use crate::{Error, Result};

const MIN_OBSERVATIONS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdfRegression {
    #[default]
    Constant,
    ConstantTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagOrder {
    /// Schwert rule, `floor(12 * (n/100)^(1/4))`.
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KpssNull {
    #[default]
    Level,
    Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `floor(4 * (n/100)^(1/4))`.
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValue {
    pub level: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitRootResult {
    pub statistic: f64,
    /// Sorted from the smallest significance level.
    pub critical_values: Vec<CriticalValue>,
    /// Decision at the 5% level.
    pub reject_null: bool,
    pub lags_used: usize,
    pub nobs: usize,
}

impl UnitRootResult {
    pub fn critical_value(&self, level: f64) -> Option<f64> {
        self.critical_values
            .iter()
            .find(|c| (c.level - level).abs() < 1e-12)
            .map(|c| c.value)
    }

    /// Plain-text block naming the statistic, critical values and decision.
    pub fn report(&self, title: &str, null: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "  null hypothesis: {null}");
        let _ = writeln!(out, "  statistic: {:.4}", self.statistic);
        let _ = writeln!(out, "  lags: {}  observations: {}", self.lags_used, self.nobs);
        for c in &self.critical_values {
            let _ = writeln!(out, "  critical value {:>5.1}%: {:.4}", c.level * 100.0, c.value);
        }
        let decision = if self.reject_null {
            "reject null at 5%"
        } else {
            "fail to reject null at 5%"
        };
        let _ = writeln!(out, "  decision: {decision}");
        out
    }
}

// (level, [b_inf, b_1, b_2, b_3]) for tau = b_inf + b_1/T + b_2/T^2 + b_3/T^3
const ADF_CONSTANT: [(f64, [f64; 4]); 3] = [
    (0.01, [-3.43035, -6.5393, -16.786, -79.433]),
    (0.05, [-2.86154, -2.8903, -4.234, -40.040]),
    (0.10, [-2.56677, -1.5384, -2.809, 0.0]),
];
const ADF_CONSTANT_TREND: [(f64, [f64; 4]); 3] = [
    (0.01, [-3.95877, -9.0531, -28.428, -134.155]),
    (0.05, [-3.41049, -4.3904, -9.036, -45.374]),
    (0.10, [-3.12705, -2.5856, -3.925, -22.380]),
];

const KPSS_LEVEL: [(f64, f64); 4] = [(0.01, 0.739), (0.025, 0.574), (0.05, 0.463), (0.10, 0.347)];
const KPSS_TREND: [(f64, f64); 4] = [(0.01, 0.216), (0.025, 0.176), (0.05, 0.146), (0.10, 0.119)];

fn adf_critical_values(regression: AdfRegression, nobs: usize) -> Vec<CriticalValue> {
    let table = match regression {
        AdfRegression::Constant => &ADF_CONSTANT,
        AdfRegression::ConstantTrend => &ADF_CONSTANT_TREND,
    };
    let t = nobs as f64;
    table
        .iter()
        .map(|&(level, b)| CriticalValue {
            level,
            value: b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t),
        })
        .collect()
}

pub fn schwert_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

pub fn kpss_auto_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Regresses `dx_t` on `x_{t-1}`, deterministic terms and `lags` lagged
/// differences; the statistic is the t-ratio on `x_{t-1}`.
pub fn adf_test(series: &[f64], regression: AdfRegression, lags: LagOrder) -> Result<UnitRootResult> {
    validate_series(series, MIN_OBSERVATIONS)?;
    let n = series.len();
    let lags = match lags {
        LagOrder::Auto => schwert_lags(n),
        LagOrder::Fixed(l) => l,
    };
    let deterministic = match regression {
        AdfRegression::Constant => 1,
        AdfRegression::ConstantTrend => 2,
    };
    let k = 1 + deterministic + lags;
    let nobs = (n - 1).saturating_sub(lags);
    if nobs <= k {
        return Err(Error::Input(format!(
            "{n} observations are too few for an ADF regression with {lags} lags"
        )));
    }

    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    // Rows are t = lags..n-2 over `diff`, i.e. dx_{t} with t >= lags.
    let y: Vec<f64> = diff[lags..].to_vec();
    let mut columns = vec![series[lags..n - 1].to_vec(), vec![1.0; nobs]];
    let mut names = vec!["x_lag", "const"];
    if regression == AdfRegression::ConstantTrend {
        columns.push((1..=nobs).map(|t| t as f64).collect());
        names.push("trend");
    }
    for j in 1..=lags {
        columns.push(diff[lags - j..n - 1 - j].to_vec());
        names.push("dx_lag");
    }
    let fit = least_squares(&columns, &y, &names)?;
    let sigma2 = fit.rss / (nobs - k) as f64;
    let se = (sigma2 * fit.cov_entry(0, 0)).sqrt();
    if !(se > 0.0) {
        return Err(Error::Degenerate("ADF regression has a perfect fit".into()));
    }
    let statistic = fit.coefficients[0] / se;
    let critical_values = adf_critical_values(regression, nobs);
    let five = critical_values[1].value;
    Ok(UnitRootResult {
        statistic,
        reject_null: statistic < five,
        critical_values,
        lags_used: lags,
        nobs,
    })
}

/// Bartlett-kernel long-run variance of residuals.
pub(crate) fn long_run_variance(residuals: &[f64], bandwidth: usize) -> f64 {
    let n = residuals.len() as f64;
    let gamma = |s: usize| -> f64 {
        residuals[s..]
            .iter()
            .zip(residuals)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n
    };
    let mut s2 = gamma(0);
    for s in 1..=bandwidth {
        let w = 1.0 - s as f64 / (bandwidth as f64 + 1.0);
        s2 += 2.0 * w * gamma(s);
    }
    s2
}

pub fn kpss_test(series: &[f64], null: KpssNull, bandwidth: Bandwidth) -> Result<UnitRootResult> {
    validate_series(series, MIN_OBSERVATIONS)?;
    let n = series.len();
    let bandwidth = match bandwidth {
        Bandwidth::Auto => kpss_auto_bandwidth(n),
        Bandwidth::Fixed(b) => b,
    };
    if bandwidth >= n {
        return Err(Error::Input(format!(
            "bandwidth {bandwidth} must be below the series length {n}"
        )));
    }
    let residuals = match null {
        KpssNull::Level => {
            let mean = series.iter().sum::<f64>() / n as f64;
            series.iter().map(|x| x - mean).collect::<Vec<_>>()
        }
        KpssNull::Trend => {
            let trend: Vec<f64> = (1..=n).map(|t| t as f64).collect();
            least_squares(&[vec![1.0; n], trend], series, &["const", "trend"])?.residuals
        }
    };
    let s2 = long_run_variance(&residuals, bandwidth);
    if !(s2 > 0.0) {
        return Err(Error::Degenerate(
            "long-run variance of the residuals is not positive".into(),
        ));
    }
    let mut partial = 0.0;
    let mut sum_sq = 0.0;
    for e in &residuals {
        partial += e;
        sum_sq += partial * partial;
    }
    let statistic = sum_sq / ((n * n) as f64 * s2);
    let table = match null {
        KpssNull::Level => &KPSS_LEVEL,
        KpssNull::Trend => &KPSS_TREND,
    };
    let critical_values: Vec<CriticalValue> = table
        .iter()
        .map(|&(level, value)| CriticalValue { level, value })
        .collect();
    let five = critical_values[2].value;
    Ok(UnitRootResult {
        statistic,
        reject_null: statistic > five,
        critical_values,
        lags_used: bandwidth,
        nobs: n,
    })
}
