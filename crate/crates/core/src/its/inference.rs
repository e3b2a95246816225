use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::{Error, Result};

/// Two-sided p-value of a Student-t statistic: I_{df/(df+t^2)}(df/2, 1/2).
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || !(df > 0.0) {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x.clamp(0.0, 1.0)).clamp(0.0, 1.0)
}

/// Per-test alpha under a Bonferroni correction.
pub fn bonferroni_alpha(base_alpha: f64, events: usize) -> Result<f64> {
    if !(base_alpha > 0.0 && base_alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {base_alpha}")));
    }
    if events == 0 {
        return Err(Error::Config("at least one event is required".into()));
    }
    Ok(base_alpha / events as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "Y")]
    Yes,
    #[serde(rename = "N")]
    No,
}

impl Significance {
    pub fn is_significant(self) -> bool {
        self == Significance::Yes
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_significant() { "Y" } else { "N" })
    }
}

/// Strict comparison: a p-value equal to alpha is not significant.
pub fn flag_p_value(p: f64, alpha: f64) -> Significance {
    if p < alpha {
        Significance::Yes
    } else {
        Significance::No
    }
}

pub fn flag_significance(p_values: &[f64], alpha: f64) -> Vec<Significance> {
    p_values.iter().map(|&p| flag_p_value(p, alpha)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Simpson integration of the t density over [|t|, inf) via x = |t| + u/(1-u).
    fn t_tail_oracle(t: f64, df: f64) -> f64 {
        let ln_c = statrs::function::gamma::ln_gamma((df + 1.0) / 2.0)
            - statrs::function::gamma::ln_gamma(df / 2.0)
            - 0.5 * (df * std::f64::consts::PI).ln();
        let density = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
        let g = |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let x = t.abs() + u / (1.0 - u);
            density(x) / ((1.0 - u) * (1.0 - u))
        };
        let m = 200_000;
        let h = 1.0 / m as f64;
        let mut s = g(0.0) + g(1.0);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(i as f64 * h);
        }
        2.0 * s * h / 3.0
    }

    #[test]
    fn known_p_values() {
        let p = student_t_two_sided_p(2.0, 10.0);
        assert!((p - t_tail_oracle(2.0, 10.0)).abs() < 1e-8);
        assert!((p - 0.07339).abs() < 5e-6);
        assert_eq!(student_t_two_sided_p(0.0, 10.0), 1.0);
        assert!(student_t_two_sided_p(50.0, 100.0) < 1e-10);
        assert_eq!(student_t_two_sided_p(-2.0, 10.0), p);
    }

    #[test]
    fn one_df_is_cauchy() {
        let p = student_t_two_sided_p(1.0, 1.0);
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bonferroni() {
        assert_eq!(bonferroni_alpha(0.05, 5).unwrap(), 0.01);
        assert!(bonferroni_alpha(0.0, 5).is_err());
        assert!(bonferroni_alpha(0.05, 0).is_err());
    }

    #[test]
    fn threshold_is_strict() {
        assert_eq!(flag_p_value(0.01, 0.01), Significance::No);
        assert_eq!(flag_p_value(0.0099, 0.01), Significance::Yes);
        assert_eq!(Significance::Yes.to_string(), "Y");
    }
}
