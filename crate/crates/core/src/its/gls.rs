use serde::{Deserialize, Serialize};

use super::ar::{ar_to_pacf, pacf_to_ar, step_up_all, ArCoefficients};
use super::design::{SegmentedDesign, TERM_NAMES};
use super::inference::{flag_significance, student_t_two_sided_p, Significance};
use super::optim::{minimize_bfgs, OptimOptions};
use super::EventSpec;
use crate::diagnostics::{acf, durbin_levinson};
use crate::linalg::{least_squares, LeastSquares};
use crate::{Error, Result};

const CONDITION_LIMIT: f64 = 1e12;
const START_PACF_LIMIT: f64 = 0.95;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

fn gaussian_loglik(n: usize, rss: f64, log_det: f64) -> f64 {
    let nf = n as f64;
    -0.5 * nf * (LN_2PI + (rss / nf).ln() + 1.0) - 0.5 * log_det
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// RSS / (n - 4).
    pub sigma2: f64,
    pub rss: f64,
    /// Gaussian log-likelihood at the ML variance RSS / n.
    pub log_likelihood: f64,
    pub aic: f64,
    pub nobs: usize,
}

pub fn ols_fit(design: &SegmentedDesign) -> Result<OlsFit> {
    let n = design.len();
    let k = TERM_NAMES.len();
    if n <= k {
        return Err(Error::Input(format!("{n} observations for {k} coefficients")));
    }
    let ls = least_squares(&design.columns(), &design.response, &TERM_NAMES)?;
    if ls.condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition: ls.condition });
    }
    if ls.rss <= 0.0 {
        return Err(Error::Degenerate("the design fits the response exactly".into()));
    }
    let df = (n - k) as f64;
    let sigma2 = ls.rss / df;
    let std_errors: Vec<f64> = (0..k).map(|i| (sigma2 * ls.cov_entry(i, i)).sqrt()).collect();
    let t_values: Vec<f64> = ls.coefficients.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values = t_values.iter().map(|&t| student_t_two_sided_p(t, df)).collect();
    let log_likelihood = gaussian_loglik(n, ls.rss, 0.0);
    Ok(OlsFit {
        coefficients: ls.coefficients,
        std_errors,
        t_values,
        p_values,
        residuals: ls.residuals,
        sigma2,
        rss: ls.rss,
        log_likelihood,
        aic: -2.0 * log_likelihood + 2.0 * (k + 1) as f64,
        nobs: n,
    })
}

/// Exact Gaussian log-likelihood with beta and sigma^2 profiled out.
#[derive(Debug, Clone)]
pub struct ProfileLikelihood {
    pub log_likelihood: f64,
    pub coefficients: Vec<f64>,
    /// ML innovation variance, whitened RSS / n.
    pub sigma2: f64,
    pub whitened_rss: f64,
    /// log det of the error correlation matrix scaled to unit innovations.
    pub log_det: f64,
    pub whitened: LeastSquares,
}

fn whiten(z: &[f64], predictors: &[Vec<f64>], inv_sd: &[f64]) -> Vec<f64> {
    let p = predictors.len() - 1;
    (0..z.len())
        .map(|t| {
            let m = t.min(p);
            let a = &predictors[m];
            let mut w = z[t];
            for j in 1..=m {
                w -= a[j - 1] * z[t - j];
            }
            if t < p {
                w * inv_sd[t]
            } else {
                w
            }
        })
        .collect()
}

fn profile(columns: &[Vec<f64>], y: &[f64], phi: &[f64]) -> Result<ProfileLikelihood> {
    let n = y.len();
    let p = phi.len();
    if n <= p + TERM_NAMES.len() {
        return Err(Error::Input(format!("{n} observations for AR({p}) with 4 coefficients")));
    }
    let kappa = ar_to_pacf(phi)?;
    let predictors = step_up_all(&kappa);
    // Prediction error variance of row t < p, in units of sigma^2, is
    // prod_{i >= t} 1 / (1 - kappa_i^2).
    let mut log_g = vec![0.0; p];
    let mut acc = 0.0;
    for t in (0..p).rev() {
        let shrink = 1.0 - kappa[t] * kappa[t];
        if !(shrink > 0.0) {
            return Err(Error::NonStationary { lag: t + 1, pacf: kappa[t] });
        }
        acc -= shrink.ln();
        log_g[t] = acc;
    }
    let log_det: f64 = log_g.iter().sum();
    let inv_sd: Vec<f64> = log_g.iter().map(|g| (-0.5 * g).exp()).collect();

    let wy = whiten(y, &predictors, &inv_sd);
    let wx: Vec<Vec<f64>> = columns.iter().map(|c| whiten(c, &predictors, &inv_sd)).collect();
    let ls = least_squares(&wx, &wy, &TERM_NAMES)?;
    if ls.condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition: ls.condition });
    }
    if !(ls.rss > 0.0) {
        return Err(Error::Degenerate("whitened design fits the response exactly".into()));
    }
    Ok(ProfileLikelihood {
        log_likelihood: gaussian_loglik(n, ls.rss, log_det),
        coefficients: ls.coefficients.clone(),
        sigma2: ls.rss / n as f64,
        whitened_rss: ls.rss,
        log_det,
        whitened: ls,
    })
}

/// Profile log-likelihood of the design's response at AR coefficients `phi`.
pub fn ar_profile_loglik(design: &SegmentedDesign, phi: &[f64]) -> Result<ProfileLikelihood> {
    profile(&design.columns(), &design.response, phi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlsOptions {
    pub optim: OptimOptions,
    /// Per-test significance level used for the Y/N flags.
    pub alpha: f64,
}

impl Default for GlsOptions {
    fn default() -> Self {
        Self {
            optim: OptimOptions::default(),
            alpha: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlsFit {
    pub event: EventSpec,
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub significance: Vec<Significance>,
    pub alpha: f64,
    pub ar: ArCoefficients,
    pub log_likelihood: f64,
    pub aic: f64,
    pub nobs: usize,
    pub df: usize,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl GlsFit {
    pub fn term(&self, name: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == name)
    }

    /// Fitted segmented line on a design with the same columns.
    pub fn fitted(&self, design: &SegmentedDesign) -> Vec<f64> {
        let columns = design.columns();
        (0..design.len())
            .map(|i| columns.iter().zip(&self.coefficients).map(|(c, b)| c[i] * b).sum())
            .collect()
    }
}

fn mean_sd(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn yule_walker_start(columns: &[Vec<f64>], y: &[f64], p: usize) -> Option<Vec<f64>> {
    let ls = least_squares(columns, y, &TERM_NAMES).ok()?;
    let r = acf(&ls.residuals, p).ok()?;
    let dl = durbin_levinson(&r.coefficients).ok()?;
    Some(
        dl.pacf
            .iter()
            .map(|k| k.clamp(-START_PACF_LIMIT, START_PACF_LIMIT).atanh())
            .collect(),
    )
}

/// GLS fit with AR(`p`) errors by exact maximum likelihood.
///
/// The response is standardized before optimizing and the estimates mapped
/// back, so the fit is equivariant under affine changes of the response.
pub fn fit_gls_ar(design: &SegmentedDesign, p: usize, options: &GlsOptions) -> Result<GlsFit> {
    let n = design.len();
    let k = TERM_NAMES.len();
    if n <= k + p {
        return Err(Error::Input(format!("{n} observations for AR({p}) with {k} coefficients")));
    }
    let columns = design.columns();
    let (center, scale) = mean_sd(&design.response);
    let constant = design.response.iter().all(|v| *v == design.response[0]);
    if constant || !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Degenerate("response is constant".into()));
    }
    let ys: Vec<f64> = design.response.iter().map(|v| (v - center) / scale).collect();

    let objective = |theta: &[f64]| {
        let kappa: Vec<f64> = theta.iter().map(|t| t.tanh()).collect();
        match profile(&columns, &ys, &pacf_to_ar(&kappa)) {
            Ok(pl) => -pl.log_likelihood,
            Err(_) => f64::INFINITY,
        }
    };
    let mut starts = vec![vec![0.0; p]];
    if p > 0 {
        if let Some(s) = yule_walker_start(&columns, &ys, p) {
            starts.push(s);
        }
    }
    let mut best: Option<super::optim::OptimResult> = None;
    for start in &starts {
        let run = minimize_bfgs(objective, start, &options.optim);
        log::debug!(
            "AR({p}) start {start:?}: -loglik {} after {} iterations (converged {})",
            run.value,
            run.iterations,
            run.converged
        );
        if best.as_ref().map_or(true, |b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let kappa: Vec<f64> = best.x.iter().map(|t| t.tanh()).collect();
    let phi = pacf_to_ar(&kappa);
    let pl = profile(&columns, &ys, &phi)?;

    let df = n - k;
    let se_scale = pl.whitened_rss / df as f64;
    let mut coefficients: Vec<f64> = pl.coefficients.iter().map(|b| b * scale).collect();
    coefficients[0] += center;
    let std_errors: Vec<f64> = (0..k)
        .map(|i| (se_scale * pl.whitened.cov_entry(i, i)).sqrt() * scale)
        .collect();
    let t_values: Vec<f64> = coefficients.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values: Vec<f64> = t_values
        .iter()
        .map(|&t| student_t_two_sided_p(t, df as f64))
        .collect();
    let log_likelihood = pl.log_likelihood - n as f64 * scale.ln();

    let fit = GlsFit {
        event: design.event.clone(),
        terms: TERM_NAMES.iter().map(|s| s.to_string()).collect(),
        significance: flag_significance(&p_values, options.alpha),
        coefficients,
        std_errors,
        t_values,
        p_values,
        alpha: options.alpha,
        ar: ArCoefficients {
            phi,
            sigma2: pl.sigma2 * scale * scale,
        },
        log_likelihood,
        aic: -2.0 * log_likelihood + 2.0 * (k + p + 1) as f64,
        nobs: n,
        df,
        converged: best.converged,
        iterations: best.iterations,
        gradient_norm: best.gradient_norm,
    };
    if !fit.converged {
        return Err(Error::NotConverged {
            iterations: fit.iterations,
            gradient_norm: fit.gradient_norm,
            best: Box::new(fit),
        });
    }
    Ok(fit)
}
