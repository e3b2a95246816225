//! Interrupted time series: segmented regression designs, OLS, and GLS with
//! stationary AR(p) errors fit by exact maximum likelihood.
//!
//! The GLS fit profiles the regression coefficients and innovation variance
//! out of the Gaussian likelihood, leaving only the AR coefficients to
//! optimize. Those are parameterized as `tanh` of unconstrained reals (the
//! partial autocorrelations), mapped to AR coefficients by the step-up
//! recursion, so every iterate is stationary.

mod ar;
mod design;
mod gls;
mod inference;
mod optim;

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use ar::{ar_to_pacf, pacf_to_ar, step_up_all, ArCoefficients};
pub use design::{build_design, SegmentedDesign, TimeIndex, TERM_NAMES};
pub use gls::{
    ar_profile_loglik, fit_gls_ar, ols_fit, GlsFit, GlsOptions, OlsFit, ProfileLikelihood,
};
pub use inference::{
    bonferroni_alpha, flag_p_value, flag_significance, student_t_two_sided_p, Significance,
};
pub use optim::{minimize_bfgs, OptimOptions, OptimResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventSpec {
    pub name: String,
    pub date: NaiveDate,
}

impl EventSpec {
    pub fn new(name: &str, date: NaiveDate) -> Self {
        Self {
            name: name.to_string(),
            date,
        }
    }

    /// File-name friendly form of the event name.
    pub fn slug(&self) -> String {
        let mut slug = String::new();
        for c in self.name.chars() {
            if c.is_ascii_alphanumeric() {
                slug.push(c.to_ascii_lowercase());
            } else if !slug.ends_with('_') && !slug.is_empty() {
                slug.push('_');
            }
        }
        let slug = slug.trim_end_matches('_').to_string();
        if slug.is_empty() {
            self.date.format("event_%Y%m%d").to_string()
        } else {
            slug
        }
    }
}

const DEFAULT_EVENTS_JSON: &str = include_str!("../../data/events.json");

/// The five default events: the 2016 US election, the COVID-19 PHEIC and
/// pandemic declarations, the 2020 US election and the ChatGPT launch.
pub fn default_events() -> Vec<EventSpec> {
    serde_json::from_str(DEFAULT_EVENTS_JSON).expect("bundled events file is valid")
}

/// Reads a JSON array of `{name, date}` objects.
pub fn load_events(path: &Path) -> Result<Vec<EventSpec>> {
    let json = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let events: Vec<EventSpec> =
        serde_json::from_str(&json).map_err(|e| Error::Config(format!("events file: {e}")))?;
    if events.is_empty() {
        return Err(Error::Config("events file lists no events".into()));
    }
    Ok(events)
}
