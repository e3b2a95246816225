use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// AR(p) error process: e_t = sum_j phi_j e_{t-j} + u_t, Var(u_t) = sigma2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArCoefficients {
    pub phi: Vec<f64>,
    pub sigma2: f64,
}

impl ArCoefficients {
    pub fn order(&self) -> usize {
        self.phi.len()
    }

    pub fn is_stationary(&self) -> bool {
        ar_to_pacf(&self.phi).is_ok()
    }
}

/// Step-up recursion: partial autocorrelations to the predictor
/// coefficients of every order 0..=p. Entry k has length k.
pub fn step_up_all(kappa: &[f64]) -> Vec<Vec<f64>> {
    let mut all = Vec::with_capacity(kappa.len() + 1);
    all.push(Vec::new());
    for (k, &kk) in kappa.iter().enumerate() {
        let prev: &Vec<f64> = &all[k];
        let mut next = Vec::with_capacity(k + 1);
        for j in 0..k {
            next.push(prev[j] - kk * prev[k - 1 - j]);
        }
        next.push(kk);
        all.push(next);
    }
    all
}

pub fn pacf_to_ar(kappa: &[f64]) -> Vec<f64> {
    step_up_all(kappa).pop().unwrap_or_default()
}

/// Step-down recursion. Fails with `NonStationary` when some partial
/// autocorrelation reaches the unit circle.
pub fn ar_to_pacf(phi: &[f64]) -> Result<Vec<f64>> {
    let p = phi.len();
    let mut kappa = vec![0.0; p];
    let mut a = phi.to_vec();
    for k in (1..=p).rev() {
        let kk = a[k - 1];
        if !kk.is_finite() || kk.abs() >= 1.0 {
            return Err(Error::NonStationary { lag: k, pacf: kk });
        }
        kappa[k - 1] = kk;
        let denom = 1.0 - kk * kk;
        let prev: Vec<f64> = (0..k - 1)
            .map(|j| (a[j] + kk * a[k - 2 - j]) / denom)
            .collect();
        a = prev;
    }
    Ok(kappa)
}
