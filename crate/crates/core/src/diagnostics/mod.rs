//! Autocorrelation diagnostics and unit-root tests for the daily series.

mod acf;
mod unit_root;

pub use acf::{acf, durbin_levinson, pacf, AcfResult, DurbinLevinson};
pub use unit_root::{
    adf_test, kpss_test, AdfRegression, Bandwidth, CriticalValue, KpssNull, LagOrder,
    UnitRootResult,
};

use crate::{Error, Result};

pub(crate) fn validate_series(series: &[f64], min_len: usize) -> Result<()> {
    if series.len() < min_len {
        return Err(Error::Input(format!(
            "series has {} observations, need at least {min_len}",
            series.len()
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("series contains non-finite values".into()));
    }
    Ok(())
}
