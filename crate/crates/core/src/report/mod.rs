//! Pipeline orchestration and rendering of the text, CSV and SVG reports.

mod commands;
mod format;
mod svg;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{AdfRegression, Bandwidth, KpssNull, LagOrder};
use crate::ingest::IngestConfig;
use crate::its::{default_events, EventSpec, TimeIndex};
use crate::{Error, Result};

pub use commands::{
    cmd_aggregate, cmd_analyze, cmd_diagnose, cmd_ingest, cmd_report, cmd_score, AnalyzeReport,
    DiagnosticsReport, FileError, IngestReport, ReportOutput, SkippedEvent,
};
pub use format::{
    fit_report_csv, format_thousands, histogram_csv, summary_text, fits_table_text, SummaryInputs,
    FITS_FILE,
};
pub use svg::{fit_plot_svg, histogram_svg, FIT_SEGMENT_CLASS};

pub const DEFAULT_AR_ORDER: usize = 16;
pub const DEFAULT_BASE_ALPHA: f64 = 0.05;
pub const DEFAULT_ACF_MAX_LAG: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub ingest: IngestConfig,
    /// Detector JSON; the bundled model when absent.
    pub model_path: Option<PathBuf>,
    pub store_path: PathBuf,
    pub events: Vec<EventSpec>,
    pub ar_order: usize,
    pub base_alpha: f64,
    pub acf_max_lag: usize,
    pub time_index: TimeIndex,
    pub adf_regression: AdfRegression,
    pub adf_lags: LagOrder,
    pub kpss_null: KpssNull,
    pub kpss_bandwidth: Bandwidth,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            ingest: IngestConfig::default(),
            model_path: None,
            store_path: PathBuf::from("scores.sqlite"),
            events: default_events(),
            ar_order: DEFAULT_AR_ORDER,
            base_alpha: DEFAULT_BASE_ALPHA,
            acf_max_lag: DEFAULT_ACF_MAX_LAG,
            time_index: TimeIndex::default(),
            adf_regression: AdfRegression::default(),
            adf_lags: LagOrder::default(),
            kpss_null: KpssNull::default(),
            kpss_bandwidth: Bandwidth::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let mut config: Self =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("pipeline config: {e}")))?;
        config.ingest = IngestConfig::from_json(&serde_json::to_string(&config.ingest)?)?;
        config.validate()?;
        Ok(config)
    }

    /// Relative paths inside the file are taken relative to the working
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_json(&json)
    }

    pub fn validate(&self) -> Result<()> {
        self.ingest.validate()?;
        if !(self.base_alpha > 0.0 && self.base_alpha < 1.0) {
            return Err(Error::Config(format!(
                "base_alpha must lie in (0, 1), got {}",
                self.base_alpha
            )));
        }
        if self.events.is_empty() {
            return Err(Error::Config("no events configured".into()));
        }
        if self.acf_max_lag == 0 {
            return Err(Error::Config("acf_max_lag must be at least 1".into()));
        }
        let mut slugs: Vec<String> = self.events.iter().map(EventSpec::slug).collect();
        slugs.sort();
        if let Some(pair) = slugs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!(
                "two events share the report name {:?}",
                pair[0]
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::default();
        assert_eq!(c.ar_order, 16);
        assert_eq!(c.base_alpha, 0.05);
        assert_eq!(c.acf_max_lag, 20);
        assert_eq!(c.events.len(), 5);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let c = PipelineConfig::default();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(PipelineConfig::from_json(&json).unwrap(), c);
        let partial = PipelineConfig::from_json(r#"{"ar_order": 2, "base_alpha": 0.1}"#).unwrap();
        assert_eq!(partial.ar_order, 2);
        assert_eq!(partial.events.len(), 5);
        assert!(PipelineConfig::from_json(r#"{"base_alpha": 1.5}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"events": []}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }
}
