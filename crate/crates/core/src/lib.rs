//! Clickbait scoring of crawled news headlines and interrupted time series
//! analysis of the resulting daily score series.
//!
//! The pipeline stages map onto modules:
//!
//! - [`ingest`]: WARC streaming, crawl-day selection, HTML headline extraction
//!   and the length/language filters.
//! - [`detector`]: the lexical feature registry, logistic scoring and a
//!   full-batch gradient-descent trainer.
//! - [`store`]: the SQLite score table, CSV interchange, daily aggregation and
//!   whole-dataset summary statistics.
//! - [`diagnostics`]: ACF/PACF and the ADF/KPSS stationarity tests.
//! - [`its`]: segmented regression designs, OLS, and exact-likelihood GLS with
//!   AR(p) errors.
//! - [`report`]: the command orchestration plus CSV, text and SVG rendering.

pub mod detector;
pub mod diagnostics;
mod error;
pub mod ingest;
pub mod its;
pub mod linalg;
pub mod report;
pub mod sim;
pub mod store;
pub mod text;

pub use error::{Error, ErrorKind, Result};

pub use detector::{ClickbaitScore, Detector, FeatureExtractor, FeatureVector, Label, ModelWeights};
pub use ingest::{CrawlRecord, ExtractedHeadline, IngestConfig};
pub use its::{ArCoefficients, EventSpec, GlsFit, OlsFit, SegmentedDesign};
pub use store::{DailySeries, ScoreRow, ScoreStore, SummaryStats};
