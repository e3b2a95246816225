use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::format::{
    fit_report_csv, histogram_csv, summary_text, fits_table_text, SummaryInputs, FITS_FILE,
};
use super::svg::{fit_plot_svg, histogram_svg};
use super::PipelineConfig;
use crate::detector::Detector;
use crate::diagnostics::{
    acf, adf_test, kpss_test, pacf, AcfResult, UnitRootResult,
};
use crate::ingest::{ingest_warc_file, ExtractedHeadline, IngestCounts};
use crate::its::{
    bonferroni_alpha, build_design, fit_gls_ar, GlsFit, GlsOptions, Significance,
};
use crate::store::{DailySeries, NewScoreRow, ScoreStore};
use crate::{Error, ErrorKind, Result};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::file(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileError {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub files: usize,
    pub file_errors: Vec<FileError>,
    pub counts: IngestCounts,
    pub rows_stored: usize,
}

impl IngestReport {
    pub fn to_text(&self) -> String {
        let c = &self.counts;
        let mut out = String::new();
        let _ = writeln!(out, "files: {} ({} failed)", self.files, self.file_errors.len());
        for e in &self.file_errors {
            let _ = writeln!(out, "  {}: {}", e.path.display(), e.message);
        }
        let _ = writeln!(out, "records read: {}", c.records_read);
        let _ = writeln!(out, "records skipped (not HTML): {}", c.records_not_html);
        let _ = writeln!(out, "records skipped (off crawl day): {}", c.records_off_day);
        let _ = writeln!(out, "malformed records: {}", c.record_errors);
        let _ = writeln!(out, "truncated records: {}", c.truncated_records);
        let _ = writeln!(out, "texts extracted: {}", c.texts_extracted);
        let _ = writeln!(out, "texts filtered (length): {}", c.filtered_length);
        let _ = writeln!(out, "texts filtered (language): {}", c.filtered_language);
        let _ = writeln!(out, "rows stored: {}", self.rows_stored);
        out
    }
}

fn score_headlines(detector: &Detector, headlines: &[ExtractedHeadline]) -> Result<Vec<NewScoreRow>> {
    headlines
        .iter()
        .map(|h| {
            let (features, score) = detector.score_text(&h.text)?;
            Ok(NewScoreRow {
                ymd: h.ymd,
                tag: h.tag.clone(),
                pageurl: h.page_url.clone(),
                headline: h.text.clone(),
                detector: features.to_csv(),
                score_1: score.score_1,
                score_2: score.score_2,
            })
        })
        .collect()
}

/// Parses, filters and scores every WARC file, appending the rows to the
/// store. Files are processed in parallel and stored in argument order; an
/// unreadable file is reported and skipped.
pub fn cmd_ingest(paths: &[PathBuf], config: &PipelineConfig, detector: &Detector) -> Result<IngestReport> {
    if paths.is_empty() {
        return Err(Error::Input("no WARC files given".into()));
    }
    config.ingest.validate()?;
    let results: Vec<Result<(Vec<NewScoreRow>, IngestCounts)>> = paths
        .par_iter()
        .map(|path| {
            let (headlines, counts) = ingest_warc_file(path, &config.ingest)?;
            Ok((score_headlines(detector, &headlines)?, counts))
        })
        .collect();

    let mut store = ScoreStore::open(&config.store_path)?;
    let mut report = IngestReport {
        files: paths.len(),
        file_errors: Vec::new(),
        counts: IngestCounts::default(),
        rows_stored: 0,
    };
    for (path, result) in paths.iter().zip(results) {
        match result {
            Ok((rows, counts)) => {
                report.rows_stored += store.insert_batch(&rows)?;
                report.counts.merge(&counts);
            }
            Err(e) if e.kind() == ErrorKind::Numerical => return Err(e),
            Err(e) => {
                log::error!("{}: {e}", path.display());
                report.file_errors.push(FileError {
                    path: path.clone(),
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(report)
}

/// Re-scores every stored row with `detector`.
pub fn cmd_score(config: &PipelineConfig, detector: &Detector) -> Result<usize> {
    let mut store = ScoreStore::open(&config.store_path)?;
    store.rescore(detector)
}

pub fn cmd_aggregate(config: &PipelineConfig, out: &Path) -> Result<DailySeries> {
    let series = ScoreStore::open(&config.store_path)?.aggregate_daily()?;
    ensure_dir(out)?;
    write_file(&out.join("daily.csv"), &series.to_csv())?;
    Ok(series)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub acf: AcfResult,
    pub pacf: AcfResult,
    pub adf: UnitRootResult,
    pub kpss: UnitRootResult,
}

impl DiagnosticsReport {
    pub fn stationarity_text(&self) -> String {
        let adf_null = "unit root (non-stationary)";
        let kpss_null = "stationary";
        let mut out = self.adf.report("Augmented Dickey-Fuller test", adf_null);
        out.push('\n');
        out.push_str(&self.kpss.report("KPSS test", kpss_null));
        out
    }
}

fn diagnostics(config: &PipelineConfig, series: &DailySeries) -> Result<DiagnosticsReport> {
    let y = &series.means;
    let max_lag = config.acf_max_lag.min(y.len().saturating_sub(1));
    if max_lag < config.acf_max_lag {
        log::warn!(
            "series has {} observations; correlograms truncated at lag {max_lag}",
            y.len()
        );
    }
    Ok(DiagnosticsReport {
        acf: acf(y, max_lag)?,
        pacf: pacf(y, max_lag)?,
        adf: adf_test(y, config.adf_regression, config.adf_lags)?,
        kpss: kpss_test(y, config.kpss_null, config.kpss_bandwidth)?,
    })
}

fn write_diagnostics(report: &DiagnosticsReport, out: &Path) -> Result<()> {
    write_file(&out.join("acf.csv"), &report.acf.to_csv())?;
    write_file(&out.join("pacf.csv"), &report.pacf.to_csv())?;
    write_file(&out.join("stationarity.txt"), &report.stationarity_text())
}

/// ACF, PACF, ADF and KPSS of the daily mean series.
pub fn cmd_diagnose(config: &PipelineConfig, out: &Path) -> Result<DiagnosticsReport> {
    let series = ScoreStore::open(&config.store_path)?.aggregate_daily()?;
    let report = diagnostics(config, &series)?;
    ensure_dir(out)?;
    write_diagnostics(&report, out)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedEvent {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub alpha: f64,
    pub fits: Vec<GlsFit>,
    pub skipped: Vec<SkippedEvent>,
    /// Events whose optimizer hit its budget; their best fits are reported.
    pub unconverged: Vec<String>,
    pub diagnostics: Option<DiagnosticsReport>,
}

impl AnalyzeReport {
    pub fn fit(&self, event_name: &str) -> Option<&GlsFit> {
        self.fits.iter().find(|f| f.event.name == event_name)
    }

    pub fn any_significant(&self, event_name: &str, terms: &[&str]) -> bool {
        self.fit(event_name).is_some_and(|f| {
            terms
                .iter()
                .filter_map(|t| f.term(t))
                .any(|i| f.significance[i] == Significance::Yes)
        })
    }
}

fn aic_csv(fits: &[GlsFit]) -> String {
    let mut out = String::from("event,ar_order,aic,log_likelihood,converged\n");
    for f in fits {
        let name = if f.event.name.contains([',', '"']) {
            format!("\"{}\"", f.event.name.replace('"', "\"\""))
        } else {
            f.event.name.clone()
        };
        let _ = writeln!(
            out,
            "{name},{},{:.3},{:.3},{}",
            f.ar.order(),
            f.aic,
            f.log_likelihood,
            f.converged
        );
    }
    out
}

/// Diagnostics plus one GLS fit per event, with Bonferroni-adjusted flags.
pub fn cmd_analyze(config: &PipelineConfig, out: &Path) -> Result<AnalyzeReport> {
    config.validate()?;
    let series = ScoreStore::open(&config.store_path)?.aggregate_daily()?;
    if series.len() < 2 {
        return Err(Error::Input(format!(
            "the store holds {} distinct day(s); at least 2 are required",
            series.len()
        )));
    }
    let alpha = bonferroni_alpha(config.base_alpha, config.events.len())?;
    ensure_dir(out)?;
    write_file(&out.join("daily.csv"), &series.to_csv())?;

    let diagnostics = match diagnostics(config, &series) {
        Ok(d) => {
            write_diagnostics(&d, out)?;
            Some(d)
        }
        Err(e) => {
            log::warn!("diagnostics skipped: {e}");
            write_file(&out.join("stationarity.txt"), &format!("diagnostics unavailable: {e}\n"))?;
            None
        }
    };

    let options = GlsOptions {
        alpha,
        ..GlsOptions::default()
    };
    let outcomes: Vec<Result<GlsFit>> = config
        .events
        .par_iter()
        .map(|event| {
            let design = build_design(&series, event, config.time_index)?;
            fit_gls_ar(&design, config.ar_order, &options)
        })
        .collect();

    let mut report = AnalyzeReport {
        alpha,
        fits: Vec::new(),
        skipped: Vec::new(),
        unconverged: Vec::new(),
        diagnostics,
    };
    for (event, outcome) in config.events.iter().zip(outcomes) {
        match outcome {
            Ok(fit) => report.fits.push(fit),
            Err(Error::NotConverged { best, iterations, gradient_norm }) => {
                log::warn!(
                    "event {:?}: optimizer stopped after {iterations} iterations (gradient {gradient_norm:.2e}); reporting best fit",
                    event.name
                );
                report.unconverged.push(event.name.clone());
                report.fits.push(*best);
            }
            Err(e) => {
                log::warn!("event {:?} skipped: {e}", event.name);
                report.skipped.push(SkippedEvent {
                    name: event.name.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    if report.fits.is_empty() {
        let reasons: Vec<String> = report
            .skipped
            .iter()
            .map(|s| format!("{}: {}", s.name, s.reason))
            .collect();
        return Err(Error::Input(format!("no event could be fitted ({})", reasons.join("; "))));
    }

    for fit in &report.fits {
        write_file(&out.join(format!("fit_{}.csv", fit.event.slug())), &fit_report_csv(fit))?;
    }
    write_file(&out.join("fits_table.txt"), &fits_table_text(&report.fits, alpha))?;
    write_file(&out.join("aic.csv"), &aic_csv(&report.fits))?;
    let json = serde_json::to_string_pretty(&report.fits)? + "\n";
    write_file(&out.join(FITS_FILE), &json)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportOutput {
    pub summary: String,
    pub plots: Vec<PathBuf>,
    /// What could not be plotted, and why.
    pub missing: Vec<String>,
}

/// Summary table, histogram and one overlay plot per fitted event.
pub fn cmd_report(config: &PipelineConfig, out: &Path) -> Result<ReportOutput> {
    let store = ScoreStore::open(&config.store_path)?;
    let stats = store.summary_stats()?;
    let summary = summary_text(&SummaryInputs {
        stats: &stats,
        sites: store.distinct_sites()?,
        ingest: &config.ingest,
        events: config.events.len(),
        base_alpha: config.base_alpha,
    });
    ensure_dir(out)?;
    write_file(&out.join("summary.txt"), &summary)?;
    write_file(&out.join("histogram.csv"), &histogram_csv(&stats))?;
    write_file(&out.join("histogram.svg"), &histogram_svg(&stats))?;

    let mut output = ReportOutput {
        summary,
        plots: Vec::new(),
        missing: Vec::new(),
    };
    let fits_path = out.join(FITS_FILE);
    let fits: Vec<GlsFit> = match std::fs::read_to_string(&fits_path) {
        Ok(json) => serde_json::from_str(&json)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            output.missing.push(format!(
                "{} not found; run analyze with the same --out to produce fit plots",
                fits_path.display()
            ));
            return Ok(output);
        }
        Err(e) => return Err(Error::file(&fits_path, e)),
    };
    let series = store.aggregate_daily()?;
    for fit in &fits {
        match build_design(&series, &fit.event, config.time_index) {
            Ok(design) => {
                let path = out.join(format!("plot_{}.svg", fit.event.slug()));
                write_file(&path, &fit_plot_svg(fit, &design))?;
                output.plots.push(path);
            }
            Err(e) => output.missing.push(format!("{}: {e}", fit.event.name)),
        }
    }
    for event in &config.events {
        if !fits.iter().any(|f| f.event == *event) {
            output.missing.push(format!("{}: no fit in {}", event.name, fits_path.display()));
        }
    }
    Ok(output)
}

