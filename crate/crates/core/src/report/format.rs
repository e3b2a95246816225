use std::fmt::Write;

use chrono::NaiveDate;

use crate::ingest::IngestConfig;
use crate::its::GlsFit;
use crate::store::{bin_midpoint, SummaryStats};

pub const FITS_FILE: &str = "fits.json";

const REPORTED_TERMS: [&str; 3] = ["T", "D", "P"];

pub fn format_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn event_date(date: NaiveDate) -> String {
    date.format("%b. %-d, %Y").to_string()
}

fn fit_heading(fit: &GlsFit) -> String {
    format!(
        "{}, {} AIC = {:.3}, ARMA(p={}, q= 0)",
        fit.event.name,
        event_date(fit.event.date),
        fit.aic,
        fit.ar.order()
    )
}

fn reported_rows(fit: &GlsFit) -> impl Iterator<Item = (&'static str, usize)> + '_ {
    REPORTED_TERMS
        .iter()
        .filter_map(move |name| fit.term(name).map(|i| (*name, i)))
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// One event's fit: a heading line, then `term,value,std_error,t_value,p_value,sig`.
pub fn fit_report_csv(fit: &GlsFit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", fit_heading(fit));
    out.push_str("term,value,std_error,t_value,p_value,sig\n");
    for (name, i) in reported_rows(fit) {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.4},{:.4},{}",
            csv_field(name),
            fit.coefficients[i],
            fit.std_errors[i],
            fit.t_values[i],
            fit.p_values[i],
            fit.significance[i]
        );
    }
    out
}

/// All fits in one tab-separated table, one block per event.
pub fn fits_table_text(fits: &[GlsFit], alpha: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "GLS segmented regression fits (significant when p < {alpha})");
    for fit in fits {
        let _ = writeln!(out, "{}", fit_heading(fit));
        out.push_str("\tValue\tStd.Error\tt-value\tp-value\tSig?\n");
        for (name, i) in reported_rows(fit) {
            let _ = writeln!(
                out,
                "{name}\t{:.6}\t{:.6}\t{:.4}\t{:.4}\t{}",
                fit.coefficients[i],
                fit.std_errors[i],
                fit.t_values[i],
                fit.p_values[i],
                fit.significance[i]
            );
        }
    }
    out
}

pub struct SummaryInputs<'a> {
    pub stats: &'a SummaryStats,
    pub sites: u64,
    pub ingest: &'a IngestConfig,
    pub events: usize,
    pub base_alpha: f64,
}

/// Dataset summary as `property<TAB>value` lines.
pub fn summary_text(inputs: &SummaryInputs<'_>) -> String {
    let SummaryInputs {
        stats,
        sites,
        ingest,
        events,
        base_alpha,
    } = inputs;
    let tags = ingest
        .tag_set
        .iter()
        .map(|t| format!("\"{t}\""))
        .collect::<Vec<_>>()
        .join(", ");
    let alpha = base_alpha / *events as f64;
    let rows = [
        ("Unique news websites analyzed", sites.to_string()),
        ("HTML tags processed", tags),
        ("Texts analyzed (N)", format_thousands(stats.n)),
        ("Minimum word requirement", ingest.min_words.to_string()),
        ("Mean clickbait score", format!("{:.5}", stats.mean)),
        ("Median clickbait score", format!("{:.5}", stats.median)),
        ("Mode clickbait score", format!("{:.5}", stats.mode)),
        ("Days averaged for the time series", stats.days.to_string()),
        ("Events analyzed", events.to_string()),
        (
            "Significance threshold (Bonferroni)",
            format!("< {alpha} ({base_alpha} / {events})"),
        ),
    ];
    let mut out = String::from("Property\tValue\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k}\t{v}");
    }
    out
}

pub fn histogram_csv(stats: &SummaryStats) -> String {
    let mut out = String::from("bin_midpoint,count\n");
    for (bin, count) in stats.histogram.iter().enumerate() {
        let _ = writeln!(out, "{:.3},{count}", bin_midpoint(bin));
    }
    out
}
