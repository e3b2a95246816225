//! Crawl archive ingestion: WARC streaming, crawl-day selection, headline
//! extraction and the length/language filters applied before scoring.

mod html;
mod warc;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, Utc, Weekday};
use serde::{Deserialize, Serialize};

use crate::text;
use crate::{Error, Result};

pub use html::{decode_html, extract_candidate_texts, extract_tagged_texts};
pub use warc::{open_warc, read_warc_stream, WarcReader, WarcScan};

/// Tags whose text is considered a candidate headline.
pub const DEFAULT_TAGS: [&str; 8] = [
    "a",
    "span",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "yt-formatted-string",
];

pub const DEFAULT_MIN_WORDS: usize = 3;
pub const DEFAULT_ASCII_RATIO: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub tag_set: BTreeSet<String>,
    pub min_words: usize,
    pub crawl_weekdays: WeekdaySet,
    pub english_filter_enabled: bool,
    pub english_ascii_ratio_threshold: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            tag_set: DEFAULT_TAGS.iter().map(|t| t.to_string()).collect(),
            min_words: DEFAULT_MIN_WORDS,
            crawl_weekdays: WeekdaySet::from_days(&[Weekday::Tue, Weekday::Fri]),
            english_filter_enabled: true,
            english_ascii_ratio_threshold: DEFAULT_ASCII_RATIO,
        }
    }
}

impl IngestConfig {
    /// Parses a JSON config document. Missing keys take their defaults; tag
    /// names are lowercased.
    pub fn from_json(json: &str) -> Result<Self> {
        let mut config: IngestConfig =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("ingest config: {e}")))?;
        config.tag_set = config.tag_set.iter().map(|t| t.to_ascii_lowercase()).collect();
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_json(&json)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_words == 0 {
            return Err(Error::Config("min_words must be at least 1".into()));
        }
        if self.tag_set.is_empty() {
            return Err(Error::Config("tag_set must not be empty".into()));
        }
        if !(0.0..=1.0).contains(&self.english_ascii_ratio_threshold) {
            return Err(Error::Config(format!(
                "english_ascii_ratio_threshold {} outside [0, 1]",
                self.english_ascii_ratio_threshold
            )));
        }
        Ok(())
    }

    pub fn accepts_tag(&self, tag: &str) -> bool {
        self.tag_set.contains(tag)
    }
}

/// A set of weekdays, serialized as a list of English day names.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct WeekdaySet(u8);

impl WeekdaySet {
    pub fn from_days(days: &[Weekday]) -> Self {
        let mut set = WeekdaySet(0);
        for day in days {
            set.insert(*day);
        }
        set
    }

    pub fn all() -> Self {
        WeekdaySet(0x7f)
    }

    pub fn insert(&mut self, day: Weekday) {
        self.0 |= 1 << day.num_days_from_monday();
    }

    pub fn contains(&self, day: Weekday) -> bool {
        self.0 & (1 << day.num_days_from_monday()) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Weekday> + '_ {
        (0..7u8)
            .filter(|i| self.0 & (1 << i) != 0)
            .filter_map(|i| Weekday::try_from(i).ok())
    }
}

impl fmt::Debug for WeekdaySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(weekday_name)).finish()
    }
}

impl Serialize for WeekdaySet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(weekday_name))
    }
}

impl<'de> Deserialize<'de> for WeekdaySet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(deserializer)?;
        let mut set = WeekdaySet(0);
        for name in names {
            let day = name
                .parse::<Weekday>()
                .map_err(|_| serde::de::Error::custom(format!("unknown weekday {name:?}")))?;
            set.insert(day);
        }
        Ok(set)
    }
}

pub fn weekday_name(day: Weekday) -> &'static str {
    match day {
        Weekday::Mon => "Monday",
        Weekday::Tue => "Tuesday",
        Weekday::Wed => "Wednesday",
        Weekday::Thu => "Thursday",
        Weekday::Fri => "Friday",
        Weekday::Sat => "Saturday",
        Weekday::Sun => "Sunday",
    }
}

/// Civil weekday of a proleptic Gregorian date.
pub fn weekday_of(year: i32, month: u32, day: u32) -> Result<Weekday> {
    NaiveDate::from_ymd_opt(year, month, day)
        .map(|d| d.weekday())
        .ok_or_else(|| Error::Input(format!("invalid date {year:04}-{month:02}-{day:02}")))
}

/// One WARC `response` record with the HTTP headers stripped from the payload.
#[derive(Debug, Clone, PartialEq)]
pub struct CrawlRecord {
    pub target_uri: String,
    pub warc_date: DateTime<Utc>,
    /// HTTP `Content-Type` of the payload; empty when the response carried none.
    pub content_type: String,
    pub payload: Vec<u8>,
}

impl CrawlRecord {
    pub fn media_type(&self) -> String {
        self.content_type
            .split(';')
            .next()
            .unwrap_or("")
            .trim()
            .to_ascii_lowercase()
    }

    pub fn is_html(&self) -> bool {
        matches!(self.media_type().as_str(), "text/html" | "application/xhtml+xml")
    }

    pub fn charset(&self) -> Option<&str> {
        charset_param(&self.content_type)
    }

    pub fn ymd(&self) -> NaiveDate {
        self.warc_date.date_naive()
    }
}

fn charset_param(content_type: &str) -> Option<&str> {
    content_type.split(';').skip(1).find_map(|param| {
        let (key, value) = param.split_once('=')?;
        key.trim()
            .eq_ignore_ascii_case("charset")
            .then(|| value.trim().trim_matches('"'))
    })
}

pub fn select_crawl_day(record: &CrawlRecord, config: &IngestConfig) -> bool {
    config.crawl_weekdays.contains(record.warc_date.weekday())
}

/// Fast, permissive English check: mostly basic-Latin letters and at least one
/// stopword from the built-in list. Other Latin-script languages that happen
/// to contain a listed word will pass.
pub fn is_probably_english(text: &str, config: &IngestConfig) -> bool {
    let (mut alphabetic, mut latin) = (0usize, 0usize);
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        alphabetic += 1;
        if c.is_ascii_alphabetic() {
            latin += 1;
        }
    }
    if alphabetic == 0 {
        return false;
    }
    let ratio = latin as f64 / alphabetic as f64;
    ratio >= config.english_ascii_ratio_threshold
        && text
            .split_whitespace()
            .any(|w| text::is_stopword(&text::fold_token(w)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedHeadline {
    pub ymd: NaiveDate,
    pub tag: String,
    pub page_url: String,
    pub text: String,
}

/// Per-stage counters for one ingest run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestCounts {
    pub records_read: usize,
    pub records_not_html: usize,
    pub records_off_day: usize,
    pub record_errors: usize,
    pub truncated_records: usize,
    pub texts_extracted: usize,
    pub filtered_length: usize,
    pub filtered_language: usize,
    pub texts_kept: usize,
}

impl IngestCounts {
    pub fn merge(&mut self, other: &IngestCounts) {
        self.records_read += other.records_read;
        self.records_not_html += other.records_not_html;
        self.records_off_day += other.records_off_day;
        self.record_errors += other.record_errors;
        self.truncated_records += other.truncated_records;
        self.texts_extracted += other.texts_extracted;
        self.filtered_length += other.filtered_length;
        self.filtered_language += other.filtered_language;
        self.texts_kept += other.texts_kept;
    }
}

/// Runs the day, media-type, length and language filters over one record.
pub fn headlines_from_record(
    record: &CrawlRecord,
    config: &IngestConfig,
    counts: &mut IngestCounts,
) -> Vec<ExtractedHeadline> {
    counts.records_read += 1;
    if !record.is_html() {
        counts.records_not_html += 1;
        return Vec::new();
    }
    if !select_crawl_day(record, config) {
        counts.records_off_day += 1;
        return Vec::new();
    }
    let html = decode_html(&record.payload, record.charset());
    let ymd = record.ymd();
    let mut out = Vec::new();
    for (tag, text) in extract_tagged_texts(&html, config) {
        counts.texts_extracted += 1;
        if text::word_count(&text) < config.min_words {
            counts.filtered_length += 1;
            continue;
        }
        if config.english_filter_enabled && !is_probably_english(&text, config) {
            counts.filtered_language += 1;
            continue;
        }
        counts.texts_kept += 1;
        out.push(ExtractedHeadline {
            ymd,
            tag,
            page_url: record.target_uri.clone(),
            text,
        });
    }
    out
}

/// Streams one WARC file (plain or gzip) through [`headlines_from_record`].
pub fn ingest_warc_file(
    path: &Path,
    config: &IngestConfig,
) -> Result<(Vec<ExtractedHeadline>, IngestCounts)> {
    let mut reader = open_warc(path)?;
    let mut counts = IngestCounts::default();
    let mut headlines = Vec::new();
    for item in reader.by_ref() {
        match item {
            Ok(record) => headlines.extend(headlines_from_record(&record, config, &mut counts)),
            Err(e) => {
                log::warn!("{}: {e}", path.display());
                counts.record_errors += 1;
            }
        }
    }
    counts.truncated_records = reader.truncated_records();
    Ok((headlines, counts))
}
