//! Persistent score table, CSV interchange, daily aggregation and
//! whole-dataset summary statistics.
//!
//! The canonical format is a single SQLite3 file holding one `scores` table.
//! Writes go through one connection in batch transactions; each aggregate is
//! a single `SELECT`, so readers never observe a partial batch.

mod csv_io;
mod series;

use std::path::Path;

use chrono::NaiveDate;
use rusqlite::{params, Connection, OptionalExtension};

use crate::{Error, Result};

pub use series::DailySeries;

pub const HISTOGRAM_BINS: usize = 100;

const SCHEMA: &str = "CREATE TABLE IF NOT EXISTS scores (
    id INTEGER PRIMARY KEY,
    ymd TEXT,
    tag TEXT,
    pageurl TEXT,
    headline TEXT,
    detector TEXT,
    score_1 REAL,
    score_2 REAL
)";

pub(crate) const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub id: i64,
    pub ymd: NaiveDate,
    pub tag: String,
    pub pageurl: String,
    pub headline: String,
    /// Comma-separated feature values.
    pub detector: String,
    pub score_1: f64,
    pub score_2: f64,
}

/// A row awaiting insertion; the store assigns the id.
#[derive(Debug, Clone, PartialEq)]
pub struct NewScoreRow {
    pub ymd: NaiveDate,
    pub tag: String,
    pub pageurl: String,
    pub headline: String,
    pub detector: String,
    pub score_1: f64,
    pub score_2: f64,
}

impl NewScoreRow {
    fn validate(&self) -> std::result::Result<(), String> {
        validate_scores(self.score_1, self.score_2)
    }
}

fn validate_scores(score_1: f64, score_2: f64) -> std::result::Result<(), String> {
    if !(0.0..=1.0).contains(&score_1) {
        return Err(format!("score_1 {score_1} outside [0, 1]"));
    }
    if !(0.0..=1.0).contains(&score_2) {
        return Err(format!("score_2 {score_2} outside [0, 1]"));
    }
    if (score_1 + score_2 - 1.0).abs() > 1e-12 {
        return Err(format!("score_2 {score_2} is not 1 - score_1 ({score_1})"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n: u64,
    pub mean: f64,
    /// Lower of the middle pair when `n` is even.
    pub median: f64,
    /// Most frequent exact value; ties go to the smallest value.
    pub mode: f64,
    /// Counts over 100 equal bins of [0, 1]; the last bin is closed on the right.
    pub histogram: Vec<u64>,
    pub days: u64,
}

pub fn histogram_bin(score: f64) -> usize {
    ((score * HISTOGRAM_BINS as f64).floor() as usize).min(HISTOGRAM_BINS - 1)
}

pub fn bin_midpoint(bin: usize) -> f64 {
    (bin as f64 + 0.5) / HISTOGRAM_BINS as f64
}

pub struct ScoreStore {
    conn: Connection,
}

impl ScoreStore {
    pub fn open(path: &Path) -> Result<Self> {
        let conn = Connection::open(path)?;
        conn.pragma_update(None, "synchronous", "NORMAL")?;
        Self::init(conn)
    }

    pub fn in_memory() -> Result<Self> {
        Self::init(Connection::open_in_memory()?)
    }

    fn init(conn: Connection) -> Result<Self> {
        conn.execute(SCHEMA, [])?;
        Ok(Self { conn })
    }

    pub fn row_count(&self) -> Result<u64> {
        let n: i64 = self
            .conn
            .query_row("SELECT COUNT(*) FROM scores", [], |r| r.get(0))?;
        Ok(n as u64)
    }

    /// Inserts every row or none. The first invalid row aborts the batch.
    pub fn insert_batch(&mut self, rows: &[NewScoreRow]) -> Result<usize> {
        if rows.is_empty() {
            return Ok(0);
        }
        for (index, row) in rows.iter().enumerate() {
            row.validate()
                .map_err(|reason| Error::RowRejected { index, reason })?;
        }
        let tx = self.conn.transaction()?;
        {
            let mut stmt = tx.prepare_cached(
                "INSERT INTO scores (ymd, tag, pageurl, headline, detector, score_1, score_2)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)",
            )?;
            for row in rows {
                stmt.execute(params![
                    row.ymd.format(DATE_FORMAT).to_string(),
                    row.tag,
                    row.pageurl,
                    row.headline,
                    row.detector,
                    row.score_1,
                    row.score_2
                ])?;
            }
        }
        tx.commit()?;
        Ok(rows.len())
    }

    /// Inserts rows keeping their ids; used by CSV import.
    pub(crate) fn insert_with_ids(&mut self, rows: &[(u64, ScoreRow)]) -> Result<usize> {
        let tx = self.conn.transaction()?;
        {
            let mut stmt = tx.prepare_cached(
                "INSERT INTO scores (id, ymd, tag, pageurl, headline, detector, score_1, score_2)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)",
            )?;
            for (line, row) in rows {
                validate_scores(row.score_1, row.score_2).map_err(|reason| Error::CsvLine {
                    line: *line,
                    reason,
                })?;
                stmt.execute(params![
                    row.id,
                    row.ymd.format(DATE_FORMAT).to_string(),
                    row.tag,
                    row.pageurl,
                    row.headline,
                    row.detector,
                    row.score_1,
                    row.score_2
                ])
                .map_err(|e| Error::CsvLine {
                    line: *line,
                    reason: e.to_string(),
                })?;
            }
        }
        tx.commit()?;
        Ok(rows.len())
    }

    /// All rows in id order.
    pub fn rows(&self) -> Result<Vec<ScoreRow>> {
        let mut stmt = self.conn.prepare(
            "SELECT id, ymd, tag, pageurl, headline, detector, score_1, score_2
             FROM scores ORDER BY id",
        )?;
        let rows = stmt.query_map([], |r| {
            Ok((
                r.get::<_, i64>(0)?,
                r.get::<_, String>(1)?,
                r.get::<_, String>(2)?,
                r.get::<_, String>(3)?,
                r.get::<_, String>(4)?,
                r.get::<_, String>(5)?,
                r.get::<_, f64>(6)?,
                r.get::<_, f64>(7)?,
            ))
        })?;
        let mut out = Vec::new();
        for row in rows {
            let (id, ymd, tag, pageurl, headline, detector, score_1, score_2) = row?;
            out.push(ScoreRow {
                id,
                ymd: parse_date(&ymd)?,
                tag,
                pageurl,
                headline,
                detector,
                score_1,
                score_2,
            });
        }
        Ok(out)
    }

    /// Recomputes the feature and score columns of every row.
    pub fn rescore(&mut self, detector: &crate::detector::Detector) -> Result<usize> {
        let rows: Vec<(i64, String)> = {
            let mut stmt = self.conn.prepare("SELECT id, headline FROM scores ORDER BY id")?;
            let mapped = stmt.query_map([], |r| Ok((r.get(0)?, r.get(1)?)))?;
            mapped.collect::<rusqlite::Result<_>>()?
        };
        let tx = self.conn.transaction()?;
        {
            let mut stmt = tx.prepare_cached(
                "UPDATE scores SET detector = ?1, score_1 = ?2, score_2 = ?3 WHERE id = ?4",
            )?;
            for (id, headline) in &rows {
                let (features, score) = detector.score_text(headline)?;
                stmt.execute(params![features.to_csv(), score.score_1, score.score_2, id])?;
            }
        }
        tx.commit()?;
        Ok(rows.len())
    }

    /// One mean of `score_1` per distinct day, ascending by date.
    pub fn aggregate_daily(&self) -> Result<DailySeries> {
        let mut stmt = self.conn.prepare(
            "SELECT ymd, SUM(score_1), COUNT(*) FROM scores GROUP BY ymd ORDER BY ymd",
        )?;
        let rows = stmt.query_map([], |r| {
            Ok((r.get::<_, String>(0)?, r.get::<_, f64>(1)?, r.get::<_, i64>(2)?))
        })?;
        let mut series = DailySeries::default();
        for row in rows {
            let (ymd, sum, count) = row?;
            series.dates.push(parse_date(&ymd)?);
            series.means.push(sum / count as f64);
            series.counts.push(count as u64);
        }
        if series.is_empty() {
            return Err(Error::EmptyStore);
        }
        Ok(series)
    }

    /// Streams every score in ascending order; memory use is constant in the
    /// number of rows.
    pub fn summary_stats(&self) -> Result<SummaryStats> {
        let n = self.row_count()?;
        if n == 0 {
            return Err(Error::EmptyStore);
        }
        let days: i64 = self
            .conn
            .query_row("SELECT COUNT(DISTINCT ymd) FROM scores", [], |r| r.get(0))?;
        let median_index = (n - 1) / 2;

        let mut stmt = self.conn.prepare("SELECT score_1 FROM scores ORDER BY score_1")?;
        let mut rows = stmt.query([])?;
        let mut sum = 0.0f64;
        let mut compensation = 0.0f64;
        let mut histogram = vec![0u64; HISTOGRAM_BINS];
        let mut median = f64::NAN;
        let (mut mode, mut mode_count) = (f64::NAN, 0u64);
        let (mut run_value, mut run_count) = (f64::NAN, 0u64);
        let mut index = 0u64;
        while let Some(row) = rows.next()? {
            let s: f64 = row.get(0)?;
            // Neumaier summation
            let t = sum + s;
            compensation += if sum.abs() >= s.abs() {
                (sum - t) + s
            } else {
                (s - t) + sum
            };
            sum = t;
            histogram[histogram_bin(s)] += 1;
            if index == median_index {
                median = s;
            }
            if s == run_value {
                run_count += 1;
            } else {
                run_value = s;
                run_count = 1;
            }
            // Ascending order means the first value to reach a count wins ties.
            if run_count > mode_count {
                mode = run_value;
                mode_count = run_count;
            }
            index += 1;
        }
        Ok(SummaryStats {
            n,
            mean: (sum + compensation) / n as f64,
            median,
            mode,
            histogram,
            days: days as u64,
        })
    }

    pub fn export_csv(&self, path: &Path) -> Result<usize> {
        let file = std::fs::File::create(path).map_err(|e| Error::file(path, e))?;
        csv_io::write_rows(&self.rows()?, file)
    }

    /// Appends the rows of a CSV produced by [`ScoreStore::export_csv`],
    /// keeping their ids. Atomic like [`ScoreStore::insert_batch`].
    pub fn import_csv(&mut self, path: &Path) -> Result<usize> {
        let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
        let rows = csv_io::read_rows(file)?;
        self.insert_with_ids(&rows)
    }

    /// Number of distinct hosts among the stored page URLs.
    pub fn distinct_sites(&self) -> Result<u64> {
        let mut stmt = self.conn.prepare("SELECT DISTINCT pageurl FROM scores")?;
        let mut rows = stmt.query([])?;
        let mut hosts = std::collections::BTreeSet::new();
        while let Some(row) = rows.next()? {
            let url: String = row.get(0)?;
            hosts.insert(url_host(&url));
        }
        Ok(hosts.len() as u64)
    }

    pub fn max_id(&self) -> Result<Option<i64>> {
        Ok(self
            .conn
            .query_row("SELECT MAX(id) FROM scores", [], |r| r.get::<_, Option<i64>>(0))
            .optional()?
            .flatten())
    }
}

/// Lowercased host of an absolute URL, or the whole string when it has no
/// scheme.
pub fn url_host(url: &str) -> String {
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    let authority = rest.split(['/', '?', '#']).next().unwrap_or("");
    let host = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
    let host = host.split(':').next().unwrap_or("");
    host.to_ascii_lowercase()
}

pub(crate) fn parse_date(text: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(text, DATE_FORMAT)
        .map_err(|_| Error::Input(format!("invalid date {text:?}")))
}
