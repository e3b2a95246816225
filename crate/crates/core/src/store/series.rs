use std::path::Path;

use chrono::NaiveDate;

use super::{parse_date, DATE_FORMAT};
use crate::{Error, Result};

/// Daily mean clickbait scores in ascending date order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DailySeries {
    pub dates: Vec<NaiveDate>,
    pub means: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DailySeries {
    pub fn new(dates: Vec<NaiveDate>, means: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        let series = Self {
            dates,
            means,
            counts,
        };
        series.validate()?;
        Ok(series)
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.dates.first().copied()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }

    pub fn validate(&self) -> Result<()> {
        if self.means.len() != self.dates.len() || self.counts.len() != self.dates.len() {
            return Err(Error::Input("daily series columns differ in length".into()));
        }
        if let Some(w) = self.dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Input(format!(
                "dates not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(Error::Input("daily means must be finite".into()));
        }
        Ok(())
    }

    /// `date,mean,count` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,mean,count\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.dates[i].format(DATE_FORMAT),
                self.means[i],
                self.counts[i]
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut series = DailySeries::default();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: &str| Error::CsvLine {
                line: i as u64 + 1,
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(bad("expected date,mean,count"));
            }
            series
                .dates
                .push(parse_date(fields[0]).map_err(|_| bad("invalid date"))?);
            series
                .means
                .push(fields[1].parse().map_err(|_| bad("invalid mean"))?);
            series
                .counts
                .push(fields[2].parse().map_err(|_| bad("invalid count"))?);
        }
        series.validate()?;
        Ok(series)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_csv(&text)
    }
}
