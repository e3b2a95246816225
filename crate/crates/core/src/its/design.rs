use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::EventSpec;
use crate::store::DailySeries;
use crate::{Error, Result};

pub const TERM_NAMES: [&str; 4] = ["(Intercept)", "T", "D", "P"];

const WARN_SIDE_OBSERVATIONS: usize = 4;

/// How the T and P columns count time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeIndex {
    /// T = 1..n over observations; P counts observations from the event row.
    #[default]
    Observation,
    /// T counts calendar days from the first observation (first = 1); P counts
    /// calendar days from the event row's date (event row = 1).
    CalendarDay,
}

/// Segmented regression design: intercept, time trend T, event step D and
/// post-event trend P.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedDesign {
    pub event: EventSpec,
    pub dates: Vec<NaiveDate>,
    pub response: Vec<f64>,
    pub time: Vec<f64>,
    pub step: Vec<f64>,
    pub post: Vec<f64>,
    /// 0-based index of the first observation on or after the event date.
    pub event_index: usize,
    pub time_index: TimeIndex,
}

impl SegmentedDesign {
    pub fn len(&self) -> usize {
        self.response.len()
    }

    pub fn is_empty(&self) -> bool {
        self.response.is_empty()
    }

    /// Columns in `TERM_NAMES` order.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        vec![
            vec![1.0; self.len()],
            self.time.clone(),
            self.step.clone(),
            self.post.clone(),
        ]
    }

    /// The same design with a different response, e.g. for simulation.
    pub fn with_response(&self, response: Vec<f64>) -> Result<Self> {
        if response.len() != self.len() {
            return Err(Error::Input("response length does not match the design".into()));
        }
        Ok(Self {
            response,
            ..self.clone()
        })
    }

    /// Design from raw columns, bypassing the date logic. For callers that
    /// build their own T/D/P coding.
    pub fn from_columns(
        event: EventSpec,
        response: Vec<f64>,
        time: Vec<f64>,
        step: Vec<f64>,
        post: Vec<f64>,
    ) -> Result<Self> {
        let n = response.len();
        if time.len() != n || step.len() != n || post.len() != n {
            return Err(Error::Input("design columns differ in length".into()));
        }
        let event_index = step.iter().position(|&d| d != 0.0).unwrap_or(n);
        Ok(Self {
            dates: vec![event.date; n],
            event,
            response,
            time,
            step,
            post,
            event_index,
            time_index: TimeIndex::Observation,
        })
    }
}

pub fn build_design(
    series: &DailySeries,
    event: &EventSpec,
    time_index: TimeIndex,
) -> Result<SegmentedDesign> {
    series.validate()?;
    let (Some(first), Some(last)) = (series.first_date(), series.last_date()) else {
        return Err(Error::Input("series is empty".into()));
    };
    if event.date < first || event.date > last {
        return Err(Error::Input(format!(
            "event {:?} on {} is outside the series range {first} to {last}",
            event.name, event.date
        )));
    }
    let n = series.len();
    let event_index = series.dates.partition_point(|d| *d < event.date);
    let (before, after) = (event_index, n - event_index);
    if before < 2 || after < 2 {
        return Err(Error::Input(format!(
            "event {:?} leaves {before} observations before and {after} after; need at least 2 each",
            event.name
        )));
    }
    if before < WARN_SIDE_OBSERVATIONS || after < WARN_SIDE_OBSERVATIONS {
        log::warn!(
            "event {:?}: only {before} observations before and {after} after",
            event.name
        );
    }

    let (time, post): (Vec<f64>, Vec<f64>) = match time_index {
        TimeIndex::Observation => (0..n)
            .map(|i| {
                let p = if i >= event_index { (i - event_index + 1) as f64 } else { 0.0 };
                ((i + 1) as f64, p)
            })
            .unzip(),
        TimeIndex::CalendarDay => {
            let event_day = series.dates[event_index];
            series
                .dates
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let t = (*d - first).num_days() as f64 + 1.0;
                    let p = if i >= event_index {
                        (*d - event_day).num_days() as f64 + 1.0
                    } else {
                        0.0
                    };
                    (t, p)
                })
                .unzip()
        }
    };
    let step = (0..n)
        .map(|i| if i >= event_index { 1.0 } else { 0.0 })
        .collect();

    Ok(SegmentedDesign {
        event: event.clone(),
        dates: series.dates.clone(),
        response: series.means.clone(),
        time,
        step,
        post,
        event_index,
        time_index,
    })
}
