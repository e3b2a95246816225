use std::io::{Read, Write};

use super::{parse_date, ScoreRow, DATE_FORMAT};
use crate::{Error, Result};

const HEADER: [&str; 8] = [
    "id", "ymd", "tag", "pageurl", "headline", "detector", "score_1", "score_2",
];

pub(super) fn write_rows<W: Write>(rows: &[ScoreRow], out: W) -> Result<usize> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;
    for row in rows {
        writer.write_record([
            row.id.to_string(),
            row.ymd.format(DATE_FORMAT).to_string(),
            row.tag.clone(),
            row.pageurl.clone(),
            row.headline.clone(),
            row.detector.clone(),
            row.score_1.to_string(),
            row.score_2.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(rows.len())
}

/// Parses rows, pairing each with its 1-based line number for later errors.
pub(super) fn read_rows<R: Read>(input: R) -> Result<Vec<(u64, ScoreRow)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::CsvLine {
            line: 1,
            reason: format!("expected header {}", HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |reason: String| Error::CsvLine { line, reason };
        if record.len() != HEADER.len() {
            return Err(bad(format!("expected 8 fields, found {}", record.len())));
        }
        let number = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|_| bad(format!("{} is not a number: {:?}", HEADER[i], &record[i])))
        };
        let id = record[0]
            .parse::<i64>()
            .map_err(|_| bad(format!("id is not an integer: {:?}", &record[0])))?;
        let ymd = parse_date(&record[1]).map_err(|e| bad(e.to_string()))?;
        rows.push((
            line,
            ScoreRow {
                id,
                ymd,
                tag: record[2].to_string(),
                pageurl: record[3].to_string(),
                headline: record[4].to_string(),
                detector: record[5].to_string(),
                score_1: number(6)?,
                score_2: number(7)?,
            },
        ));
    }
    Ok(rows)
}
