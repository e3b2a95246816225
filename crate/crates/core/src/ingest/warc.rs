//! Streaming WARC/1.0 and WARC/1.1 reader.
//!
//! Input may be plain, gzip member-per-record, or gzip whole-file; the decoder
//! is chosen by sniffing the gzip magic bytes. Byte offsets in errors refer to
//! the decompressed stream.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use chrono::{DateTime, Utc};
use flate2::read::MultiGzDecoder;

use super::CrawlRecord;
use crate::{Error, Result};

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

pub struct WarcReader<R> {
    inner: R,
    offset: u64,
    pending_line: Option<Vec<u8>>,
    truncated: usize,
    done: bool,
}

/// Opens a WARC file, transparently decompressing gzip input.
pub fn open_warc(path: &Path) -> Result<WarcReader<Box<dyn BufRead + Send>>> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    WarcReader::sniffed(file).map_err(|e| Error::file(path, e))
}

impl WarcReader<Box<dyn BufRead + Send>> {
    pub fn sniffed<S: Read + Send + 'static>(source: S) -> io::Result<Self> {
        let mut buffered = BufReader::new(source);
        let head = buffered.fill_buf()?;
        let inner: Box<dyn BufRead + Send> = if head.starts_with(&GZIP_MAGIC) {
            Box::new(BufReader::new(MultiGzDecoder::new(buffered)))
        } else {
            Box::new(buffered)
        };
        Ok(WarcReader::new(inner))
    }
}

impl<R: BufRead> WarcReader<R> {
    /// Wraps an already-decompressed stream.
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            offset: 0,
            pending_line: None,
            truncated: 0,
            done: false,
        }
    }

    /// Records cut short by end of input. At most one per stream, since
    /// reading stops at the first truncation.
    pub fn truncated_records(&self) -> usize {
        self.truncated
    }

    fn read_line(&mut self) -> io::Result<Option<Vec<u8>>> {
        if let Some(line) = self.pending_line.take() {
            self.offset += line.len() as u64;
            return Ok(Some(line));
        }
        let mut line = Vec::new();
        let n = self.inner.read_until(b'\n', &mut line)?;
        if n == 0 {
            return Ok(None);
        }
        self.offset += n as u64;
        Ok(Some(line))
    }

    fn unread_line(&mut self, line: Vec<u8>) {
        self.offset -= line.len() as u64;
        self.pending_line = Some(line);
    }

    /// Skips ahead to the next line that opens a WARC record.
    fn resync(&mut self) -> io::Result<()> {
        while let Some(line) = self.read_line()? {
            if line.starts_with(b"WARC/") {
                self.unread_line(line);
                break;
            }
        }
        Ok(())
    }

    fn malformed(&mut self, offset: u64, reason: impl Into<String>) -> Option<Result<CrawlRecord>> {
        if let Err(e) = self.resync() {
            return Some(self.io_failure(e));
        }
        Some(Err(Error::Warc {
            offset,
            reason: reason.into(),
        }))
    }

    fn truncation(&mut self) -> Option<Result<CrawlRecord>> {
        self.truncated += 1;
        self.done = true;
        None
    }

    fn io_failure(&mut self, e: io::Error) -> Result<CrawlRecord> {
        self.done = true;
        Err(Error::Io(e))
    }

    fn next_record(&mut self) -> Option<Result<CrawlRecord>> {
        loop {
            // Blank lines separate records.
            let version = loop {
                match self.read_line() {
                    Ok(Some(line)) if trim_eol(&line).is_empty() => continue,
                    Ok(Some(line)) => break line,
                    Ok(None) => {
                        self.done = true;
                        return None;
                    }
                    Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return self.truncation(),
                    Err(e) => return Some(self.io_failure(e)),
                }
            };
            let start = self.offset - version.len() as u64;
            let version = trim_eol(&version);
            if version != b"WARC/1.0" && version != b"WARC/1.1" {
                let shown = String::from_utf8_lossy(&version[..version.len().min(40)]).into_owned();
                return self.malformed(start, format!("unrecognized version line {shown:?}"));
            }

            let mut headers: Vec<(String, String)> = Vec::new();
            loop {
                let line = match self.read_line() {
                    Ok(Some(line)) => line,
                    Ok(None) => return self.truncation(),
                    Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return self.truncation(),
                    Err(e) => return Some(self.io_failure(e)),
                };
                let content = trim_eol(&line);
                if content.is_empty() {
                    break;
                }
                if content[0] == b' ' || content[0] == b'\t' {
                    match headers.last_mut() {
                        Some((_, value)) => {
                            value.push(' ');
                            value.push_str(String::from_utf8_lossy(content).trim());
                            continue;
                        }
                        None => return self.malformed(start, "continuation line before any field"),
                    }
                }
                let content = String::from_utf8_lossy(content);
                match content.split_once(':') {
                    Some((name, value)) if !name.trim().is_empty() => {
                        headers.push((name.trim().to_string(), value.trim().to_string()))
                    }
                    _ => {
                        let reason = format!("header line without field name: {content:?}");
                        return self.malformed(start, reason);
                    }
                }
            }

            let field = |name: &str| -> Option<&str> {
                headers
                    .iter()
                    .find(|(k, _)| k.eq_ignore_ascii_case(name))
                    .map(|(_, v)| v.as_str())
            };
            let length = match field("Content-Length").map(str::parse::<u64>) {
                Some(Ok(n)) => n,
                Some(Err(_)) => return self.malformed(start, "Content-Length is not a number"),
                None => return self.malformed(start, "missing Content-Length"),
            };
            let record_type = field("WARC-Type").unwrap_or("").to_ascii_lowercase();
            let target_uri = field("WARC-Target-URI").unwrap_or("").to_string();
            let date = field("WARC-Date").map(str::to_string);

            let mut block = Vec::with_capacity(length.min(1 << 24) as usize);
            match (&mut self.inner).take(length).read_to_end(&mut block) {
                Ok(n) if (n as u64) < length => return self.truncation(),
                Ok(n) => self.offset += n as u64,
                Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return self.truncation(),
                Err(e) => return Some(self.io_failure(e)),
            }

            if record_type != "response" {
                continue;
            }
            let warc_date = match date.as_deref().map(DateTime::parse_from_rfc3339) {
                Some(Ok(d)) => d.with_timezone(&Utc),
                Some(Err(_)) | None => {
                    return Some(Err(Error::Warc {
                        offset: start,
                        reason: "missing or invalid WARC-Date".into(),
                    }))
                }
            };
            let (content_type, payload) = split_http(block);
            return Some(Ok(CrawlRecord {
                target_uri,
                warc_date,
                content_type,
                payload,
            }));
        }
    }
}

impl<R: BufRead> Iterator for WarcReader<R> {
    type Item = Result<CrawlRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.next_record()
    }
}

fn trim_eol(line: &[u8]) -> &[u8] {
    let line = line.strip_suffix(b"\n").unwrap_or(line);
    line.strip_suffix(b"\r").unwrap_or(line)
}

/// Separates an HTTP response message into its `Content-Type` and body.
/// Blocks that do not start with an HTTP status line are returned whole.
fn split_http(block: Vec<u8>) -> (String, Vec<u8>) {
    if !block.starts_with(b"HTTP/") {
        return (String::new(), block);
    }
    let Some((header_end, body_start)) = find_header_end(&block) else {
        return (String::new(), Vec::new());
    };
    let head = String::from_utf8_lossy(&block[..header_end]);
    let content_type = head
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once(':'))
        .find(|(k, _)| k.trim().eq_ignore_ascii_case("content-type"))
        .map(|(_, v)| v.trim().to_string())
        .unwrap_or_default();
    (content_type, block[body_start..].to_vec())
}

fn find_header_end(block: &[u8]) -> Option<(usize, usize)> {
    if let Some(i) = block.windows(4).position(|w| w == b"\r\n\r\n") {
        return Some((i, i + 4));
    }
    block
        .windows(2)
        .position(|w| w == b"\n\n")
        .map(|i| (i, i + 2))
}

/// Everything read from one stream, for callers that do not need to stream.
#[derive(Debug, Default)]
pub struct WarcScan {
    pub records: Vec<CrawlRecord>,
    pub errors: Vec<Error>,
    pub truncated: usize,
}

pub fn read_warc_stream<S: Read + Send + 'static>(source: S) -> Result<WarcScan> {
    let mut reader = WarcReader::sniffed(source)?;
    let mut scan = WarcScan::default();
    for item in reader.by_ref() {
        match item {
            Ok(record) => scan.records.push(record),
            Err(e) => scan.errors.push(e),
        }
    }
    scan.truncated = reader.truncated_records();
    Ok(scan)
}
