//! JSON Lines stroke logs: a header object on line 1, then one record per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::PainterConfig;
use crate::error::{Error, Result};
use crate::events::LogRecord;
use crate::latent::Shape;

pub const FORMAT_NAME: &str = "latent-brush-strokes";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub format: String,
    pub version: u32,
    pub shape: Shape,
    /// Number of snapshots in the painted trajectory.
    pub steps: usize,
    pub config: PainterConfig,
}

impl LogHeader {
    pub fn new(shape: Shape, steps: usize, config: PainterConfig) -> Self {
        LogHeader { format: FORMAT_NAME.to_string(), version: FORMAT_VERSION, shape, steps, config }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrokeLog {
    pub header: LogHeader,
    pub records: Vec<LogRecord>,
}

impl StrokeLog {
    /// Checks format/version, event bounds, and frame index ordering.
    pub fn validate(&self) -> Result<()> {
        let h = &self.header;
        if h.format != FORMAT_NAME {
            return Err(Error::validation(format!("unknown log format {:?}", h.format)));
        }
        if h.version != FORMAT_VERSION {
            return Err(Error::validation(format!("unsupported log version {}", h.version)));
        }
        let strict = h.config.strokes_per_frame == 1;
        let mut last: Option<u64> = None;
        for (i, rec) in self.records.iter().enumerate() {
            if let LogRecord::Stroke(e) = rec {
                if e.channel >= h.shape.channels || e.center_x >= h.shape.width || e.center_y >= h.shape.height {
                    return Err(Error::validation(format!(
                        "record {i}: stroke (c={}, x={}, y={}) outside {}",
                        e.channel, e.center_x, e.center_y, h.shape
                    )));
                }
            }
            let Some(frame) = rec.frame_index() else { continue };
            if let Some(prev) = last {
                let flush = matches!(rec, LogRecord::Flush { .. });
                let ok = if strict || flush { frame > prev } else { frame >= prev };
                if !ok {
                    return Err(Error::validation(format!(
                        "record {i}: frame {frame} does not follow frame {prev}"
                    )));
                }
            }
            last = Some(frame);
        }
        Ok(())
    }
}

pub fn write_stroke_log(log: &StrokeLog, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let line = |v: serde_json::Result<String>| v.map_err(|e| Error::format(e.to_string()));
    writeln!(w, "{}", line(serde_json::to_string(&log.header))?)?;
    for rec in &log.records {
        writeln!(w, "{}", line(serde_json::to_string(rec))?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stroke_log(path: impl AsRef<Path>) -> Result<StrokeLog> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| Error::format("empty stroke log"))?;
    let header: LogHeader =
        serde_json::from_str(&first?).map_err(|e| Error::format(format!("line 1: {e}")))?;
    let mut records = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::format(format!("line {}: {e}", i + 1)))?;
        records.push(rec);
    }
    let log = StrokeLog { header, records };
    log.validate()?;
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{FlushRecord, StrokeEvent};

    fn header() -> LogHeader {
        LogHeader::new(Shape::new(4, 8, 8).unwrap(), 3, PainterConfig::default())
    }

    fn stroke(frame: u64, channel: usize) -> LogRecord {
        LogRecord::Stroke(StrokeEvent { frame_index: frame, iteration: 0, channel, center_x: 1, center_y: 2, radius: 2 })
    }

    #[test]
    fn empty_log_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let log = StrokeLog { header: header(), records: vec![] };
        write_stroke_log(&log, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
        assert_eq!(read_stroke_log(&path).unwrap(), log);
    }

    #[test]
    fn round_trip_with_flush() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let log = StrokeLog {
            header: header(),
            records: vec![
                stroke(0, 1),
                stroke(1, 3),
                LogRecord::Flush { flush: FlushRecord { frame_index: Some(2), iteration: 2 } },
            ],
        };
        write_stroke_log(&log, &path).unwrap();
        assert_eq!(read_stroke_log(&path).unwrap(), log);
    }

    #[test]
    fn corrupted_channel_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let log = StrokeLog { header: header(), records: vec![stroke(0, 1)] };
        write_stroke_log(&log, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap().replace("\"channel\":1", "\"channel\":9");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(read_stroke_log(&path), Err(Error::Validation(_))));
    }

    #[test]
    fn frames_must_advance() {
        let log = StrokeLog { header: header(), records: vec![stroke(1, 0), stroke(1, 0)] };
        assert!(log.validate().is_err());
        let mut grouped = log.clone();
        grouped.header.config.strokes_per_frame = 2;
        grouped.validate().unwrap();
        let back = StrokeLog { header: grouped.header.clone(), records: vec![stroke(2, 0), stroke(1, 0)] };
        assert!(back.validate().is_err());
    }
}
