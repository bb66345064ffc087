//! Fixed-schema CSV for aggregate series.
//!
//! `round,<obs>_mean,<obs>_std,...` with observables in [`Observable::ALL`]
//! order, values printed with six significant digits, `\n` line endings.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{AggregateSeries, Column, Observable};
use crate::error::MetricsError;

pub const CSV_HEADER_PREFIX: &str = "round";

/// Six significant digits, no exponent, trailing zeros trimmed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn header() -> String {
    let mut h = String::from(CSV_HEADER_PREFIX);
    for o in Observable::ALL {
        h.push_str(&format!(",{0}_mean,{0}_std", o.name()));
    }
    h
}

/// Writes the series to any byte sink.
pub fn write_csv_to<W: Write>(series: &AggregateSeries, mut out: W) -> std::io::Result<()> {
    let mut text = header();
    text.push('\n');
    for (i, round) in series.rounds.iter().enumerate() {
        text.push_str(&round.to_string());
        for o in Observable::ALL {
            let c = series.column(o);
            text.push(',');
            text.push_str(&format_sig6(c.mean[i]));
            text.push(',');
            text.push_str(&format_sig6(c.std[i]));
        }
        text.push('\n');
    }
    out.write_all(text.as_bytes())
}

pub fn write_csv(series: &AggregateSeries, path: &Path) -> Result<(), MetricsError> {
    let io = |source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv_to(series, &mut buf).map_err(io)?;
    buf.flush().map_err(io)
}

/// Reads a CSV written by [`write_csv`]. Config hash and seeds are not part
/// of the CSV and come back empty.
pub fn read_csv(path: &Path) -> Result<AggregateSeries, MetricsError> {
    let text = fs::read_to_string(path).map_err(|source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text, path)
}

pub(crate) fn parse_csv(text: &str, path: &Path) -> Result<AggregateSeries, MetricsError> {
    let err = |row: usize, column: usize, reason: String| MetricsError::Csv {
        path: path.to_path_buf(),
        row,
        column,
        reason,
    };
    let mut lines = text.lines();
    let expected = header();
    match lines.next() {
        Some(h) if h == expected => {}
        Some(h) => {
            let column = h
                .split(',')
                .zip(expected.split(','))
                .position(|(a, b)| a != b)
                .unwrap_or_else(|| h.split(',').count().min(expected.split(',').count()));
            return Err(err(1, column + 1, "header does not match the series schema".into()));
        }
        None => return Err(err(1, 1, "empty file".into())),
    }
    let width = 1 + 2 * Observable::ALL.len();
    let mut rounds = Vec::new();
    let mut columns: Vec<Column> = Observable::ALL
        .into_iter()
        .map(|observable| Column {
            observable,
            mean: Vec::new(),
            std: Vec::new(),
        })
        .collect();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(err(
                row,
                fields.len().min(width) + 1,
                format!("expected {width} fields, found {}", fields.len()),
            ));
        }
        let round = fields[0]
            .parse::<u64>()
            .map_err(|e| err(row, 1, format!("bad round `{}`: {e}", fields[0])))?;
        rounds.push(round);
        for (k, col) in columns.iter_mut().enumerate() {
            for (offset, target) in [(1, &mut col.mean), (2, &mut col.std)] {
                let idx = 2 * k + offset;
                let v = fields[idx]
                    .parse::<f64>()
                    .map_err(|e| err(row, idx + 1, format!("bad number `{}`: {e}", fields[idx])))?;
                target.push(v);
            }
        }
    }
    Ok(AggregateSeries {
        rounds,
        columns,
        config_hash: String::new(),
        seeds: Vec::new(),
    })
}
