//! Text formats for score sets, calibrations, and reports.
//!
//! Score file: one trial per line, `<label> <value>`, label `tgt` or `non`.
//! `#` starts a comment; blank lines are skipped. Key-value files
//! (calibrations, reports) use `<key> <value>` lines with the same comment
//! rules. Floats are written in the shortest form that parses back to the
//! same binary64 value.

use std::io::{BufRead, Write};

use crate::calibration::AffineCalibration;
use crate::error::{Error, Result};
use crate::scores::{Class, ScoreFileRecord, TrialScores};

/// Shortest round-trip representation, switching to exponent form for very
/// large or very small magnitudes.
pub fn format_float(x: f64) -> String {
    let ax = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&ax) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("non-numeric value `{token}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite value `{token}`")));
    }
    Ok(v)
}

/// Yields `(line_number, content)` for every non-blank, non-comment line.
fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(Error::Io(e))),
        };
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let content = content.trim();
        if content.is_empty() {
            None
        } else {
            Some(Ok((i + 1, content.to_string())))
        }
    })
}

fn parse_record(line: usize, content: &str) -> Result<ScoreFileRecord> {
    let mut fields = content.split_whitespace();
    let label = fields.next().unwrap_or_default();
    let label = Class::from_token(label)
        .ok_or_else(|| Error::parse(line, format!("unknown label `{label}`")))?;
    let value = fields
        .next()
        .ok_or_else(|| Error::parse(line, "missing score value"))?;
    let value = parse_float(value, line)?;
    if let Some(extra) = fields.next() {
        return Err(Error::parse(
            line,
            format!("unexpected trailing field `{extra}`"),
        ));
    }
    Ok(ScoreFileRecord { label, value })
}

pub fn parse_score_file<R: BufRead>(reader: R) -> Result<TrialScores> {
    content_lines(reader)
        .map(|l| l.and_then(|(n, c)| parse_record(n, &c)))
        .collect::<Result<Vec<_>>>()
        .map(TrialScores::from_iter)
}

pub fn write_score_file<W: Write>(scores: &TrialScores, mut out: W) -> Result<()> {
    for r in scores.records() {
        writeln!(out, "{} {}", r.label.token(), format_float(r.value))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `<key> <value>` pairs. Later duplicates override earlier ones.
pub fn read_key_values<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    content_lines(reader)
        .map(|l| {
            let (n, c) = l?;
            let mut it = c.splitn(2, char::is_whitespace);
            let key = it.next().unwrap_or_default().to_string();
            let value = it.next().map(str::trim).unwrap_or_default().to_string();
            if value.is_empty() {
                return Err(Error::parse(n, format!("key `{key}` has no value")));
            }
            Ok((key, value))
        })
        .collect()
}

pub fn read_calibration<R: BufRead>(reader: R) -> Result<AffineCalibration> {
    let mut a = None;
    let mut b = None;
    // Line numbers are needed for errors, so walk the raw lines here.
    for l in content_lines(reader) {
        let (n, c) = l?;
        let mut it = c.split_whitespace();
        match (it.next(), it.next()) {
            (Some("a"), Some(v)) => a = Some(parse_float(v, n)?),
            (Some("b"), Some(v)) => b = Some(parse_float(v, n)?),
            (Some("a" | "b"), None) => return Err(Error::parse(n, "missing value")),
            _ => {} // metadata
        }
    }
    let a = a.ok_or(Error::MissingField("a"))?;
    let b = b.ok_or(Error::MissingField("b"))?;
    AffineCalibration::new(a, b)
}

pub fn write_calibration<W: Write>(cal: &AffineCalibration, mut out: W) -> Result<()> {
    writeln!(out, "a {}", format_float(cal.a()))?;
    writeln!(out, "b {}", format_float(cal.b()))?;
    out.flush()?;
    Ok(())
}
