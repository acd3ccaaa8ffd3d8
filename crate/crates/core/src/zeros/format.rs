//! Text formats for zero files.
//!
//! Both formats are ASCII, one value per LF-terminated line. Lines starting
//! with `#` are comments, except that a comment whose first word contains
//! `=` is a header of `key=value` pairs; unknown keys are rejected.
//!
//! * plain list: ordinates in increasing order. An optional
//!   `# start_index=<int>` header gives the index of the first zero.
//! * base/offset: a `# base=<decimal> start_index=<int>` header before the
//!   first value, then offsets from `base` in increasing order.

use std::io::{BufRead, Write};

use super::{is_decimal_literal, Decimal, ZeroSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatKind {
    PlainList,
    BaseOffset,
}

/// Metadata read from a header line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Header {
    pub base: Option<Decimal>,
    pub start_index: Option<u128>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_header(body: &str, line: usize) -> Result<Header> {
    let mut header = Header::default();
    for token in body.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| format_err(line, format!("header token {token:?} is not key=value")))?;
        match key {
            "base" => {
                if header.base.is_some() {
                    return Err(format_err(line, "duplicate base"));
                }
                header.base = Some(value.parse().map_err(|e: String| format_err(line, e))?);
            }
            "start_index" => {
                if header.start_index.is_some() {
                    return Err(format_err(line, "duplicate start_index"));
                }
                let idx: u128 = value
                    .parse()
                    .ok()
                    .filter(|&i| i > 0 && value.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| format_err(line, format!("bad start_index {value:?}")))?;
                header.start_index = Some(idx);
            }
            other => return Err(format_err(line, format!("unknown header key {other:?}"))),
        }
    }
    Ok(header)
}

/// Returns the header body if `comment` (text after `#`) is a header line.
fn header_body(comment: &str) -> Option<&str> {
    let body = comment.trim();
    body.split_whitespace()
        .next()
        .filter(|w| w.contains('='))
        .map(|_| body)
}

/// Reads a zero file in the given format.
pub fn parse_zeros<R: BufRead>(mut reader: R, kind: FormatKind) -> Result<ZeroSet> {
    let mut header: Option<Header> = None;
    let mut offsets: Vec<f64> = Vec::new();
    let mut buf = Vec::new();
    let mut line = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line += 1;
        if !buf.is_ascii() {
            return Err(format_err(line, "non-ASCII input"));
        }
        let text = std::str::from_utf8(&buf).expect("ascii is utf-8");
        let text = text.trim_end_matches(['\n', '\r']).trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if let Some(body) = header_body(comment) {
                if header.is_some() {
                    return Err(format_err(line, "second header line"));
                }
                if !offsets.is_empty() {
                    return Err(format_err(line, "header after data"));
                }
                let h = parse_header(body, line)?;
                match kind {
                    FormatKind::PlainList => {
                        if h.base.as_ref().is_some_and(|b| !b.is_zero()) {
                            return Err(format_err(line, "plain list cannot carry a nonzero base"));
                        }
                    }
                    FormatKind::BaseOffset => {
                        if h.base.is_none() || h.start_index.is_none() {
                            return Err(format_err(
                                line,
                                "base/offset header needs base=<decimal> start_index=<int>",
                            ));
                        }
                    }
                }
                header = Some(h);
            }
            continue;
        }
        if kind == FormatKind::BaseOffset && header.is_none() {
            return Err(format_err(line, "value before base/offset header"));
        }
        let allow_minus = kind == FormatKind::BaseOffset;
        if !is_decimal_literal(text, allow_minus) {
            return Err(format_err(line, format!("unparsable value {text:?}")));
        }
        let value: f64 = text
            .parse()
            .map_err(|_| format_err(line, format!("unparsable value {text:?}")))?;
        if !value.is_finite() {
            return Err(format_err(line, format!("value out of range {text:?}")));
        }
        if offsets.last().is_some_and(|&prev| value <= prev) {
            return Err(Error::Monotonicity { line });
        }
        offsets.push(value);
    }
    if kind == FormatKind::BaseOffset && header.is_none() {
        return Err(format_err(line.max(1), "missing base/offset header"));
    }
    let header = header.unwrap_or_default();
    // A plain list's base is zero however the header spells it.
    let base = match kind {
        FormatKind::PlainList => Decimal::zero(),
        FormatKind::BaseOffset => header.base.unwrap_or_else(Decimal::zero),
    };
    ZeroSet::new(base, offsets, header.start_index.unwrap_or(1))
}

/// Writes a zero set. Values are printed in the shortest form that
/// parses back to the same double.
pub fn write_zeros<W: Write>(mut out: W, zeros: &ZeroSet, kind: FormatKind) -> Result<()> {
    match kind {
        FormatKind::PlainList => {
            if !zeros.base().is_zero() {
                return Err(Error::param(
                    "zero set with a nonzero base needs the base/offset format",
                ));
            }
            if zeros
                .offsets()
                .first()
                .is_some_and(|v| v.is_sign_negative())
            {
                return Err(Error::param("a plain list cannot hold negative ordinates"));
            }
            writeln!(out, "# start_index={}", zeros.start_index())?;
        }
        FormatKind::BaseOffset => {
            writeln!(
                out,
                "# base={} start_index={}",
                zeros.base(),
                zeros.start_index()
            )?;
        }
    }
    for v in zeros.offsets() {
        writeln!(out, "{v:?}")?;
    }
    Ok(())
}
