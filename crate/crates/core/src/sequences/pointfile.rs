//! Point file: UTF-8 text, one decimal literal per line, `#` comments.

use std::fs;
use std::path::Path;

use super::{SequenceKind, SequenceSample, SequenceSpec};
use crate::error::{Error, Result};
use crate::json::fmt_sig17;

pub fn load_points(path: impl AsRef<Path>) -> Result<SequenceSample> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let values = parse_points(&text, path)?;
    let n = values.len();
    Ok(SequenceSample::from_parts(
        values,
        SequenceSpec::new(
            SequenceKind::File {
                path: path.to_path_buf(),
            },
            n,
        ),
    ))
}

/// Parses point-file text; `origin` only labels error messages. Blank lines
/// are ignored like comments.
pub fn parse_points(text: &str, origin: &Path) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| Error::Parse {
            path: origin.to_path_buf(),
            line: idx + 1,
            text: line.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: idx + 1,
                text: line.to_string(),
            });
        }
        if !(0.0..1.0).contains(&value) {
            return Err(Error::OutOfRange {
                path: origin.to_path_buf(),
                line: idx + 1,
                value,
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(values)
}

/// Renders a sample as point-file text: one value per line with 17
/// significant digits, which round-trips every double. No header, so the
/// file has exactly `N` lines.
pub fn write_points(sample: &SequenceSample) -> String {
    let mut out = String::with_capacity(24 * sample.len());
    for v in sample.values() {
        out.push_str(&fmt_sig17(*v));
        out.push('\n');
    }
    out
}

pub fn write_points_to(sample: &SequenceSample, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_points(sample)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
