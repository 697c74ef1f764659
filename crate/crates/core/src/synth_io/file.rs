//! Text tensor files and JSON reports.
//!
//! A tensor file is a header line `tns v1 <L> <d1> … <dL>` followed by the
//! entries in row-major order, one per line, printed with 17 significant
//! digits so that reading back is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

pub const SCHEMA_VERSION: u32 = 1;

/// Renders a tensor in the text format.
pub fn format_tensor(t: &DenseTensor) -> String {
    let mut out = String::with_capacity(24 * (t.len() + 1));
    out.push_str("tns v1 ");
    out.push_str(&t.order().to_string());
    for d in t.dims() {
        write!(out, " {d}").unwrap();
    }
    out.push('\n');
    for v in t.data() {
        writeln!(out, "{v:.16e}").unwrap();
    }
    out
}

/// Parses the text format; `path` is used only in error messages.
pub fn parse_tensor(text: &str, path: &Path) -> Result<DenseTensor> {
    let malformed = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 3 || fields[0] != "tns" || fields[1] != "v1" {
        return Err(malformed(format!("bad header `{header}`")));
    }
    let order: usize = fields[2]
        .parse()
        .map_err(|_| malformed(format!("bad order `{}`", fields[2])))?;
    if order == 0 || fields.len() != 3 + order {
        return Err(malformed(format!(
            "header declares order {order} but lists {} dims",
            fields.len() - 3
        )));
    }
    let dims = fields[3..]
        .iter()
        .map(|f| match f.parse::<usize>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(malformed(format!("bad dimension `{f}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = crate::tensor::checked_size(&dims)?;
    let data = body
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| malformed(format!("bad value `{tok}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if data.len() != expected {
        return Err(malformed(format!(
            "dims {dims:?} need {expected} values, found {}",
            data.len()
        )));
    }
    DenseTensor::new(dims, data)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_tensor(t)).map_err(|e| Error::io(path, e))
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tensor(&text, path)
}

/// JSON envelope shared by every report.
#[derive(Serialize)]
pub struct ReportEnvelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    #[serde(flatten)]
    pub report: &'a T,
}

impl<'a, T: Serialize> ReportEnvelope<'a, T> {
    pub fn new(kind: &'a str, report: &'a T, timestamp: bool) -> Self {
        let generated_at_unix = timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            generated_at_unix,
            report,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Writes `report` wrapped in the versioned envelope, without a timestamp.
pub fn write_report_json<T: Serialize>(
    path: impl AsRef<Path>,
    kind: &str,
    report: &T,
) -> Result<()> {
    let path = path.as_ref();
    let json = ReportEnvelope::new(kind, report, false).to_json()?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_mismatch_is_rejected() {
        let err = parse_tensor("tns v1 2 2 2\n1\n2\n3\n", Path::new("t.tns")).unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err}");
        assert!(err.to_string().contains("t.tns"));
    }

    #[test]
    fn malformed_headers() {
        for text in [
            "",
            "tns v2 1 1\n0\n",
            "tns v1 2 2\n0 0\n",
            "tns v1 1 0\n",
            "tensor v1 1 1\n0\n",
            "tns v1 1 1\nabc\n",
        ] {
            assert!(parse_tensor(text, Path::new("x")).is_err(), "{text:?}");
        }
    }

    #[test]
    fn header_layout() {
        let t = DenseTensor::new(vec![2, 1], vec![0.1, -2.5]).unwrap();
        let text = format_tensor(&t);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tns v1 2 2 1"));
        assert_eq!(lines.count(), 2);
        assert_eq!(parse_tensor(&text, Path::new("x")).unwrap(), t);
    }

    #[test]
    fn missing_file_reports_path() {
        let err = read_tensor("/nonexistent/dir/t.tns").unwrap_err();
        assert!(err.is_io());
        assert!(err.to_string().contains("/nonexistent/dir/t.tns"));
    }

    #[test]
    fn envelope_has_schema_version() {
        #[derive(Serialize)]
        struct R {
            value: u32,
        }
        let json = ReportEnvelope::new("demo", &R { value: 3 }, false)
            .to_json()
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["kind"], "demo");
        assert_eq!(v["value"], 3);
        assert!(v.get("generated_at_unix").is_none());
    }
}
