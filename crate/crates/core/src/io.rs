//! CSV and JSON serialization of profiles, fields and reports. Floats in CSV
//! carry 17 significant digits.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::cone::ProfileSolution;
use crate::fd::PolarField;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: Vec<String>, found: Vec<String> },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table of floats under `header`.
pub fn csv_table<I>(header: &[&str], rows: I) -> Result<String, IoError>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.as_ref().iter().map(|&v| fmt_f64(v)))?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::File {
        path: "<buffer>".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("formatted floats are ASCII"))
}

/// `theta,phi,dphi` at the profile samples.
pub fn profile_csv(profile: &ProfileSolution) -> Result<String, IoError> {
    csv_table(
        &["theta", "phi", "dphi"],
        (0..profile.theta.len()).map(|k| [profile.theta[k], profile.phi[k], profile.dphi[k]]),
    )
}

/// `r,theta,value`, one row per node in node order.
pub fn field_csv(field: &PolarField) -> Result<String, IoError> {
    csv_table(&["r", "theta", "value"], field.rows().map(|(r, t, v)| [r, t, v]))
}

/// Rows of a float CSV whose header must equal `header`.
pub fn parse_csv(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(IoError::Header {
            expected: header.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|e| IoError::Parse {
                    line,
                    message: format!("{s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(row);
    }
    Ok(out)
}

/// `(r, θ, value)` triples from an `r,theta,value` CSV.
pub fn parse_samples(text: &str) -> Result<Vec<(f64, f64, f64)>, IoError> {
    Ok(parse_csv(text, &["r", "theta", "value"])?
        .into_iter()
        .map(|v| (v[0], v[1], v[2]))
        .collect())
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, IoError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::PolarGrid;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for x in [0.1, std::f64::consts::PI, -1e-300, 123456.789, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }

    #[test]
    fn field_round_trip() {
        let g = PolarGrid::new(1.0, 2.0, 4, 5, 0.7).unwrap();
        let f = PolarField::from_fn(&g, |r, t| r * t.cos());
        let text = field_csv(&f).unwrap();
        assert!(text.starts_with("r,theta,value\n"));
        let back = parse_samples(&text).unwrap();
        assert_eq!(back.len(), g.len());
        for (k, (r, t, v)) in back.into_iter().enumerate() {
            assert_eq!((r, t, v), (g.r(k), g.theta(k), f.values[k]));
        }
    }

    #[test]
    fn bad_header_and_values_are_reported() {
        assert!(matches!(parse_samples("x,y,z\n1,2,3\n"), Err(IoError::Header { .. })));
        assert!(matches!(
            parse_samples("r,theta,value\n1,abc,3\n"),
            Err(IoError::Parse { line: 2, .. })
        ));
    }
}
