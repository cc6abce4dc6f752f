//! Point-set and transform file I/O.
//!
//! Point-set files are plain text: one point per line, two reals separated
//! by whitespace. Lines starting with `#` and blank lines are ignored; line
//! order defines point order. Values are written with 17 significant digits,
//! which round-trips every double exactly.
//!
//! Transform files hold the six parameters on a single line in the same
//! format, preceded by `#` header lines carrying provenance.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{AffineParams, Point2, PointSet};

/// Format a double with 17 significant digits.
pub(crate) fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(contents.as_bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_line(path: &Path, line_no: usize, line: &str, expected: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            reason: format!("expected {expected} values, found {}", fields.len()),
        });
    }
    let mut values = Vec::with_capacity(expected);
    for field in fields {
        let value: f64 = field.parse().map_err(|_| Error::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            reason: format!("not a number: {field:?}"),
        })?;
        if !value.is_finite() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("non-finite value: {field:?}"),
            });
        }
        values.push(value);
    }
    Ok(values)
}

/// Load a point-set, preserving line order as point order.
pub fn load_pointset<P: AsRef<Path>>(path: P) -> Result<PointSet> {
    let path = path.as_ref();
    let contents = read_to_string(path)?;
    let mut points = Vec::new();
    for (idx, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = parse_line(path, idx + 1, line, 2)?;
        points.push(Point2::new(values[0], values[1]));
    }
    if points.is_empty() {
        return Err(Error::NoPoints {
            path: path.to_path_buf(),
        });
    }
    PointSet::new(points)
}

/// Write a point-set, one `x y` pair per line.
pub fn save_pointset<P: AsRef<Path>>(ps: &PointSet, path: P) -> Result<()> {
    save_pointset_with_header(ps, path, &[])
}

/// As [`save_pointset`], with `#`-prefixed header lines first.
pub fn save_pointset_with_header<P: AsRef<Path>>(
    ps: &PointSet,
    path: P,
    header: &[String],
) -> Result<()> {
    let mut out = String::new();
    for line in header {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for p in ps.iter() {
        out.push_str(&fmt_f64(p.x));
        out.push(' ');
        out.push_str(&fmt_f64(p.y));
        out.push('\n');
    }
    write_file(path.as_ref(), &out)
}

/// Write the six transform parameters on one line, after `#` header lines.
pub fn save_transform<P: AsRef<Path>>(
    params: &AffineParams,
    path: P,
    header: &[String],
) -> Result<()> {
    let mut out = String::new();
    for line in header {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    let fields: Vec<String> = params.theta.iter().map(|&t| fmt_f64(t)).collect();
    out.push_str(&fields.join(" "));
    out.push('\n');
    write_file(path.as_ref(), &out)
}

/// Read a transform file written by [`save_transform`].
pub fn load_transform<P: AsRef<Path>>(path: P) -> Result<AffineParams> {
    let path = path.as_ref();
    let contents = read_to_string(path)?;
    for (idx, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = parse_line(path, idx + 1, line, 6)?;
        let mut theta = [0.0; 6];
        theta.copy_from_slice(&values);
        return Ok(AffineParams::new(theta));
    }
    Err(Error::Malformed {
        path: path.to_path_buf(),
        line: contents.lines().count(),
        reason: "no parameter line found".into(),
    })
}
