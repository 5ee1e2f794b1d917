//! "CMX v1" dense matrix text format.
//!
//! ```text
//! cmx <rows> <cols> <real|complex>
//! <re>            (real: one value per line)
//! <re> <im>       (complex)
//! ```
//!
//! Entries follow in column-major order. Values are written in the shortest
//! decimal form that parses back to the identical `f64`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::matrix::{Field, Matrix, C64};
use crate::error::{Error, Result};

pub fn to_string(m: &Matrix) -> String {
    let mut out = String::with_capacity(24 * m.rows() * m.cols() + 32);
    let _ = writeln!(out, "cmx {} {} {}", m.rows(), m.cols(), m.field().as_str());
    for z in m.data().iter() {
        match m.field() {
            Field::Real => {
                let _ = writeln!(out, "{:?}", z.re);
            }
            Field::Complex => {
                let _ = writeln!(out, "{:?} {:?}", z.re, z.im);
            }
        }
    }
    out
}

pub fn from_str(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CMX input".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "cmx" {
        return Err(Error::Parse(format!("bad CMX header '{header}'")));
    }
    let rows: usize = parts[1]
        .parse()
        .map_err(|e| Error::Parse(format!("bad row count: {e}")))?;
    let cols: usize = parts[2]
        .parse()
        .map_err(|e| Error::Parse(format!("bad column count: {e}")))?;
    let field: Field = parts[3]
        .parse()
        .map_err(|_| Error::Parse(format!("bad field '{}'", parts[3])))?;

    let expected = rows * cols;
    let mut values = Vec::with_capacity(expected);
    for (k, line) in lines.enumerate() {
        let nums: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("entry {}: {e}", k + 1)))
        };
        let z = match (field, nums.as_slice()) {
            (Field::Real, [re]) => C64::new(parse(re)?, 0.0),
            (Field::Complex, [re, im]) => C64::new(parse(re)?, parse(im)?),
            _ => {
                return Err(Error::Parse(format!(
                    "entry {} has {} values for a {} matrix",
                    k + 1,
                    nums.len(),
                    field.as_str()
                )))
            }
        };
        values.push(z);
    }
    if values.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} entries, found {}",
            values.len()
        )));
    }
    Matrix::new(DMatrix::from_vec(rows, cols, values), field)
}

pub fn write(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    std::fs::write(path, to_string(m))?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<Matrix> {
    from_str(&std::fs::read_to_string(path)?)
}
