use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, Result};

pub type C64 = Complex64;

/// Scalar field a matrix is declared over.
///
/// Storage is always complex; a `Real` matrix has every imaginary part equal to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    /// The field of a product or sum of operands over `self` and `other`.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }
}

impl std::str::FromStr for Field {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(invalid(format!("unknown field '{other}'"))),
        }
    }
}

/// Dense matrix with at least one row and one column and only finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: DMatrix<C64>,
    field: Field,
}

impl Matrix {
    pub fn new(data: DMatrix<C64>, field: Field) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(invalid(format!(
                "matrix must be non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if let Some(z) = data.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid(format!("non-finite entry {z}")));
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(invalid("real matrix has a nonzero imaginary part"));
        }
        Ok(Self { data, field })
    }

    /// Wraps `data`, inferring the field from the imaginary parts.
    pub fn from_complex(data: DMatrix<C64>) -> Result<Self> {
        let field = if data.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Self::new(data, field)
    }

    pub fn from_real(data: &DMatrix<f64>) -> Result<Self> {
        Self::new(data.map(|x| C64::new(x, 0.0)), Field::Real)
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<C64>], field: Field) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(invalid("ragged rows"));
        }
        let data = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
        Self::new(data, field)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows, Field::Real)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
            field: Field::Real,
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            data: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(values[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            field: Field::Real,
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn column(&self, j: usize) -> nalgebra::DVector<C64> {
        self.data.column(j).into_owned()
    }

    /// Columns selected by 0-based `indices`, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows(), indices.len(), |i, k| self.data[(i, indices[k])])
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix {
            data: self.data.adjoint(),
            field: self.field,
        }
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols() != rhs.rows() {
            return Err(mismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Matrix {
            data: &self.data * &rhs.data,
            field: self.field.join(rhs.field),
        })
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.data.shape() != rhs.data.shape() {
            return Err(mismatch("shapes differ in addition"));
        }
        Ok(Matrix {
            data: &self.data + &rhs.data,
            field: self.field.join(rhs.field),
        })
    }

    pub fn scale(&self, c: C64) -> Matrix {
        let field = if c.im == 0.0 { self.field } else { Field::Complex };
        Matrix {
            data: self.data.map(|z| z * c),
            field,
        }
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.data.column_iter().map(|c| c.norm()).collect()
    }

    /// ‖Mᴴ‖_{2,∞}: the largest column ℓ₂ norm.
    pub fn max_column_norm(&self) -> f64 {
        self.column_norms().into_iter().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    field: Field,
    /// Column-major real parts.
    re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    im: Vec<f64>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            field: self.field,
            re: self.data.iter().map(|z| z.re).collect(),
            im: match self.field {
                Field::Real => Vec::new(),
                Field::Complex => self.data.iter().map(|z| z.im).collect(),
            },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MatrixRepr::deserialize(deserializer)?;
        let len = r.rows * r.cols;
        if r.re.len() != len || !(r.im.is_empty() || r.im.len() == len) {
            return Err(D::Error::custom("matrix entry count does not match its shape"));
        }
        let data = DMatrix::from_fn(r.rows, r.cols, |i, j| {
            let k = j * r.rows + i;
            C64::new(r.re[k], r.im.get(k).copied().unwrap_or(0.0))
        });
        Matrix::new(data, r.field).map_err(D::Error::custom)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(Matrix::new(DMatrix::zeros(0, 3), Field::Real).is_err());
        let mut d = DMatrix::<C64>::zeros(2, 2);
        d[(1, 0)] = C64::new(f64::NAN, 0.0);
        assert!(Matrix::new(d, Field::Complex).is_err());
    }

    #[test]
    fn real_field_rejects_imaginary_parts() {
        let d = DMatrix::from_element(1, 1, C64::new(0.0, 1.0));
        assert!(Matrix::new(d.clone(), Field::Real).is_err());
        assert_eq!(Matrix::from_complex(d).unwrap().field(), Field::Complex);
    }

    #[test]
    fn product_field_is_joined() {
        let a = Matrix::identity(2);
        let b = a.scale(C64::new(0.0, 1.0));
        assert_eq!(a.matmul(&b).unwrap().field(), Field::Complex);
        assert!(a.matmul(&Matrix::identity(3)).is_err());
    }
}
