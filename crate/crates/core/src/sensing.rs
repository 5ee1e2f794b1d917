//! Sensing matrix ensembles and frame diagnostics.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{spectral_norm, Field, Matrix, C64};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// Real i.i.d. N(0, 1/n) entries.
    Gaussian,
    /// Each DFT row kept independently with probability m/n.
    FourierBernoulliRows,
    /// Exactly m distinct DFT rows drawn uniformly without replacement.
    FourierUniformRows,
    /// m consecutive DFT rows (cyclically) from a random offset.
    FourierBunchedRows,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Gaussian => "gaussian",
            Ensemble::FourierBernoulliRows => "fourier_bernoulli_rows",
            Ensemble::FourierUniformRows => "fourier_uniform_rows",
            Ensemble::FourierBunchedRows => "fourier_bunched_rows",
        }
    }

    pub fn field(self) -> Field {
        match self {
            Ensemble::Gaussian => Field::Real,
            _ => Field::Complex,
        }
    }
}

impl FromStr for Ensemble {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "gaussian" => Ok(Ensemble::Gaussian),
            "fourier_bernoulli_rows" | "fourier_bernoulli" => Ok(Ensemble::FourierBernoulliRows),
            "fourier_uniform_rows" | "fourier_uniform" | "fourier" => {
                Ok(Ensemble::FourierUniformRows)
            }
            "fourier_bunched_rows" | "fourier_bunched" => Ok(Ensemble::FourierBunchedRows),
            other => Err(invalid(format!("unknown ensemble '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingSpec {
    pub ensemble: Ensemble,
    pub m: usize,
    pub n: usize,
    pub normalize_columns: bool,
    pub seed: u64,
}

impl SensingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.n {
            return Err(invalid(format!(
                "need 1 <= m <= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

/// Entry `(j, k)` (0-based) of the unitary n-point DFT matrix.
pub fn dft_entry(j: usize, k: usize, n: usize) -> C64 {
    // Reduce the exponent modulo n before scaling so large indices stay accurate.
    let e = ((j as u128 * k as u128) % n as u128) as f64;
    C64::from_polar(1.0 / (n as f64).sqrt(), -2.0 * PI * e / n as f64)
}

/// Rows of the n-point DFT matrix, in the given order.
pub fn dft_rows(rows: &[usize], n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), n, |i, k| dft_entry(rows[i], k, n))
}

/// Row indices (0-based) a Fourier ensemble selects with the given generator.
pub fn select_rows<R: Rng>(ensemble: Ensemble, m: usize, n: usize, rng: &mut R) -> Vec<usize> {
    match ensemble {
        Ensemble::Gaussian => Vec::new(),
        Ensemble::FourierUniformRows => rng::random_subset(rng, n, m),
        Ensemble::FourierBunchedRows => {
            let offset = rng.random_range(0..n);
            (0..m).map(|i| (offset + i) % n).collect()
        }
        Ensemble::FourierBernoulliRows => {
            let p = m as f64 / n as f64;
            // An empty draw has no matrix; redraw from the same stream.
            loop {
                let rows: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
                if !rows.is_empty() {
                    break rows;
                }
            }
        }
    }
}

pub fn generate(spec: &SensingSpec) -> Result<Matrix> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let raw = match spec.ensemble {
        Ensemble::Gaussian => {
            let a = rng::real_gaussian(&mut rng, spec.m, spec.n, 1.0 / (spec.n as f64).sqrt());
            Matrix::new(a, Field::Real)?
        }
        e => {
            let rows = select_rows(e, spec.m, spec.n, &mut rng);
            Matrix::new(dft_rows(&rows, spec.n), Field::Complex)?
        }
    };
    if spec.normalize_columns {
        normalize_columns(&raw)
    } else {
        Ok(raw)
    }
}

/// Scales every column to unit ℓ₂ norm.
pub fn normalize_columns(a: &Matrix) -> Result<Matrix> {
    let norms = a.column_norms();
    if let Some(k) = norms.iter().position(|&x| x == 0.0) {
        return Err(invalid(format!("column {} is zero", k + 1)));
    }
    let mut d = a.data().clone();
    for (mut col, norm) in d.column_iter_mut().zip(norms) {
        col.unscale_mut(norm);
    }
    Matrix::new(d, a.field())
}

/// Mutual coherence `max_{k≠ℓ} |⟨a_k, a_ℓ⟩| / (‖a_k‖‖a_ℓ‖)`.
pub fn coherence(a: &Matrix) -> Result<f64> {
    let normalized = normalize_columns(a)?;
    let gram = normalized.data().adjoint() * normalized.data();
    let mut mu: f64 = 0.0;
    for k in 0..gram.ncols() {
        for l in 0..k {
            mu = mu.max(gram[(l, k)].norm());
        }
    }
    Ok(mu.min(1.0))
}

/// Welch lower bound `√((n − m) / (m(n − 1)))` on the coherence of m × n frames.
pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("Welch bound needs n >= 2, got {n}")));
    }
    if m == 0 || m > n {
        return Err(invalid(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    Ok((((n - m) as f64) / (m as f64 * (n - 1) as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub unit_columns: bool,
    pub orthogonal_rows: bool,
    pub tight_norm: bool,
    pub max_column_norm_error: f64,
    pub max_row_correlation: f64,
    pub spectral_norm: f64,
    pub expected_spectral_norm: f64,
}

impl FrameReport {
    pub fn is_tight_frame(&self) -> bool {
        self.unit_columns && self.orthogonal_rows && self.tight_norm
    }
}

/// Checks the three unit-norm tight frame properties, each within `tol`.
///
/// Row orthogonality is measured by normalized row inner products and the
/// spectral norm relative to `√(n/m)`.
pub fn is_unit_norm_tight_frame(a: &Matrix, tol: f64) -> (bool, FrameReport) {
    let (m, n) = (a.rows(), a.cols());
    let max_column_norm_error = a
        .column_norms()
        .iter()
        .map(|c| (c - 1.0).abs())
        .fold(0.0, f64::max);
    let rr = a.data() * a.data().adjoint();
    let mut max_row_correlation: f64 = 0.0;
    for i in 0..m {
        for j in 0..i {
            let denom = (rr[(i, i)].re * rr[(j, j)].re).sqrt();
            let c = if denom > 0.0 { rr[(i, j)].norm() / denom } else { 1.0 };
            max_row_correlation = max_row_correlation.max(c);
        }
    }
    let norm = spectral_norm(a.data());
    let expected = (n as f64 / m as f64).sqrt();
    let report = FrameReport {
        unit_columns: max_column_norm_error <= tol,
        orthogonal_rows: max_row_correlation <= tol,
        tight_norm: (norm - expected).abs() <= tol * expected,
        max_column_norm_error,
        max_row_correlation,
        spectral_norm: norm,
        expected_spectral_norm: expected,
    };
    (report.is_tight_frame(), report)
}
