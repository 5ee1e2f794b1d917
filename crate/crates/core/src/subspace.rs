//! Signal subspace and dimension estimation from snapshots.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::decomp::hermitian_eig_desc_raw;
use crate::linalg::{Matrix, OrthonormalBasis, C64};

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceEstimate {
    pub r: usize,
    #[serde(skip)]
    pub basis: OrthonormalBasis,
    /// Spectrum of the bias-removed covariance, descending.
    pub eigenvalues_biased: Vec<f64>,
    pub tau: f64,
    /// Set when N < m, so the sample covariance is singular and no bias is removed.
    pub rank_deficient_flag: bool,
}

/// Largest `k ≤ m − 1` with `λ_k − λ_{k+1} ≥ τ λ₁`, 1-based. `None` if no gap passes.
pub fn threshold_rank(spectrum: &[f64], tau: f64) -> Option<usize> {
    let top = *spectrum.first()?;
    if !(top > 0.0) {
        return None;
    }
    let threshold = tau * top;
    (1..spectrum.len())
        .rev()
        .find(|&k| spectrum[k - 1] - spectrum[k] >= threshold)
}

/// Checks that gap `r` passes the threshold and every later gap fails.
pub fn satisfies_threshold_rule(spectrum: &[f64], tau: f64, r: usize) -> bool {
    if r == 0 || r >= spectrum.len() {
        return false;
    }
    let threshold = tau * spectrum[0];
    let gap = |k: usize| spectrum[k - 1] - spectrum[k];
    gap(r) >= threshold && (r + 1..spectrum.len()).all(|k| gap(k) < threshold)
}

/// Estimates the signal subspace from `Y` by sample-covariance bias removal and
/// eigenvalue-gap thresholding.
pub fn estimate_signal_subspace(y: &Matrix, tau: f64) -> Result<SubspaceEstimate> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(invalid(format!("tau = {tau} must lie in (0, 1)")));
    }
    if y.is_zero() {
        return Err(Error::Degenerate("snapshot matrix is zero".into()));
    }
    let (m, big_n) = (y.rows(), y.cols());
    let d = y.data();
    let gamma_y = (d * d.adjoint()).map(|z| z / C64::new(big_n as f64, 0.0));
    let (values, vectors) = hermitian_eig_desc_raw(&gamma_y);
    let floor = values[m - 1];
    let spectrum: Vec<f64> = values.iter().map(|v| v - floor).collect();

    let r = threshold_rank(&spectrum, tau).ok_or_else(|| Error::NoGap {
        tau,
        spectrum: spectrum.clone(),
    })?;
    if !satisfies_threshold_rule(&spectrum, tau, r) {
        return Err(Error::Degenerate(format!(
            "rank {r} violates the two-sided threshold rule"
        )));
    }
    let basis = OrthonormalBasis::from_orthonormal(vectors.columns(0, r).into_owned());
    Ok(SubspaceEstimate {
        r,
        basis,
        eigenvalues_biased: spectrum,
        tau,
        rank_deficient_flag: big_n < m,
    })
}
