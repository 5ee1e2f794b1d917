//! Dense Hermitian eigendecomposition, SVD and derived operations.
//!
//! Everything here is a thin layer over nalgebra's decompositions that fixes
//! the ordering conventions (descending) the rest of the crate relies on.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use super::basis::OrthonormalBasis;
use super::matrix::{Matrix, C64};
use crate::error::{invalid, Error, Result};

/// Relative tolerance of the Hermitian check in [`hermitian_eig_desc`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues (descending) and matching orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eig_desc(g: &Matrix) -> Result<(Vec<f64>, OrthonormalBasis)> {
    let d = g.data();
    if d.nrows() != d.ncols() {
        return Err(invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let asym = d
        .iter()
        .zip(d.adjoint().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if asym > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(invalid(format!(
            "matrix is not Hermitian (max |G - Gᴴ| = {asym:e})"
        )));
    }
    let (values, vectors) = hermitian_eig_desc_raw(d);
    Ok((values, OrthonormalBasis::from_orthonormal(vectors)))
}

/// Same as [`hermitian_eig_desc`] without validation; the input is symmetrized first.
pub(crate) fn hermitian_eig_desc_raw(g: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = g.nrows();
    let sym = (g + g.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    (values, vectors)
}

/// Thin SVD `M = U diag(σ) Vᴴ` with σ descending.
pub struct ThinSvd {
    pub u: DMatrix<C64>,
    pub sigma: Vec<f64>,
    pub v_t: DMatrix<C64>,
}

pub fn thin_svd(m: &DMatrix<C64>) -> ThinSvd {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return ThinSvd {
            u: DMatrix::zeros(m.nrows(), 0),
            sigma: Vec::new(),
            v_t: DMatrix::zeros(0, m.ncols()),
        };
    }
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    ThinSvd {
        u: DMatrix::from_fn(m.nrows(), k, |i, j| u[(i, order[j])]),
        sigma: order.iter().map(|&j| svd.singular_values[j]).collect(),
        v_t: DMatrix::from_fn(k, m.ncols(), |i, j| v_t[(order[i], j)]),
    }
}

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Spectral norm; zero for an empty matrix.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rel_tol · σ₁`.
pub fn numerical_rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

/// The `r` dominant left singular vectors of `m`.
pub fn dominant_subspace(m: &Matrix, r: usize) -> Result<OrthonormalBasis> {
    let k = m.rows().min(m.cols());
    if r == 0 || r > k {
        return Err(invalid(format!("rank {r} outside [1, {k}]")));
    }
    if m.is_zero() {
        return Err(Error::Degenerate(
            "dominant subspace of the zero matrix".into(),
        ));
    }
    let svd = thin_svd(m.data());
    Ok(OrthonormalBasis::from_orthonormal(
        svd.u.columns(0, r).into_owned(),
    ))
}

/// Moore–Penrose pseudo-inverse.
///
/// Singular values below `max(rows, cols) · ε · σ₁` are treated as zero.
pub fn pseudo_inverse(m: &Matrix) -> Matrix {
    let svd = thin_svd(m.data());
    let top = svd.sigma.first().copied().unwrap_or(0.0);
    let cutoff = (m.rows().max(m.cols()) as f64) * f64::EPSILON * top;
    let mut pinv = DMatrix::<C64>::zeros(m.cols(), m.rows());
    for (k, &s) in svd.sigma.iter().enumerate() {
        if s > cutoff {
            let v = svd.v_t.row(k).adjoint();
            let u = svd.u.column(k);
            pinv += (v * u.adjoint()).map(|z| z / s);
        }
    }
    Matrix::new(pinv, m.field()).expect("pseudo-inverse of a finite matrix is finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, haar_orthonormal};
    use crate::Field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_eigenpairs_sorted() {
        let (vals, vecs) = hermitian_eig_desc(&Matrix::diag(&[1.0, 4.0, 2.0])).unwrap();
        assert_eq!(vals, vec![4.0, 2.0, 1.0]);
        let q = vecs.columns();
        // Eigenvectors are e₂, e₃, e₁ up to phase.
        for (k, row) in [1usize, 2, 0].iter().enumerate() {
            assert!((q[(*row, k)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_and_rank_one_spectra() {
        let (vals, _) = hermitian_eig_desc(&Matrix::identity(3)).unwrap();
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-14));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = complex_gaussian(&mut rng, 5, 1);
        let v = &v / C64::new(v.norm(), 0.0);
        let g = Matrix::from_complex(&v * v.adjoint()).unwrap();
        let (vals, _) = hermitian_eig_desc(&g).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!(vals[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = complex_gaussian(&mut rng, 6, 6);
        let g = &b * b.adjoint();
        let gm = Matrix::from_complex(g.clone()).unwrap();
        let (vals, vecs) = hermitian_eig_desc(&gm).unwrap();
        let norm = spectral_norm(&g);
        for (k, lam) in vals.iter().enumerate() {
            let v = vecs.columns().column(k);
            let resid = (&g * v - v * C64::new(*lam, 0.0)).norm();
            assert!(resid < 1e-8 * norm);
        }
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            hermitian_eig_desc(&m),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn dominant_subspace_cases() {
        let s = dominant_subspace(&Matrix::diag(&[3.0, 1.0]), 1).unwrap();
        assert!((s.columns()[(0, 0)].norm() - 1.0).abs() < 1e-12);

        assert!(dominant_subspace(&Matrix::diag(&[3.0, 1.0]), 3).is_err());
        assert!(dominant_subspace(&Matrix::diag(&[3.0, 1.0]), 0).is_err());
        let zero = Matrix::new(DMatrix::zeros(3, 2), Field::Real).unwrap();
        assert!(matches!(
            dominant_subspace(&zero, 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn dominant_subspace_of_orthogonal_columns_matches_full_svd() {
        // Columns (5 u₁, 2 u₂) with u₁ ⟂ u₂ in K⁴.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_orthonormal(&mut rng, 4, 2, Field::Complex);
        let mut m = u.clone();
        m.column_mut(0).scale_mut(5.0);
        m.column_mut(1).scale_mut(2.0);
        let basis = dominant_subspace(&Matrix::from_complex(m.clone()).unwrap(), 2).unwrap();
        let expected = &u * u.adjoint();
        assert!(crate::linalg::matrix::max_abs_diff(&basis.projector(), &expected) < 1e-12);

        // Oracle: singular values from the eigenvalues of MᴴM.
        let (ev, _) = hermitian_eig_desc_raw(&(m.adjoint() * &m));
        let sv = singular_values(&m);
        for (s, e) in sv.iter().zip(ev) {
            assert!((s - e.sqrt()).abs() < 1e-9 * sv[0]);
        }
        assert!((sv[0] - 5.0).abs() < 1e-12 && (sv[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pseudo_inverse_cases() {
        let p = pseudo_inverse(&Matrix::diag(&[2.0, 0.0]));
        assert!(p.max_abs_diff(&Matrix::diag(&[0.5, 0.0])) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = Matrix::from_complex(haar_orthonormal(&mut rng, 5, 3, Field::Complex)).unwrap();
        assert!(pseudo_inverse(&q).max_abs_diff(&q.adjoint()) < 1e-12);

        let m = Matrix::from_complex(complex_gaussian(&mut rng, 5, 3)).unwrap();
        let mp = pseudo_inverse(&m);
        let eye = mp.matmul(&m).unwrap();
        assert!(eye.max_abs_diff(&Matrix::identity(3)) < 1e-8);
    }

    #[test]
    fn penrose_identities_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = complex_gaussian(&mut rng, 6, 2);
        let c = complex_gaussian(&mut rng, 2, 4);
        let m = Matrix::from_complex(&b * &c).unwrap();
        let p = pseudo_inverse(&m);
        let (md, pd) = (m.data(), p.data());
        let scale = spectral_norm(md).max(1.0) * spectral_norm(pd).max(1.0);
        let tol = 1e-8 * scale;
        use crate::linalg::matrix::max_abs_diff;
        assert!(max_abs_diff(&(md * pd * md), md) < tol * spectral_norm(md));
        assert!(max_abs_diff(&(pd * md * pd), pd) < tol * spectral_norm(pd));
        let mp = md * pd;
        assert!(max_abs_diff(&mp, &mp.adjoint()) < tol);
        let pm = pd * md;
        assert!(max_abs_diff(&pm, &pm.adjoint()) < tol);
    }
}
