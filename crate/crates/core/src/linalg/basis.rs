use nalgebra::{DMatrix, DVector};

use super::decomp::spectral_norm;
use super::matrix::{Matrix, C64};
use crate::error::{invalid, mismatch, Result};

/// Orthonormality tolerance enforced by [`OrthonormalBasis::new`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Relative residual below which a candidate direction is considered already spanned.
pub const RANK_DROP_TOL: f64 = 1e-10;

/// A subspace of Kᵐ held as a matrix with orthonormal columns.
///
/// The projector `QQᴴ` is derived on demand and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    q: DMatrix<C64>,
}

impl OrthonormalBasis {
    /// Validates that `q` has orthonormal columns.
    pub fn new(q: DMatrix<C64>) -> Result<Self> {
        if q.ncols() > q.nrows() {
            return Err(invalid(format!(
                "{} columns cannot be orthonormal in dimension {}",
                q.ncols(),
                q.nrows()
            )));
        }
        let gram = q.adjoint() * &q;
        let eye = DMatrix::<C64>::identity(q.ncols(), q.ncols());
        let err = super::matrix::max_abs_diff(&gram, &eye);
        if err > ORTHONORMAL_TOL {
            return Err(invalid(format!(
                "columns are not orthonormal (max |QᴴQ - I| = {err:e})"
            )));
        }
        Ok(Self { q })
    }

    pub(crate) fn from_orthonormal(q: DMatrix<C64>) -> Self {
        Self { q }
    }

    /// The zero subspace of Kᵐ.
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            q: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn whole_space(ambient_dim: usize) -> Self {
        Self {
            q: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Orthonormal basis of the column span of `m`, dropping dependent columns.
    pub fn span_of(m: &DMatrix<C64>) -> Self {
        let mut builder = GramSchmidt::new(m.nrows());
        for c in m.column_iter() {
            builder.push(&c.into_owned());
        }
        builder.into_basis()
    }

    pub fn ambient_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn columns(&self) -> &DMatrix<C64> {
        &self.q
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        Matrix::from_complex(self.q.clone())
    }

    pub fn projector(&self) -> DMatrix<C64> {
        &self.q * self.q.adjoint()
    }

    /// Coordinates `Qᴴv` of `v` in this basis.
    pub fn coefficients(&self, v: &DVector<C64>) -> DVector<C64> {
        self.q.adjoint() * v
    }

    pub fn project(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        self.check_len(v.len())?;
        Ok(&self.q * (self.q.adjoint() * v))
    }

    pub fn residual_project(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        Ok(v - self.project(v)?)
    }

    /// `P·M` for every column of `m`.
    pub fn project_matrix(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        &self.q * (self.q.adjoint() * m)
    }

    /// `P⊥·M` for every column of `m`.
    pub fn residual_matrix(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        m - self.project_matrix(m)
    }

    /// `‖P v‖₂` without forming the projection.
    pub fn projected_norm(&self, v: &DVector<C64>) -> f64 {
        (self.q.adjoint() * v).norm()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.ambient_dim() {
            return Err(mismatch(format!(
                "vector of length {len} against ambient dimension {}",
                self.ambient_dim()
            )));
        }
        Ok(())
    }
}

/// Incremental Gram–Schmidt orthonormalization with one reorthogonalization pass.
///
/// A candidate is dropped when its residual norm is at most
/// [`RANK_DROP_TOL`] times its own norm.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    ambient: usize,
    cols: Vec<DVector<C64>>,
}

impl GramSchmidt {
    pub fn new(ambient: usize) -> Self {
        Self {
            ambient,
            cols: Vec::new(),
        }
    }

    pub fn from_basis(basis: &OrthonormalBasis) -> Self {
        Self {
            ambient: basis.ambient_dim(),
            cols: basis
                .columns()
                .column_iter()
                .map(|c| c.into_owned())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Residual of `v` after removing its component in the current span.
    pub fn residual(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.cols {
                let c = q.dotc(&r);
                r.axpy(-c, q, C64::new(1.0, 0.0));
            }
        }
        r
    }

    /// Appends the normalized residual of `v`. Returns `false` if `v` was dropped.
    pub fn push(&mut self, v: &DVector<C64>) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length must match ambient dimension");
        if self.cols.len() == self.ambient {
            return false;
        }
        let norm = v.norm();
        if norm == 0.0 {
            return false;
        }
        let r = self.residual(v);
        let rn = r.norm();
        if rn <= RANK_DROP_TOL * norm {
            return false;
        }
        self.cols.push(r.unscale(rn));
        true
    }

    pub fn into_basis(self) -> OrthonormalBasis {
        let mut q = DMatrix::<C64>::zeros(self.ambient, self.cols.len());
        for (k, c) in self.cols.iter().enumerate() {
            q.set_column(k, c);
        }
        OrthonormalBasis::from_orthonormal(q)
    }

    pub fn to_basis(&self) -> OrthonormalBasis {
        self.clone().into_basis()
    }
}

fn check_ambient(s1: &OrthonormalBasis, s2: &OrthonormalBasis) -> Result<()> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(mismatch(format!(
            "ambient dimensions {} and {} differ",
            s1.ambient_dim(),
            s2.ambient_dim()
        )));
    }
    Ok(())
}

/// `‖P_{S1}⊥ P_{S2}‖`, the spectral norm of the part of S2 outside S1.
pub fn cross_residual_norm(s1: &OrthonormalBasis, s2: &OrthonormalBasis) -> Result<f64> {
    check_ambient(s1, s2)?;
    if s2.dim() == 0 {
        return Ok(0.0);
    }
    let resid = s1.residual_matrix(s2.columns());
    Ok(spectral_norm(&resid).min(1.0))
}

/// Angle function `asin(min(‖P_{S1}⊥P_{S2}‖, ‖P_{S2}⊥P_{S1}‖))` in radians.
pub fn angle_between(s1: &OrthonormalBasis, s2: &OrthonormalBasis) -> Result<f64> {
    check_ambient(s1, s2)?;
    if s1.dim() == 0 || s2.dim() == 0 {
        return Err(invalid("angle between subspaces needs nonempty subspaces"));
    }
    let a = cross_residual_norm(s1, s2)?;
    let b = cross_residual_norm(s2, s1)?;
    Ok(a.min(b).asin())
}

/// `‖P_{S1} − P_{S2}‖`, computed as the larger of the two cross residual norms.
///
/// Subspaces of different dimensions are at distance exactly 1.
pub fn subspace_distance(s1: &OrthonormalBasis, s2: &OrthonormalBasis) -> Result<f64> {
    check_ambient(s1, s2)?;
    if s1.dim() != s2.dim() {
        return Ok(1.0);
    }
    let a = cross_residual_norm(s1, s2)?;
    let b = cross_residual_norm(s2, s1)?;
    Ok(a.max(b))
}

/// Orthonormal basis of `Ŝ + R(A_{J1})`.
///
/// Equivalent to the projector update `P_Ŝ + (P_Ŝ⊥A_{J1})(P_Ŝ⊥A_{J1})†`; columns of
/// `a_j1` already (numerically) inside the running span contribute nothing.
pub fn augment_subspace(s_hat: &OrthonormalBasis, a_j1: &DMatrix<C64>) -> Result<OrthonormalBasis> {
    if a_j1.nrows() != s_hat.ambient_dim() {
        return Err(mismatch(format!(
            "augmenting columns have length {} but ambient dimension is {}",
            a_j1.nrows(),
            s_hat.ambient_dim()
        )));
    }
    let mut gs = GramSchmidt::from_basis(s_hat);
    for c in a_j1.column_iter() {
        gs.push(&c.into_owned());
    }
    Ok(gs.into_basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, haar_orthonormal, seeded};
    use crate::Field;
    use std::f64::consts::PI;

    fn e(m: usize, k: usize) -> DVector<C64> {
        let mut v = DVector::zeros(m);
        v[k] = C64::new(1.0, 0.0);
        v
    }

    fn span(vectors: &[DVector<C64>]) -> OrthonormalBasis {
        let m = DMatrix::from_columns(vectors);
        OrthonormalBasis::span_of(&m)
    }

    fn real_vec(xs: &[f64]) -> DVector<C64> {
        DVector::from_iterator(xs.len(), xs.iter().map(|&x| C64::new(x, 0.0)))
    }

    #[test]
    fn projection_examples() {
        let s = span(&[e(2, 0)]);
        let v = real_vec(&[3.0, 4.0]);
        assert_eq!(s.project(&v).unwrap(), real_vec(&[3.0, 0.0]));
        assert_eq!(s.residual_project(&v).unwrap(), real_vec(&[0.0, 4.0]));
        assert!(s.residual_project(&real_vec(&[2.0, 0.0])).unwrap().norm() == 0.0);
        assert!(s.project(&real_vec(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn pythagoras_on_random_subspace() {
        let mut rng = seeded(1);
        for _ in 0..20 {
            let s = OrthonormalBasis::new(haar_orthonormal(&mut rng, 6, 3, Field::Complex)).unwrap();
            let v = complex_gaussian(&mut rng, 6, 1).column(0).into_owned();
            let p = s.project(&v).unwrap();
            let r = s.residual_project(&v).unwrap();
            assert!((&p + &r - &v).norm() < 1e-12);
            assert!(p.dotc(&r).norm() < 1e-10 * v.norm());
            let lhs = v.norm_squared();
            assert!((lhs - p.norm_squared() - r.norm_squared()).abs() < 1e-10 * lhs);
        }
    }

    #[test]
    fn rejects_non_orthonormal() {
        let m = DMatrix::from_element(2, 1, C64::new(1.0, 0.0));
        assert!(OrthonormalBasis::new(m).is_err());
    }

    #[test]
    fn angle_examples() {
        let s1 = span(&[e(3, 0)]);
        let s2 = span(&[e(3, 1)]);
        let both = span(&[e(3, 0), e(3, 1)]);
        assert!(angle_between(&s1, &s1).unwrap().abs() < 1e-12);
        assert!((angle_between(&s1, &s2).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(angle_between(&both, &s1).unwrap().abs() < 1e-12);
        assert!(angle_between(&s1, &both).unwrap().abs() < 1e-12);
        assert!(angle_between(&s1, &span(&[e(2, 0)])).is_err());
    }

    #[test]
    fn distance_examples() {
        let mut rng = seeded(2);
        let q = haar_orthonormal(&mut rng, 5, 2, Field::Complex);
        let rot = haar_orthonormal(&mut rng, 2, 2, Field::Complex);
        let a = OrthonormalBasis::new(q.clone()).unwrap();
        let b = OrthonormalBasis::new(q * rot).unwrap();
        assert!(subspace_distance(&a, &b).unwrap() < 1e-12);

        let l1 = span(&[e(2, 0)]);
        let l2 = span(&[e(2, 1)]);
        assert!((subspace_distance(&l1, &l2).unwrap() - 1.0).abs() < 1e-12);

        // Oracle: direct subtraction of the 2x2 projectors for θ = π/6.
        let theta = PI / 6.0;
        let l3 = span(&[real_vec(&[theta.cos(), theta.sin()])]);
        let diff = l1.projector() - l3.projector();
        let direct = spectral_norm(&diff);
        let d = subspace_distance(&l1, &l3).unwrap();
        assert!((d - direct).abs() < 1e-12);
        assert!((d - 0.5).abs() < 1e-12);

        let plane = span(&[e(2, 0), e(2, 1)]);
        assert_eq!(subspace_distance(&l1, &plane).unwrap(), 1.0);
    }

    #[test]
    fn augmentation_examples() {
        let s = span(&[e(3, 0)]);
        let out = augment_subspace(&s, &DMatrix::from_columns(&[e(3, 1)])).unwrap();
        let expected = span(&[e(3, 0), e(3, 1)]);
        assert!(subspace_distance(&out, &expected).unwrap() < 1e-12);

        let same = augment_subspace(&s, &DMatrix::from_columns(&[real_vec(&[2.0, 0.0, 0.0])])).unwrap();
        assert_eq!(same.dim(), 1);

        // Gram–Schmidt by hand: (1,1,0)/√2 minus its e₁ part is e₂/√2.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let out = augment_subspace(&s, &DMatrix::from_columns(&[real_vec(&[h, h, 0.0])])).unwrap();
        assert_eq!(out.dim(), 2);
        assert!((out.columns()[(1, 1)].norm() - 1.0).abs() < 1e-12);
        assert!(subspace_distance(&out, &expected).unwrap() < 1e-12);

        assert!(augment_subspace(&s, &DMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn augmentation_matches_projector_update_formula() {
        let mut rng = seeded(3);
        let s = OrthonormalBasis::new(haar_orthonormal(&mut rng, 8, 3, Field::Complex)).unwrap();
        let a = complex_gaussian(&mut rng, 8, 2);
        let out = augment_subspace(&s, &a).unwrap();
        let resid = Matrix::from_complex(s.residual_matrix(&a)).unwrap();
        let pinv = super::super::decomp::pseudo_inverse(&resid);
        let p = s.projector() + resid.data() * pinv.data();
        assert!(super::super::matrix::max_abs_diff(&out.projector(), &p) < 1e-10);
    }
}
