//! Row-sparse signal generation, noise injection and problem instances.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::{cmx, numerical_rank, singular_values, Field, Matrix, SupportSet, C64};
use crate::rng;
use crate::sensing::{self, SensingSpec};

/// Relative singular value threshold used for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Largest row count accepted by [`is_row_nondegenerate`].
pub const MAX_NONDEGENERACY_ROWS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalModel {
    /// `X^{J0} = Ψ Λ Φ` with Φ an i.i.d. unit-variance Gaussian M × N block.
    MixedMultichannel { psi: Matrix, lambda: Vec<f64> },
    /// `X^{J0} = U₀ Σ₀ V₀ᴴ` with Haar factors and prescribed singular values.
    FixedRank { singular_values: Vec<f64> },
    /// Full row rank with `σ_k = κ^{−(k−1)/(s−1)}`.
    Conditioned { kappa: f64 },
}

impl SignalModel {
    /// Fixed-rank model with `rank` equal singular values.
    pub fn equal_singular_values(rank: usize, value: f64) -> Self {
        SignalModel::FixedRank {
            singular_values: vec![value; rank],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportChoice {
    Random,
    Fixed(SupportSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub n: usize,
    pub s: usize,
    pub snapshots: usize,
    pub support: SupportChoice,
    pub model: SignalModel,
    pub field: Field,
    pub seed: u64,
}

impl SignalSpec {
    pub fn validate(&self) -> Result<()> {
        let (n, s, big_n) = (self.n, self.s, self.snapshots);
        if s == 0 || s > n {
            return Err(invalid(format!("need 1 <= s <= n, got s = {s}, n = {n}")));
        }
        if big_n == 0 {
            return Err(invalid("need at least one snapshot"));
        }
        if let SupportChoice::Fixed(j) = &self.support {
            if j.universe() != n || j.len() != s {
                return Err(invalid(format!(
                    "fixed support {j} does not have {s} elements in [1, {n}]"
                )));
            }
        }
        match &self.model {
            SignalModel::MixedMultichannel { psi, lambda } => {
                if psi.rows() != s || psi.cols() != lambda.len() {
                    return Err(mismatch(format!(
                        "Ψ is {}x{} but needs {s} rows and {} columns",
                        psi.rows(),
                        psi.cols(),
                        lambda.len()
                    )));
                }
                if psi.cols() > s {
                    return Err(invalid("mixing matrix needs M <= s"));
                }
                if lambda.iter().any(|&l| !(l > 0.0)) {
                    return Err(invalid("Λ must be positive"));
                }
                if numerical_rank(psi.data(), RANK_TOL) < psi.cols() {
                    return Err(invalid("mixing matrix must have full column rank"));
                }
                if psi.field() == Field::Complex && self.field == Field::Real {
                    return Err(invalid("complex mixing matrix for a real signal"));
                }
            }
            SignalModel::FixedRank { singular_values } => {
                let rank = singular_values.len();
                if rank == 0 || rank > s.min(big_n) {
                    return Err(invalid(format!(
                        "rank {rank} outside [1, min(s, N) = {}]",
                        s.min(big_n)
                    )));
                }
                if singular_values.iter().any(|&x| !(x > 0.0)) {
                    return Err(invalid("singular values must be positive"));
                }
                if singular_values.windows(2).any(|w| w[0] < w[1]) {
                    return Err(invalid("singular values must be in descending order"));
                }
            }
            SignalModel::Conditioned { kappa } => {
                if !(*kappa >= 1.0) || !kappa.is_finite() {
                    return Err(invalid(format!("condition number {kappa} must be >= 1")));
                }
                if s > big_n {
                    return Err(invalid("full row rank needs N >= s"));
                }
            }
        }
        Ok(())
    }
}

/// Singular values `κ^{−(k−1)/(s−1)}`, k = 1..s.
pub fn geometric_singular_values(s: usize, kappa: f64) -> Vec<f64> {
    if s == 1 {
        return vec![1.0];
    }
    (0..s)
        .map(|k| kappa.powf(-(k as f64) / (s as f64 - 1.0)))
        .collect()
}

/// Draws the row-sparse `X0` (n × N) and its support.
pub fn generate_signal(spec: &SignalSpec) -> Result<(Matrix, SupportSet)> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let support = match &spec.support {
        SupportChoice::Random => {
            SupportSet::new(rng::random_subset(&mut rng, spec.n, spec.s), spec.n)?
        }
        SupportChoice::Fixed(j) => j.clone(),
    };
    let (s, big_n, field) = (spec.s, spec.snapshots, spec.field);

    let block: DMatrix<C64> = match &spec.model {
        SignalModel::MixedMultichannel { psi, lambda } => {
            let phi = rng::gaussian(&mut rng, lambda.len(), big_n, field);
            let mut scaled = phi;
            for (mut row, &l) in scaled.row_iter_mut().zip(lambda) {
                row.scale_mut(l);
            }
            psi.data() * scaled
        }
        SignalModel::FixedRank { singular_values } => {
            low_rank_block(&mut rng, s, big_n, singular_values, field)
        }
        SignalModel::Conditioned { kappa } => {
            let sv = geometric_singular_values(s, *kappa);
            low_rank_block(&mut rng, s, big_n, &sv, field)
        }
    };

    let mut x0 = DMatrix::<C64>::zeros(spec.n, big_n);
    for (k, &row) in support.indices().iter().enumerate() {
        x0.set_row(row, &block.row(k));
    }
    Ok((Matrix::new(x0, field)?, support))
}

fn low_rank_block(
    rng: &mut rng::SeededRng,
    s: usize,
    big_n: usize,
    singular_values: &[f64],
    field: Field,
) -> DMatrix<C64> {
    let r = singular_values.len();
    let u = rng::haar_orthonormal(rng, s, r, field);
    let v = rng::haar_orthonormal(rng, big_n, r, field);
    let mut us = u;
    for (mut col, &sv) in us.column_iter_mut().zip(singular_values) {
        col.scale_mut(sv);
    }
    us * v.adjoint()
}

/// Nonzero rows `X^{J}` of a row-sparse matrix.
pub fn support_rows(x: &Matrix, support: &SupportSet) -> DMatrix<C64> {
    DMatrix::from_fn(support.len(), x.cols(), |i, j| {
        x.get(support.indices()[i], j)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    SnrDb(f64),
    SigmaW(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            seed: 0,
        }
    }
}

/// Noisy snapshots `Y = A·X0 + W`, the noise `W`, and the σ_w actually used.
///
/// In SNR mode σ_w² = ‖A X0‖_F² / (m N 10^{SNR/10}), using the realized signal power.
pub fn add_noise(a: &Matrix, x0: &Matrix, noise: &NoiseSpec) -> Result<(Matrix, Matrix, f64)> {
    if a.field() != x0.field() {
        return Err(invalid(format!(
            "sensing matrix is {} but the signal is {}",
            a.field().as_str(),
            x0.field().as_str()
        )));
    }
    let clean = a.matmul(x0)?;
    let (m, big_n) = (clean.rows(), clean.cols());
    let sigma_w = match noise.kind {
        NoiseKind::None => 0.0,
        NoiseKind::SigmaW(s) => {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(invalid(format!("sigma_w = {s} must be >= 0")));
            }
            s
        }
        NoiseKind::SnrDb(db) => {
            if !db.is_finite() {
                return Err(invalid("SNR must be finite"));
            }
            let power = clean.frobenius_norm_sq();
            (power / ((m * big_n) as f64 * 10f64.powf(db / 10.0))).sqrt()
        }
    };
    let w = if sigma_w == 0.0 {
        DMatrix::zeros(m, big_n)
    } else {
        let mut r = rng::seeded(noise.seed);
        rng::gaussian(&mut r, m, big_n, clean.field()).map(|z| z * sigma_w)
    };
    let w = Matrix::new(w, clean.field())?;
    let y = clean.add(&w)?;
    Ok((y, w, sigma_w))
}

/// True iff every `rank(X)` rows of `X` are linearly independent.
pub fn is_row_nondegenerate(x: &Matrix) -> Result<bool> {
    let rows = x.rows();
    if rows > MAX_NONDEGENERACY_ROWS {
        return Err(Error::UnsupportedSize(format!(
            "row-nondegeneracy check is exhaustive; {rows} rows exceeds {MAX_NONDEGENERACY_ROWS}"
        )));
    }
    let data = x.data();
    let top = singular_values(data).first().copied().unwrap_or(0.0);
    let rank = numerical_rank(data, RANK_TOL);
    if rank == 0 {
        return Ok(true);
    }
    let threshold = RANK_TOL * top;
    let mut all_independent = true;
    for_each_subset(rows, rank, |subset| {
        let sub = DMatrix::from_fn(rank, data.ncols(), |i, j| data[(subset[i], j)]);
        let smallest = singular_values(&sub).last().copied().unwrap_or(0.0);
        if smallest <= threshold {
            all_independent = false;
        }
        all_independent
    });
    Ok(all_independent)
}

/// Calls `visit` on every k-subset of `0..n` in lexicographic order until it returns false.
pub(crate) fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub field: Field,
    pub sensing: Option<SensingSpec>,
    pub signal: SignalSpec,
    pub noise: NoiseSpec,
    pub sigma_w: f64,
    pub support: SupportSet,
}

/// A reproducible recovery problem `Y = A X0 + W` with known support.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub a: Matrix,
    pub x0: Matrix,
    pub support: SupportSet,
    pub w: Matrix,
    pub y: Matrix,
    pub meta: InstanceMeta,
}

impl ProblemInstance {
    pub fn generate(sensing: &SensingSpec, signal: &SignalSpec, noise: &NoiseSpec) -> Result<Self> {
        if sensing.n != signal.n {
            return Err(mismatch(format!(
                "sensing matrix has {} columns but the signal has {} rows",
                sensing.n, signal.n
            )));
        }
        let a = sensing::generate(sensing)?;
        Self::with_matrix(a, Some(sensing.clone()), signal, noise)
    }

    /// Builds an instance on an externally supplied sensing matrix.
    pub fn with_matrix(
        a: Matrix,
        sensing: Option<SensingSpec>,
        signal: &SignalSpec,
        noise: &NoiseSpec,
    ) -> Result<Self> {
        if a.cols() != signal.n {
            return Err(mismatch(format!(
                "sensing matrix has {} columns but the signal has {} rows",
                a.cols(),
                signal.n
            )));
        }
        let (x0, support) = generate_signal(signal)?;
        let (y, w, sigma_w) = add_noise(&a, &x0, noise)?;
        let meta = InstanceMeta {
            field: a.field(),
            sensing,
            signal: signal.clone(),
            noise: noise.clone(),
            sigma_w,
            support: support.clone(),
        };
        Ok(Self {
            a,
            x0,
            support,
            w,
            y,
            meta,
        })
    }

    /// Writes `A.cmx`, `X0.cmx`, `W.cmx`, `Y.cmx` and `instance.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        cmx::write(dir.join("A.cmx"), &self.a)?;
        cmx::write(dir.join("X0.cmx"), &self.x0)?;
        cmx::write(dir.join("W.cmx"), &self.w)?;
        cmx::write(dir.join("Y.cmx"), &self.y)?;
        std::fs::write(
            dir.join("instance.json"),
            serde_json::to_string_pretty(&self.meta)?,
        )?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let meta: InstanceMeta =
            serde_json::from_str(&std::fs::read_to_string(dir.join("instance.json"))?)?;
        Ok(Self {
            a: cmx::read(dir.join("A.cmx"))?,
            x0: cmx::read(dir.join("X0.cmx"))?,
            w: cmx::read(dir.join("W.cmx"))?,
            y: cmx::read(dir.join("Y.cmx"))?,
            support: meta.support.clone(),
            meta,
        })
    }
}
