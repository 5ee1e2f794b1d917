//! Support recovery: MUSIC, subspace-augmented MUSIC, greedy partial support
//! recovery and the p-SOMP baselines.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, mismatch, Error, Result};
use crate::linalg::decomp::thin_svd;
use crate::linalg::{
    augment_subspace, cross_residual_norm, GramSchmidt, Matrix, OrthonormalBasis, SupportSet, C64,
};
use crate::signal::for_each_subset;
use crate::subspace::{estimate_signal_subspace, SubspaceEstimate};

/// Candidates with `‖P⊥a‖ ≤ SPAN_TOL·‖a‖` are treated as already spanned.
pub const SPAN_TOL: f64 = 1e-10;

/// Singular values of `P⊥Q` at or below this are dropped when re-orthonormalizing.
pub const SUBSPACE_RANK_TOL: f64 = 1e-10;

/// Slack added to η in the stopping test of [`sa_music_unknown_s`].
pub const STOP_TOL: f64 = 1e-8;

/// Largest number of partial supports the exhaustive search may visit.
pub const EXHAUSTIVE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum PartialSupportMethod {
    SsOmp,
    SsOmsp,
    /// Uses the `s − r` smallest indices of the given set, which needs at least that many.
    Oracle(SupportSet),
    Exhaustive,
}

impl PartialSupportMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PartialSupportMethod::SsOmp => "ss-omp",
            PartialSupportMethod::SsOmsp => "ss-omsp",
            PartialSupportMethod::Oracle(_) => "oracle",
            PartialSupportMethod::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyRule {
    SsOmp,
    SsOmsp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    #[serde(rename = "J")]
    pub support: SupportSet,
    pub r_used: usize,
    pub method: String,
    /// ζ values of the final MUSIC pass; empty for purely greedy methods.
    pub scores: Vec<f64>,
    pub partial_support: SupportSet,
}

/// Columns of `A` scaled to unit norm.
fn normalized_columns(a: &Matrix) -> Result<DMatrix<C64>> {
    let mut d = a.data().clone();
    for (j, mut col) in d.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(invalid(format!("column {} of A is zero", j + 1)));
        }
        col.unscale_mut(norm);
    }
    Ok(d)
}

fn check_rows(s: &OrthonormalBasis, a: &Matrix) -> Result<()> {
    if s.ambient_dim() != a.rows() {
        return Err(mismatch(format!(
            "subspace lives in dimension {} but A has {} rows",
            s.ambient_dim(),
            a.rows()
        )));
    }
    Ok(())
}

fn check_sparsity(s: usize, n: usize) -> Result<()> {
    if s > n {
        return Err(invalid(format!("sparsity {s} exceeds n = {n}")));
    }
    Ok(())
}

/// `ζ_ℓ = ‖P_S a_ℓ‖ / ‖a_ℓ‖` for unit-norm columns.
fn music_scores(s: &OrthonormalBasis, a_norm: &DMatrix<C64>) -> Vec<f64> {
    let coeffs = s.columns().adjoint() * a_norm;
    coeffs.column_iter().map(|c| c.norm().min(1.0)).collect()
}

/// Indices of the `k` largest scores outside `exclude`; ties go to the lowest index.
fn top_k(scores: &[f64], k: usize, exclude: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).filter(|i| !exclude.contains(i)).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Index of the largest score among `candidates`, lowest index on ties.
fn argmax(candidates: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in candidates {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// MUSIC: the `s` columns of `A` closest to the subspace `S`.
pub fn music(s_basis: &OrthonormalBasis, a: &Matrix, s: usize) -> Result<RecoveryReport> {
    check_rows(s_basis, a)?;
    check_sparsity(s, a.cols())?;
    let a_norm = normalized_columns(a)?;
    let scores = music_scores(s_basis, &a_norm);
    let support = SupportSet::new(top_k(&scores, s, &[]), a.cols())?;
    Ok(RecoveryReport {
        support,
        r_used: s_basis.dim(),
        method: "music".into(),
        scores,
        partial_support: SupportSet::empty(a.cols()),
    })
}

/// Greedy selection state over the unit-norm columns of `A`.
///
/// Keeps an orthonormal basis of `R(A_J)` and the residuals `P⊥a_ℓ` of every column.
struct Greedy {
    a_norm: DMatrix<C64>,
    selected: Vec<usize>,
    span: GramSchmidt,
    residual: DMatrix<C64>,
}

impl Greedy {
    fn new(a_norm: DMatrix<C64>) -> Self {
        Self {
            span: GramSchmidt::new(a_norm.nrows()),
            residual: a_norm.clone(),
            a_norm,
            selected: Vec::new(),
        }
    }

    fn add(&mut self, k: usize) {
        self.selected.push(k);
        let before = self.span.dim();
        if self.span.push(&self.a_norm.column(k).into_owned()) {
            let q = self.span.to_basis().columns().column(before).into_owned();
            let coeffs = q.adjoint() * &self.residual;
            self.residual -= &q * coeffs;
        }
    }

    fn candidates(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.a_norm.ncols()).filter(|j| !self.selected.contains(j))
    }

    fn residual_norm(&self, j: usize) -> f64 {
        self.residual.column(j).norm()
    }

    /// `argmax ‖P_S P⊥ a_ℓ‖`.
    fn select_ss_omp(&self, s_basis: &OrthonormalBasis) -> Option<usize> {
        let proj = s_basis.columns().adjoint() * &self.residual;
        argmax(self.candidates().map(|j| (j, proj.column(j).norm())))
    }

    /// `argmax ‖P_{P⊥S} a_ℓ‖ / ‖P⊥ a_ℓ‖` over candidates outside the current span.
    fn select_ss_omsp(&self, s_basis: &OrthonormalBasis) -> Option<usize> {
        let q = self.residual_subspace(s_basis.columns(), 1.0);
        let proj = q.adjoint() * &self.residual;
        argmax(self.candidates().filter_map(|j| {
            let rn = self.residual_norm(j);
            (rn > SPAN_TOL).then(|| (j, (proj.column(j).norm() / rn).min(1.0)))
        }))
    }

    /// Orthonormal basis of `R(P⊥ M)`, dropping singular values at or below `SUBSPACE_RANK_TOL · scale`.
    fn residual_subspace(&self, m: &DMatrix<C64>, scale: f64) -> DMatrix<C64> {
        let basis = self.span.to_basis();
        let resid = basis.residual_matrix(m);
        let svd = thin_svd(&resid);
        let keep = svd
            .sigma
            .iter()
            .take_while(|&&s| s > SUBSPACE_RANK_TOL * scale)
            .count();
        svd.u.columns(0, keep).into_owned()
    }
}

/// Subspace-simultaneous OMP: `k` greedy steps maximizing `‖P_S P⊥_{R(A_J)} a_ℓ‖`.
pub fn ss_omp(s_basis: &OrthonormalBasis, a: &Matrix, k: usize) -> Result<SupportSet> {
    check_rows(s_basis, a)?;
    check_sparsity(k, a.cols())?;
    let mut g = Greedy::new(normalized_columns(a)?);
    for _ in 0..k {
        let j = g.select_ss_omp(s_basis).expect("k <= n leaves a candidate");
        g.add(j);
    }
    SupportSet::new(g.selected, a.cols())
}

/// Subspace-simultaneous orthogonal matching subspace pursuit.
pub fn ss_omsp(s_basis: &OrthonormalBasis, a: &Matrix, k: usize) -> Result<SupportSet> {
    check_rows(s_basis, a)?;
    check_sparsity(k, a.cols())?;
    let mut g = Greedy::new(normalized_columns(a)?);
    for step in 0..k {
        let j = g.select_ss_omsp(s_basis).ok_or(Error::SpanExhausted {
            selected: step,
            requested: k,
        })?;
        g.add(j);
    }
    SupportSet::new(g.selected, a.cols())
}

/// Rank-aware ORMP: as SS-OMSP with `P⊥S` replaced by `R(P⊥Y)`.
pub fn ra_ormp(y: &Matrix, a: &Matrix, k: usize) -> Result<SupportSet> {
    if y.rows() != a.rows() {
        return Err(mismatch("Y and A must have the same number of rows"));
    }
    check_sparsity(k, a.cols())?;
    let mut g = Greedy::new(normalized_columns(a)?);
    let scale = crate::linalg::spectral_norm(y.data());
    for step in 0..k {
        let q = g.residual_subspace(y.data(), scale);
        let proj = q.adjoint() * &g.residual;
        let j = argmax(g.candidates().filter_map(|j| {
            let rn = g.residual_norm(j);
            (rn > SPAN_TOL).then(|| (j, (proj.column(j).norm() / rn).min(1.0)))
        }))
        .ok_or(Error::SpanExhausted {
            selected: step,
            requested: k,
        })?;
        g.add(j);
    }
    SupportSet::new(g.selected, a.cols())
}

/// p-SOMP: `s` greedy steps maximizing `‖Yᴴ P⊥_{R(A_J)} a_ℓ‖_p`. `p = 2` is M-OMP.
pub fn p_somp(y: &Matrix, a: &Matrix, s: usize, p: f64) -> Result<SupportSet> {
    if y.rows() != a.rows() {
        return Err(mismatch("Y and A must have the same number of rows"));
    }
    check_sparsity(s, a.cols())?;
    if !(p >= 1.0) {
        return Err(invalid(format!("norm order p = {p} must be >= 1")));
    }
    let a_norm = normalized_columns(a)?;
    let mut selected = Vec::with_capacity(s);
    let mut span = GramSchmidt::new(a.rows());
    let mut y_res = y.data().clone();
    for _ in 0..s {
        let corr = y_res.adjoint() * &a_norm;
        let j = argmax(
            (0..a.cols())
                .filter(|j| !selected.contains(j))
                .map(|j| (j, p_norm(corr.column(j).iter(), p))),
        )
        .expect("s <= n leaves a candidate");
        selected.push(j);
        let before = span.dim();
        if span.push(&a_norm.column(j).into_owned()) {
            let q = span.to_basis().columns().column(before).into_owned();
            let coeffs = q.adjoint() * &y_res;
            y_res -= &q * coeffs;
        }
    }
    SupportSet::new(selected, a.cols())
}

fn p_norm<'a>(values: impl Iterator<Item = &'a C64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.map(|z| z.norm()).fold(0.0, f64::max)
    } else if p == 1.0 {
        values.map(|z| z.norm()).sum()
    } else if p == 2.0 {
        values.map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else {
        values.map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Augments `S` with `R(A_{J1})` and completes `J1` by the `r` largest ζ outside it.
fn complete_support(
    s_basis: &OrthonormalBasis,
    a_norm: &DMatrix<C64>,
    j1: &[usize],
    r: usize,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let a_j1 = DMatrix::from_fn(a_norm.nrows(), j1.len(), |i, k| a_norm[(i, j1[k])]);
    let augmented = augment_subspace(s_basis, &a_j1)?;
    let scores = music_scores(&augmented, a_norm);
    let mut j = j1.to_vec();
    j.extend(top_k(&scores, r, j1));
    Ok((j, scores))
}

/// `‖P⊥_{R(A_J)} P_S‖`.
fn fit_residual(s_basis: &OrthonormalBasis, a_norm: &DMatrix<C64>, j: &[usize]) -> Result<f64> {
    let a_j = DMatrix::from_fn(a_norm.nrows(), j.len(), |i, k| a_norm[(i, j[k])]);
    cross_residual_norm(&OrthonormalBasis::span_of(&a_j), s_basis)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Picks the `k`-subset whose completed support best contains `S`.
///
/// Every `k`-subset `J1` is completed by the MUSIC pass on `S + R(A_{J1})`; the
/// winner minimizes `‖P⊥_{R(A_J)} P_S‖` for the completed `J`, first in
/// lexicographic order on ties.
fn exhaustive_partial_support(
    s_basis: &OrthonormalBasis,
    a_norm: &DMatrix<C64>,
    k: usize,
    r: usize,
) -> Result<Vec<usize>> {
    let n = a_norm.ncols();
    let count = binomial(n, k);
    if count > EXHAUSTIVE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "C({n}, {k}) = {count} partial supports exceed the budget of {EXHAUSTIVE_BUDGET}"
        )));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut failure = None;
    for_each_subset(n, k, |j1| {
        let outcome = complete_support(s_basis, a_norm, j1, r)
            .and_then(|(j, _)| fit_residual(s_basis, a_norm, &j));
        match outcome {
            Ok(fit) => {
                if best.as_ref().is_none_or(|(b, _)| fit < *b) {
                    best = Some((fit, j1.to_vec()));
                }
                true
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.map(|(_, j1)| j1).unwrap_or_default())
}

/// SA-MUSIC from an estimated subspace.
pub fn sa_music_with_subspace(
    est: &SubspaceEstimate,
    a: &Matrix,
    s: usize,
    method: &PartialSupportMethod,
) -> Result<RecoveryReport> {
    check_rows(&est.basis, a)?;
    check_sparsity(s, a.cols())?;
    let n = a.cols();
    let r = est.r;
    let method_name = format!("sa-music-{}", method.name());
    if r >= s {
        let mut report = music(&est.basis, a, s)?;
        report.method = method_name;
        return Ok(report);
    }
    let k = s - r;
    let a_norm = normalized_columns(a)?;
    let j1: Vec<usize> = match method {
        PartialSupportMethod::SsOmp => ss_omp(&est.basis, a, k)?.indices().to_vec(),
        PartialSupportMethod::SsOmsp => ss_omsp(&est.basis, a, k)?.indices().to_vec(),
        PartialSupportMethod::Oracle(j) => {
            if j.universe() != n {
                return Err(invalid("oracle support lives in a different universe"));
            }
            if j.len() < k {
                return Err(invalid(format!(
                    "oracle support has {} indices but {k} are needed",
                    j.len()
                )));
            }
            j.indices()[..k].to_vec()
        }
        PartialSupportMethod::Exhaustive => exhaustive_partial_support(&est.basis, &a_norm, k, r)?,
    };
    let (j, scores) = complete_support(&est.basis, &a_norm, &j1, r)?;
    Ok(RecoveryReport {
        support: SupportSet::new(j, n)?,
        r_used: r,
        method: method_name,
        scores,
        partial_support: SupportSet::new(j1, n)?,
    })
}

/// Subspace-augmented MUSIC with known sparsity `s`.
pub fn sa_music(
    y: &Matrix,
    a: &Matrix,
    s: usize,
    tau: f64,
    method: &PartialSupportMethod,
) -> Result<RecoveryReport> {
    if y.rows() != a.rows() {
        return Err(mismatch("Y and A must have the same number of rows"));
    }
    check_sparsity(s, a.cols())?;
    let est = estimate_signal_subspace(y, tau)?;
    sa_music_with_subspace(&est, a, s, method)
}

/// SA-MUSIC with unknown sparsity, stopping once `‖P⊥_{R(A_J)} P_Ŝ‖ ≤ η`.
pub fn sa_music_unknown_s(
    y: &Matrix,
    a: &Matrix,
    tau: f64,
    eta: f64,
    rule: GreedyRule,
) -> Result<RecoveryReport> {
    if y.rows() != a.rows() {
        return Err(mismatch("Y and A must have the same number of rows"));
    }
    let est = estimate_signal_subspace(y, tau)?;
    sa_music_unknown_s_with_subspace(&est, a, eta, rule)
}

pub fn sa_music_unknown_s_with_subspace(
    est: &SubspaceEstimate,
    a: &Matrix,
    eta: f64,
    rule: GreedyRule,
) -> Result<RecoveryReport> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("eta = {eta} must lie in [0, 1]")));
    }
    check_rows(&est.basis, a)?;
    let n = a.cols();
    let r = est.r;
    check_sparsity(r, n)?;
    let a_norm = normalized_columns(a)?;
    let s_basis = &est.basis;

    let mut scores = music_scores(s_basis, &a_norm);
    let mut j = top_k(&scores, r, &[]);
    let mut greedy = Greedy::new(a_norm.clone());
    let mut iterations = 0;
    while fit_residual(s_basis, &a_norm, &j)? > eta + STOP_TOL {
        if iterations >= n - r {
            return Err(Error::NoConvergence(iterations));
        }
        let pick = match rule {
            GreedyRule::SsOmp => greedy.select_ss_omp(s_basis),
            GreedyRule::SsOmsp => greedy.select_ss_omsp(s_basis),
        };
        let Some(k) = pick else {
            return Err(Error::NoConvergence(iterations));
        };
        greedy.add(k);
        let (next, next_scores) = complete_support(s_basis, &a_norm, &greedy.selected, r)?;
        j = next;
        scores = next_scores;
        iterations += 1;
    }
    let method = match rule {
        GreedyRule::SsOmp => "sa-music-unknown-ss-omp",
        GreedyRule::SsOmsp => "sa-music-unknown-ss-omsp",
    };
    Ok(RecoveryReport {
        support: SupportSet::new(j, n)?,
        r_used: r,
        method: method.into(),
        scores,
        partial_support: SupportSet::new(greedy.selected, n)?,
    })
}

/// Named recovery algorithms for the CLI and the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Music,
    SaMusicSsomp,
    SaMusicSsomsp,
    SaMusicOracle,
    SaMusicUnknown,
    SsOmp,
    SsOmsp,
    RaOrmp,
    MOmp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Music,
        Algorithm::SaMusicSsomp,
        Algorithm::SaMusicSsomsp,
        Algorithm::SaMusicOracle,
        Algorithm::SaMusicUnknown,
        Algorithm::SsOmp,
        Algorithm::SsOmsp,
        Algorithm::RaOrmp,
        Algorithm::MOmp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Music => "music",
            Algorithm::SaMusicSsomp => "sa-music-ssomp",
            Algorithm::SaMusicSsomsp => "sa-music-ssomsp",
            Algorithm::SaMusicOracle => "sa-music-oracle",
            Algorithm::SaMusicUnknown => "sa-music-unknown",
            Algorithm::SsOmp => "ss-omp",
            Algorithm::SsOmsp => "ss-omsp",
            Algorithm::RaOrmp => "ra-ormp",
            Algorithm::MOmp => "m-omp",
        }
    }

    /// Whether the algorithm starts from the estimated signal subspace.
    pub fn uses_subspace(self) -> bool {
        !matches!(self, Algorithm::RaOrmp | Algorithm::MOmp)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| invalid(format!("unknown algorithm '{s}'")))
    }
}

/// Inputs shared by every algorithm in [`run_algorithm`].
#[derive(Debug, Clone)]
pub struct RecoveryInputs<'a> {
    pub y: &'a Matrix,
    pub a: &'a Matrix,
    pub s: Option<usize>,
    pub tau: f64,
    pub eta: f64,
    /// True support, consulted only by the oracle variant.
    pub oracle: Option<&'a SupportSet>,
}

/// Runs `algo`, reusing `est` when given instead of re-estimating the subspace.
pub fn run_algorithm(
    algo: Algorithm,
    inputs: &RecoveryInputs<'_>,
    est: Option<&SubspaceEstimate>,
) -> Result<RecoveryReport> {
    let owned;
    let est = if algo.uses_subspace() {
        match est {
            Some(e) => Some(e),
            None => {
                owned = estimate_signal_subspace(inputs.y, inputs.tau)?;
                Some(&owned)
            }
        }
    } else {
        None
    };
    let need_s = || inputs.s.ok_or_else(|| invalid(format!("{algo} needs the sparsity s")));
    let n = inputs.a.cols();
    let greedy_report = |support: SupportSet, r_used: usize| RecoveryReport {
        support,
        r_used,
        method: algo.name().into(),
        scores: Vec::new(),
        partial_support: SupportSet::empty(n),
    };
    match algo {
        Algorithm::Music => music(&est.unwrap().basis, inputs.a, need_s()?),
        Algorithm::SaMusicSsomp => {
            sa_music_with_subspace(est.unwrap(), inputs.a, need_s()?, &PartialSupportMethod::SsOmp)
        }
        Algorithm::SaMusicSsomsp => {
            sa_music_with_subspace(est.unwrap(), inputs.a, need_s()?, &PartialSupportMethod::SsOmsp)
        }
        Algorithm::SaMusicOracle => {
            let truth = inputs
                .oracle
                .ok_or_else(|| invalid("sa-music-oracle needs the true support"))?;
            sa_music_with_subspace(
                est.unwrap(),
                inputs.a,
                need_s()?,
                &PartialSupportMethod::Oracle(truth.clone()),
            )
        }
        Algorithm::SaMusicUnknown => {
            sa_music_unknown_s_with_subspace(est.unwrap(), inputs.a, inputs.eta, GreedyRule::SsOmsp)
        }
        Algorithm::SsOmp => {
            let e = est.unwrap();
            Ok(greedy_report(ss_omp(&e.basis, inputs.a, need_s()?)?, e.r))
        }
        Algorithm::SsOmsp => {
            let e = est.unwrap();
            Ok(greedy_report(ss_omsp(&e.basis, inputs.a, need_s()?)?, e.r))
        }
        Algorithm::RaOrmp => Ok(greedy_report(ra_ormp(inputs.y, inputs.a, need_s()?)?, 0)),
        Algorithm::MOmp => Ok(greedy_report(p_somp(inputs.y, inputs.a, need_s()?, 2.0)?, 0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::rng;

    fn unit_span(m: usize, idx: &[usize]) -> OrthonormalBasis {
        let q = DMatrix::from_fn(m, idx.len(), |i, k| {
            if i == idx[k] {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        OrthonormalBasis::new(q).unwrap()
    }

    #[test]
    fn music_on_identity() {
        let rep = music(&unit_span(4, &[0, 2]), &Matrix::identity(4), 2).unwrap();
        assert_eq!(rep.support.one_based(), vec![1, 3]);
        assert_eq!(rep.scores, vec![1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn music_whole_space_ties_to_lowest_index() {
        let rep = music(&OrthonormalBasis::whole_space(4), &Matrix::identity(4), 2).unwrap();
        assert_eq!(rep.support.one_based(), vec![1, 2]);
        assert!(rep.scores.iter().all(|&z| z == 1.0));
    }

    #[test]
    fn music_rejects_zero_columns_and_large_s() {
        let a = Matrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(music(&unit_span(2, &[0]), &a, 1).is_err());
        assert!(music(&unit_span(4, &[0]), &Matrix::identity(4), 5).is_err());
    }

    #[test]
    fn greedy_on_identity() {
        let s = unit_span(5, &[1, 4]);
        let eye = Matrix::identity(5);
        assert_eq!(ss_omp(&s, &eye, 2).unwrap().one_based(), vec![2, 5]);
        assert_eq!(ss_omsp(&s, &eye, 2).unwrap().one_based(), vec![2, 5]);
        assert!(ss_omp(&s, &eye, 0).unwrap().is_empty());
    }

    #[test]
    fn ss_omsp_skips_spanned_columns() {
        // Column 3 equals column 1, so it is in the span once column 1 is picked.
        let a = Matrix::from_real_rows(&[
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let s = unit_span(3, &[0]);
        let j = ss_omsp(&s, &a, 3).unwrap();
        assert!(!j.contains(2), "picked a spanned column: {j}");
        assert!(matches!(ss_omsp(&s, &a, 4), Err(Error::SpanExhausted { selected: 3, requested: 4 })));
    }

    #[test]
    fn p_somp_reductions() {
        let mut rng = rng::seeded(3);
        let x = DMatrix::from_fn(6, 3, |i, _| C64::new([0.1, 5.0, 0.2, 3.0, 0.0, 1.0][i], 0.0))
            + rng::real_gaussian(&mut rng, 6, 3, 0.01);
        let y = Matrix::from_complex(x).unwrap();
        let j = p_somp(&y, &Matrix::identity(6), 3, 2.0).unwrap();
        assert_eq!(j.one_based(), vec![2, 4, 6]);
        for p in [1.0, 3.0, f64::INFINITY] {
            assert_eq!(p_somp(&y, &Matrix::identity(6), 3, p).unwrap(), j);
        }
        assert!(p_somp(&y, &Matrix::identity(6), 3, 0.5).is_err());
    }

    #[test]
    fn single_snapshot_m_omp_is_omp() {
        let mut rng = rng::seeded(4);
        let a = Matrix::from_complex(rng::complex_gaussian(&mut rng, 12, 30)).unwrap();
        let mut x = DMatrix::<C64>::zeros(30, 1);
        for (i, v) in [(3, 1.0), (11, -0.8), (20, 0.6)] {
            x[(i, 0)] = C64::new(v, 0.0);
        }
        let y = Matrix::from_complex(a.data() * &x).unwrap();
        // Textbook OMP with least-squares residual updates.
        let a_norm = normalized_columns(&a).unwrap();
        let mut chosen: Vec<usize> = Vec::new();
        let mut resid = y.data().column(0).into_owned();
        for _ in 0..3 {
            let corr = a_norm.adjoint() * &resid;
            let k = (0..30)
                .filter(|j| !chosen.contains(j))
                .max_by(|&p, &q| corr[p].norm().total_cmp(&corr[q].norm()).then(q.cmp(&p)))
                .unwrap();
            chosen.push(k);
            let sub = DMatrix::from_fn(12, chosen.len(), |i, c| a_norm[(i, chosen[c])]);
            let coef = sub.clone().svd(true, true).solve(&y.data().column(0).into_owned(), 1e-14).unwrap();
            resid = y.data().column(0) - sub * coef;
        }
        chosen.sort();
        assert_eq!(p_somp(&y, &a, 3, 2.0).unwrap().indices(), &chosen[..]);
    }

    fn instance(m: usize, n: usize, s: usize, rank: usize, seed: u64) -> (Matrix, Matrix, SupportSet) {
        let mut rng = rng::seeded(seed);
        let a = Matrix::from_complex(rng::complex_gaussian(&mut rng, m, n)).unwrap();
        let support = SupportSet::new(rng::random_subset(&mut rng, n, s), n).unwrap();
        let u = rng::haar_orthonormal(&mut rng, s, rank, Field::Complex);
        let v = rng::complex_gaussian(&mut rng, rank, 3 * s);
        let block = u * v;
        let mut x = DMatrix::<C64>::zeros(n, 3 * s);
        for (k, &row) in support.indices().iter().enumerate() {
            x.set_row(row, &block.row(k));
        }
        let y = Matrix::from_complex(a.data() * x).unwrap();
        (a, y, support)
    }

    #[test]
    fn full_rank_noiseless_music_and_sa_music_agree() {
        for seed in 0..10 {
            let (a, y, j0) = instance(12, 40, 5, 5, seed);
            let rep = sa_music(&y, &a, 5, 1e-9, &PartialSupportMethod::SsOmsp).unwrap();
            assert_eq!(rep.support, j0);
            let est = estimate_signal_subspace(&y, 1e-9).unwrap();
            let plain = music(&est.basis, &a, 5).unwrap();
            assert_eq!(plain.support, rep.support);
            assert_eq!(plain.scores, rep.scores);
        }
    }

    #[test]
    fn rank_defective_noiseless_recovery() {
        for seed in 0..10 {
            let (a, y, j0) = instance(16, 40, 6, 3, 100 + seed);
            for method in [
                PartialSupportMethod::SsOmp,
                PartialSupportMethod::SsOmsp,
                PartialSupportMethod::Oracle(j0.clone()),
            ] {
                let rep = sa_music(&y, &a, 6, 1e-9, &method).unwrap();
                assert_eq!(rep.r_used, 3);
                assert_eq!(rep.support, j0, "{} seed {seed}", method.name());
                assert!(rep.partial_support.is_subset_of(&j0));
            }
        }
    }

    #[test]
    fn exhaustive_partial_support() {
        let (a, y, j0) = instance(8, 12, 4, 2, 7);
        let rep = sa_music(&y, &a, 4, 1e-9, &PartialSupportMethod::Exhaustive).unwrap();
        assert_eq!(rep.support, j0);
        let (a, y, _) = instance(60, 200, 10, 2, 8);
        assert!(matches!(
            sa_music(&y, &a, 10, 1e-9, &PartialSupportMethod::Exhaustive),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn wrong_oracle_still_returns_s_indices() {
        let (a, y, j0) = instance(16, 40, 6, 3, 9);
        let wrong = SupportSet::new(j0.complement()[..3].to_vec(), 40).unwrap();
        let rep = sa_music(&y, &a, 6, 1e-9, &PartialSupportMethod::Oracle(wrong)).unwrap();
        assert_eq!(rep.support.len(), 6);
    }

    #[test]
    fn ss_omsp_matches_ra_ormp_without_noise() {
        for seed in 0..10 {
            let (a, y, _) = instance(14, 40, 6, 3, 200 + seed);
            let span = OrthonormalBasis::span_of(y.data());
            let est = estimate_signal_subspace(&y, 1e-9).unwrap();
            assert_eq!(span.dim(), 3);
            let ra = ra_ormp(&y, &a, 6).unwrap();
            let mut g = Greedy::new(normalized_columns(&a).unwrap());
            let mut ra_order = Vec::new();
            // Compare selection order, not only the final set.
            for _ in 0..6 {
                let k = g.select_ss_omsp(&est.basis).unwrap();
                ra_order.push(k);
                g.add(k);
            }
            let mut sorted = ra_order.clone();
            sorted.sort();
            assert_eq!(ra.indices(), &sorted[..]);
            assert_eq!(ss_omsp(&span, &a, 6).unwrap(), ra);
        }
    }

    #[test]
    fn unknown_sparsity() {
        for seed in 0..5 {
            let (a, y, j0) = instance(12, 40, 5, 5, 300 + seed);
            let rep = sa_music_unknown_s(&y, &a, 1e-9, 0.0, GreedyRule::SsOmsp).unwrap();
            assert_eq!(rep.support, j0);
            let stop = sa_music_unknown_s(&y, &a, 1e-9, 1.0, GreedyRule::SsOmp).unwrap();
            assert_eq!(stop.support.len(), 5);
        }
        for seed in 0..5 {
            let (a, y, j0) = instance(16, 40, 6, 3, 400 + seed);
            let known = sa_music(&y, &a, 6, 1e-9, &PartialSupportMethod::SsOmsp).unwrap();
            let rep = sa_music_unknown_s(&y, &a, 1e-9, 0.0, GreedyRule::SsOmsp).unwrap();
            if known.support == j0 {
                assert_eq!(rep.support, j0);
            }
            let stop = sa_music_unknown_s(&y, &a, 1e-9, 1.0, GreedyRule::SsOmsp).unwrap();
            assert_eq!(stop.support.len(), 3);
        }
        let (a, y, _) = instance(12, 40, 5, 5, 1);
        assert!(sa_music_unknown_s(&y, &a, 1e-9, 1.5, GreedyRule::SsOmp).is_err());
    }

    #[test]
    fn music_is_invariant_to_column_scaling() {
        let (a, y, _) = instance(12, 40, 5, 5, 11);
        let est = estimate_signal_subspace(&y, 1e-9).unwrap();
        let mut scaled = a.data().clone();
        for (j, mut c) in scaled.column_iter_mut().enumerate() {
            c.scale_mut(0.1 + j as f64);
        }
        let scaled = Matrix::from_complex(scaled).unwrap();
        let x = music(&est.basis, &a, 5).unwrap();
        let z = music(&est.basis, &scaled, 5).unwrap();
        assert_eq!(x.support, z.support);
        for (p, q) in x.scores.iter().zip(&z.scores) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
        }
        assert!("bp".parse::<Algorithm>().is_err());
    }
}
