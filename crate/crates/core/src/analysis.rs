//! Recovery guarantees in executable form: weak-1 restricted isometry
//! constants, Kruskal rank, the row-norm bound ρ̲(s, r), δ–η trade-off curves
//! and sample-complexity calculators.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::linalg::decomp::hermitian_eig_desc_raw;
use crate::linalg::{singular_values, Matrix, SupportSet, C64};
use crate::signal::for_each_subset;

/// Largest n accepted by [`weak1_ric`].
pub const WEAK1_MAX_N: usize = 2048;
/// Largest n accepted by [`kruskal_rank`].
pub const KRUSKAL_MAX_N: usize = 16;
/// Largest n accepted by [`uniform_ric`].
pub const UNIFORM_RIC_MAX_N: usize = 20;
/// Relative rank threshold of [`kruskal_rank`].
pub const KRUSKAL_TOL: f64 = 1e-10;

fn serialize_one_based<S: Serializer>(v: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(*v as u64 + 1)
}

/// Weak-1 symmetric and asymmetric restricted isometry constants of `A` at `J`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weak1Ric {
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "J")]
    pub support: SupportSet,
    /// Column (0-based; 1-based when serialized) attaining `delta`.
    #[serde(serialize_with = "serialize_one_based")]
    pub argmax_j: usize,
}

/// Exact `δ`, `α`, `β` over all `A_{J∪{j}}`, `j ∉ J`.
///
/// The Gram matrix of `A_J` is computed once and bordered by one column per candidate.
pub fn weak1_ric(a: &Matrix, j: &SupportSet) -> Result<Weak1Ric> {
    let n = a.cols();
    if j.universe() != n {
        return Err(invalid(format!(
            "support lives in [1, {}] but A has {n} columns",
            j.universe()
        )));
    }
    if n > WEAK1_MAX_N {
        return Err(Error::UnsupportedSize(format!(
            "weak-1 RIC enumeration limited to n <= {WEAK1_MAX_N}, got {n}"
        )));
    }
    let outside = j.complement();
    if outside.is_empty() {
        return Err(invalid("J must leave at least one column outside"));
    }
    let s = j.len();
    let a_j = a.select_columns(j.indices());
    let gram_j = a_j.adjoint() * &a_j;
    let cross = a_j.adjoint() * a.data();

    let mut bordered = DMatrix::<C64>::zeros(s + 1, s + 1);
    bordered.view_mut((0, 0), (s, s)).copy_from(&gram_j);
    let mut best = Weak1Ric {
        delta: -1.0,
        alpha: f64::INFINITY,
        beta: 0.0,
        support: j.clone(),
        argmax_j: outside[0],
    };
    for &col in &outside {
        for i in 0..s {
            bordered[(i, s)] = cross[(i, col)];
            bordered[(s, i)] = cross[(i, col)].conj();
        }
        bordered[(s, s)] = C64::new(a.data().column(col).norm_squared(), 0.0);
        let (values, _) = hermitian_eig_desc_raw(&bordered);
        let (top, bottom) = (values[0], values[s]);
        let delta = (top - 1.0).abs().max((bottom - 1.0).abs());
        if delta > best.delta {
            best.delta = delta;
            best.argmax_j = col;
        }
        best.alpha = best.alpha.min(bottom.max(0.0).sqrt());
        best.beta = best.beta.max(top.max(0.0).sqrt());
    }
    Ok(best)
}

/// Uniform RIC `δ_k(A) = max_{|K| = k} ‖A_Kᴴ A_K − I‖` by enumeration.
pub fn uniform_ric(a: &Matrix, k: usize) -> Result<f64> {
    let n = a.cols();
    if n > UNIFORM_RIC_MAX_N {
        return Err(Error::UnsupportedSize(format!(
            "uniform RIC enumeration limited to n <= {UNIFORM_RIC_MAX_N}, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(invalid(format!("order {k} outside [1, {n}]")));
    }
    let mut worst: f64 = 0.0;
    for_each_subset(n, k, |cols| {
        let sub = a.select_columns(cols);
        let (values, _) = hermitian_eig_desc_raw(&(sub.adjoint() * &sub));
        worst = worst
            .max((values[0] - 1.0).abs())
            .max((values[k - 1] - 1.0).abs());
        true
    });
    Ok(worst)
}

/// Kruskal rank: the largest k such that every k columns are linearly independent.
pub fn kruskal_rank(a: &Matrix) -> Result<usize> {
    let n = a.cols();
    if n > KRUSKAL_MAX_N {
        return Err(Error::UnsupportedSize(format!(
            "Kruskal rank enumeration limited to n <= {KRUSKAL_MAX_N}, got {n}"
        )));
    }
    let top = singular_values(a.data())[0];
    if top == 0.0 {
        return Ok(0);
    }
    let threshold = KRUSKAL_TOL * top;
    let mut krank = 0;
    for k in 1..=n.min(a.rows()) {
        let mut all = true;
        for_each_subset(n, k, |cols| {
            let smallest = *singular_values(&a.select_columns(cols)).last().unwrap();
            all = smallest > threshold;
            all
        });
        if !all {
            break;
        }
        krank = k;
    }
    Ok(krank)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

fn check_rho_args(s: usize, r: usize) -> Result<()> {
    if !(2 * r > s && r < s) {
        return Err(invalid(format!("need s/2 < r < s, got s = {s}, r = {r}")));
    }
    Ok(())
}

/// `ρ̂(s, r, q)`; `None` where the numerator is nonpositive.
pub fn rho_hat(s: usize, r: usize, q: f64) -> Result<Option<f64>> {
    check_rho_args(s, r)?;
    if !(q > 0.0) {
        return Err(invalid(format!("q = {q} must be positive")));
    }
    Ok(rho_hat_unchecked(s, r, q))
}

fn rho_hat_unchecked(s: usize, r: usize, q: f64) -> Option<f64> {
    let ratio = s as f64 / r as f64;
    let den = 2.0 - ratio;
    let l = ln_binomial(s, r) / (2.0 * r as f64);
    // num/den = 1 + (C^{-q/2r} − 1)/den, evaluated without cancellation.
    let shifted = (-q * l).exp_m1() / den;
    if shifted <= -1.0 {
        return None;
    }
    Some((shifted.ln_1p() / q).exp())
}

/// `ρ̲(s, r) = sup_{q > 0} ρ̂(s, r, q)`, lower bound on the (s−r)-th largest row norm
/// of any s × r matrix with orthonormal columns.
pub fn rho_lower_bound(s: usize, r: usize) -> Result<f64> {
    check_rho_args(s, r)?;
    const GRID: usize = 400;
    let (lo, hi) = (1e-6f64.ln(), 1e2f64.ln());
    let f = |t: f64| rho_hat_unchecked(s, r, t.exp()).unwrap_or(0.0);
    let ts: Vec<f64> = (0..GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID - 1) as f64)
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let (best_i, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    if best <= 0.0 {
        return Ok(0.0);
    }
    let (mut a, mut b) = (ts[best_i.saturating_sub(1)], ts[(best_i + 1).min(GRID - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    Ok(best.max(fc).max(fd))
}

/// Guarantee regime of a δ–η trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    MusicFullRank,
    SaMusicOracle,
    SaMusicSsomp { s: usize, r: usize },
    SaMusicSsomsp { s: usize, r: usize },
    SsomspOracle,
    Mbp { n: usize, snapshots: usize, epsilon: f64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::MusicFullRank => "music_full_rank",
            Regime::SaMusicOracle => "sa_music_oracle",
            Regime::SaMusicSsomp { .. } => "sa_music_ssomp",
            Regime::SaMusicSsomsp { .. } => "sa_music_ssomsp",
            Regime::SsomspOracle => "ssomsp_oracle",
            Regime::Mbp { .. } => "mbp",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Regime::SaMusicSsomp { s, r } | Regime::SaMusicSsomsp { s, r } => {
                if r == 0 || r > s {
                    return Err(invalid(format!("need 1 <= r <= s, got s = {s}, r = {r}")));
                }
            }
            Regime::Mbp { n, snapshots, epsilon } => {
                if n == 0 || snapshots == 0 || !(epsilon > 0.0 && epsilon < 1.0) {
                    return Err(invalid("mbp needs n, N >= 1 and epsilon in (0, 1)"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses `music_full_rank`, `sa_music_oracle`, `ssomsp_oracle`, `sa_music_ssomp:s,r`,
/// `sa_music_ssomsp:s,r` and `mbp:n,N,epsilon`.
impl FromStr for Regime {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (name, args) = text.split_once(':').unwrap_or((text, ""));
        let nums: Vec<&str> = args.split(',').filter(|a| !a.is_empty()).collect();
        let count = |k: usize| -> Result<()> {
            if nums.len() != k {
                return Err(Error::Parse(format!("regime '{name}' takes {k} parameters")));
            }
            Ok(())
        };
        let int = |t: &str| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("'{t}': {e}")));
        let regime = match name.replace('-', "_").as_str() {
            "music_full_rank" => {
                count(0)?;
                Regime::MusicFullRank
            }
            "sa_music_oracle" => {
                count(0)?;
                Regime::SaMusicOracle
            }
            "ssomsp_oracle" => {
                count(0)?;
                Regime::SsomspOracle
            }
            "sa_music_ssomp" => {
                count(2)?;
                Regime::SaMusicSsomp { s: int(nums[0])?, r: int(nums[1])? }
            }
            "sa_music_ssomsp" => {
                count(2)?;
                Regime::SaMusicSsomsp { s: int(nums[0])?, r: int(nums[1])? }
            }
            "mbp" => {
                count(3)?;
                let epsilon = nums[2]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("'{}': {e}", nums[2])))?;
                Regime::Mbp { n: int(nums[0])?, snapshots: int(nums[1])?, epsilon }
            }
            other => return Err(Error::Parse(format!("unknown regime '{other}'"))),
        };
        regime.validate()?;
        Ok(regime)
    }
}

/// `√((1−δ)/(1+δ)) · (c − √δ)/(2 + c − √δ)`, the SS-OMSP family of bounds.
fn ssomsp_family(delta: f64, c: f64) -> Option<f64> {
    let x = c - delta.sqrt();
    if x < 0.0 {
        return None;
    }
    Some(((1.0 - delta) / (1.0 + delta)).sqrt() * x / (2.0 + x))
}

/// Largest δ for which the M-BP condition holds, on the branch δ < 1/2.
///
/// With `x = δ/(1−δ)` the condition reads `x⁻² + 2 ln x ≥ 2 ln(n/ε)/N + 1`, whose
/// left side decreases on (0, 1).
pub fn mbp_delta_max(n: usize, snapshots: usize, epsilon: f64) -> Result<f64> {
    Regime::Mbp { n, snapshots, epsilon }.validate()?;
    let rhs = 2.0 * (n as f64 / epsilon).ln() / snapshots as f64 + 1.0;
    let f = |x: f64| x.powi(-2) + 2.0 * x.ln();
    let (mut lo, mut hi) = (1e-12f64, 1.0f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo / (1.0 + lo))
}

/// Largest η certified by `regime` at weak-1 RIC `δ` for normalized `A`.
///
/// `None` means no η ≥ 0 is certified. The M-BP regime only covers the noiseless
/// case and returns `Some(0)` when δ is admissible.
pub fn eta_bound(regime: &Regime, delta: f64) -> Result<Option<f64>> {
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid(format!("delta = {delta} must lie in [0, 1)")));
    }
    regime.validate()?;
    let sd = delta.sqrt();
    let ratio = ((1.0 - delta) / (1.0 + delta)).sqrt();
    Ok(match *regime {
        Regime::MusicFullRank => Some((1.0 - sd) / 2.0),
        Regime::SaMusicOracle => Some(ratio * (1.0 - sd) / (3.0 - sd)),
        Regime::SsomspOracle => ssomsp_family(delta, (1.0 - delta).sqrt()),
        Regime::SaMusicSsomsp { s, r } => {
            ssomsp_family(delta, (r as f64 / s as f64).sqrt() * (1.0 - delta).sqrt())
        }
        Regime::SaMusicSsomp { s, r } => {
            if r >= s {
                Some((1.0 - sd) / 2.0)
            } else if 2 * r <= s {
                None
            } else {
                let (a, b, t) = ((1.0 + delta).sqrt(), (1.0 - delta).sqrt(), 1.0 - sd);
                let cond2 = t * b / (a * (1.0 + t));
                let cond3 = (rho_lower_bound(s, r)? / a - 2.0 * delta / b) / 2.0;
                (cond3 >= 0.0).then(|| cond2.min(cond3))
            }
        }
        Regime::Mbp { n, snapshots, epsilon } => {
            (delta <= mbp_delta_max(n, snapshots, epsilon)?).then_some(0.0)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuaranteeCurve {
    pub regime: Regime,
    /// `(δ, η_max)`, with `None` where the regime certifies nothing.
    pub samples: Vec<(f64, Option<f64>)>,
}

impl GuaranteeCurve {
    /// Samples δ = i/points for i = 0..points.
    pub fn sample(regime: Regime, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(invalid("a curve needs at least one point"));
        }
        let samples = (0..points)
            .map(|i| {
                let delta = i as f64 / points as f64;
                eta_bound(&regime, delta).map(|eta| (delta, eta))
            })
            .collect::<Result<_>>()?;
        Ok(Self { regime, samples })
    }

    /// η is nonincreasing in δ and the feasible δ form a prefix.
    pub fn is_monotone(&self) -> bool {
        let mut prev = f64::INFINITY;
        let mut infeasible_seen = false;
        for &(_, eta) in &self.samples {
            match eta {
                Some(e) => {
                    if infeasible_seen || e > prev {
                        return false;
                    }
                    prev = e;
                }
                None => infeasible_seen = true,
            }
        }
        true
    }

    /// `delta,eta_max,feasible`; infeasible rows carry η = 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,eta_max,feasible\n");
        for &(d, eta) in &self.samples {
            let _ = writeln!(out, "{d:?},{:?},{}", eta.unwrap_or(0.0), eta.is_some());
        }
        out
    }
}

/// Closed-form sufficient conditions on the number of measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum MeasurementBound {
    /// i.i.d. Gaussian, weak-1 RIP, square-root form.
    GaussianWeak1Cond1,
    /// i.i.d. Gaussian, weak-1 RIP, linear form.
    GaussianWeak1Cond2,
    /// i.i.d. Gaussian, weak-1 asymmetric RIP with parameter γ, square-root form.
    GaussianAsymmetricCond1,
    GaussianAsymmetricCond2,
    /// i.i.d. Gaussian, uniform RIP of order s.
    GaussianUniform,
    /// Random partial Fourier, weak-1 RIP.
    FourierWeak1,
    /// Unit-norm tight frame with coherence at most K/√m, weak-1 RIP for a random support.
    UntfWeak1 { k: f64 },
    UntfUniform { k: f64 },
}

impl MeasurementBound {
    /// Parses a bound by its CLI name; `k` is the coherence constant of the UNTF bounds.
    pub fn parse(name: &str, k: f64) -> Result<Self> {
        Ok(match name.replace('_', "-").as_str() {
            "gaussian-weak1-cond1" => MeasurementBound::GaussianWeak1Cond1,
            "gaussian" | "gaussian-weak1-cond2" => MeasurementBound::GaussianWeak1Cond2,
            "gaussian-asymmetric-cond1" => MeasurementBound::GaussianAsymmetricCond1,
            "gaussian-asymmetric" | "gaussian-asymmetric-cond2" => MeasurementBound::GaussianAsymmetricCond2,
            "gaussian-uniform" => MeasurementBound::GaussianUniform,
            "fourier" | "fourier-weak1" => MeasurementBound::FourierWeak1,
            "untf" | "untf-weak1" => MeasurementBound::UntfWeak1 { k },
            "untf-uniform" => MeasurementBound::UntfUniform { k },
            other => return Err(invalid(format!("unknown ensemble bound '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeasurementBound::GaussianWeak1Cond1 => "gaussian_weak1_cond1",
            MeasurementBound::GaussianWeak1Cond2 => "gaussian_weak1_cond2",
            MeasurementBound::GaussianAsymmetricCond1 => "gaussian_asymmetric_cond1",
            MeasurementBound::GaussianAsymmetricCond2 => "gaussian_asymmetric_cond2",
            MeasurementBound::GaussianUniform => "gaussian_uniform",
            MeasurementBound::FourierWeak1 => "fourier_weak1",
            MeasurementBound::UntfWeak1 { .. } => "untf_weak1",
            MeasurementBound::UntfUniform { .. } => "untf_uniform",
        }
    }

    /// Whether `m` satisfies the inequality exactly as stated.
    pub fn satisfied_by(&self, m: usize, s: usize, n: usize, delta: f64, eps: f64) -> bool {
        let mf = m as f64;
        match self {
            MeasurementBound::GaussianWeak1Cond1 | MeasurementBound::GaussianAsymmetricCond1 => {
                mf.sqrt() >= self.threshold(s, n, delta, eps).sqrt()
            }
            _ => mf >= self.threshold(s, n, delta, eps),
        }
    }

    /// Real-valued right-hand side, expressed as a bound on m.
    pub fn threshold(&self, s: usize, n: usize, delta: f64, eps: f64) -> f64 {
        let (sf, nf) = (s as f64, n as f64);
        let gap = (1.0 + delta).sqrt() - 1.0;
        let e_sqrt = std::f64::consts::E.sqrt();
        match *self {
            MeasurementBound::GaussianWeak1Cond1 => {
                let root = ((sf + 1.0).sqrt() + (2.0 * (2.0 * (nf - sf) / eps).ln()).sqrt()) / gap;
                root * root
            }
            MeasurementBound::GaussianWeak1Cond2 => {
                2.0 / (gap * gap) * (sf + 2.0 * (2.0 * (nf - sf) / eps).ln() + 1.0)
            }
            MeasurementBound::GaussianAsymmetricCond1 => {
                let root = ((sf + 1.0).sqrt() + (2.0 * ((nf - sf) / eps).ln()).sqrt()) / delta;
                root * root
            }
            MeasurementBound::GaussianAsymmetricCond2 => {
                2.0 / (delta * delta) * (sf + 2.0 * (2.0 * (nf - sf) / eps).ln() + 1.0)
            }
            MeasurementBound::GaussianUniform => {
                2.0 / (gap * gap) * ((3.0 + (nf / sf).ln()) * sf + 2.0 * (2.0 / eps).ln() + 1.0)
            }
            MeasurementBound::FourierWeak1 => {
                2.0 * (3.0 + delta) / (3.0 * delta * delta)
                    * ((2.0 * (nf - sf) / eps).ln() + (sf + 1.0).ln())
                    * (sf + 1.0)
            }
            MeasurementBound::UntfWeak1 { k } => {
                4.0 * e_sqrt / (delta * delta) * (sf + 288.0 * k * k * ((nf - sf) / eps).ln() + 1.0)
            }
            MeasurementBound::UntfUniform { k } => {
                4.0 * e_sqrt / (delta * delta)
                    * ((1.0 + 576.0 * k * k * (std::f64::consts::E * nf / sf).ln()) * sf
                        + 288.0 * k * k * (1.0 / eps).ln()
                        + 1.0)
            }
        }
    }
}

/// Smallest integer m satisfying `bound`. `delta` is γ for the asymmetric bounds.
pub fn min_measurements(
    bound: &MeasurementBound,
    s: usize,
    n: usize,
    delta: f64,
    epsilon: f64,
) -> Result<usize> {
    if s == 0 || s >= n {
        return Err(invalid(format!("need 1 <= s < n, got s = {s}, n = {n}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta = {delta} must lie in (0, 1)")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if let MeasurementBound::UntfWeak1 { k } | MeasurementBound::UntfUniform { k } = bound {
        if !(*k > 0.0) || !k.is_finite() {
            return Err(invalid(format!("coherence constant K = {k} must be positive")));
        }
    }
    let t = bound.threshold(s, n, delta, epsilon);
    if !t.is_finite() || t > 1e15 {
        return Err(invalid(format!("bound {t} is not representable")));
    }
    let mut m = t.ceil().max(1.0) as usize;
    while m > 1 && bound.satisfied_by(m - 1, s, n, delta, epsilon) {
        m -= 1;
    }
    while !bound.satisfied_by(m, s, n, delta, epsilon) {
        m += 1;
    }
    Ok(m)
}

/// Asymptotic oversampling factor `m/s ≥ (√(1+δ) − 1)⁻²` of the square-root Gaussian bound.
pub fn oversampling_factor_cond1(delta: f64) -> f64 {
    ((1.0 + delta).sqrt() - 1.0).powi(-2)
}

/// Asymptotic oversampling factor `2(√(1+δ) − 1)⁻²` of the linear Gaussian bound.
pub fn oversampling_factor_cond2(delta: f64) -> f64 {
    2.0 * oversampling_factor_cond1(delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotParams {
    pub m: usize,
    pub s: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub nu: f64,
    pub theta: f64,
    pub tau: f64,
    /// `σ_w² / λ₁(Γ)`.
    pub noise_ratio: f64,
}

/// The constant `(1+θ)τ·min{(1+ν)η/3, ν/(2+τ)}`.
pub fn snapshot_constant(p: &SnapshotParams) -> f64 {
    (1.0 + p.theta) * p.tau * ((1.0 + p.nu) * p.eta / 3.0).min(p.nu / (2.0 + p.tau))
}

/// Smallest N meeting all three snapshot conditions of the subspace estimation guarantee.
pub fn min_snapshots(p: &SnapshotParams) -> Result<usize> {
    for (name, v) in [
        ("epsilon", p.epsilon),
        ("eta", p.eta),
        ("nu", p.nu),
        ("theta", p.theta),
        ("tau", p.tau),
    ] {
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid(format!("{name} = {v} must lie in (0, 1)")));
        }
    }
    if !(p.noise_ratio >= 0.0) || !p.noise_ratio.is_finite() {
        return Err(invalid("noise ratio must be finite and nonnegative"));
    }
    if p.m == 0 || p.s == 0 {
        return Err(invalid("m and s must be positive"));
    }
    let (mf, sf) = (p.m as f64, p.s as f64);
    let log_term = (8.0 / p.epsilon).ln();
    let cond1 = 2 * (p.m + p.s) + 1;
    let t2 = 36.0 / (p.theta * p.theta) * (sf + log_term);
    let cond2 = t2.ceil() as usize;
    let cond3 = if p.noise_ratio == 0.0 {
        0
    } else {
        let c = snapshot_constant(p);
        let t3 = 144.0 / (c * c) * (p.noise_ratio + 2.0 * p.noise_ratio.sqrt()) * (mf + sf + log_term);
        if !t3.is_finite() || t3 > 1e18 {
            return Err(invalid(format!("snapshot bound {t3} is not representable")));
        }
        t3.ceil() as usize
    };
    Ok(cond1.max(cond2).max(cond3))
}
