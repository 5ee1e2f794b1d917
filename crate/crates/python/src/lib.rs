//! Python bindings for `samusic`.
//!
//! Matrices cross the boundary as row-major nested lists of `complex` (any
//! nested sequence of numbers is accepted on input, including NumPy arrays).
//! Column indices are 0-based on the Python side.

use std::fmt::Display;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use samusic::analysis::{self, GuaranteeCurve, MeasurementBound, Regime, SnapshotParams};
use samusic::bench::{self, SweepConfig};
use samusic::recovery::{self, Algorithm, GreedyRule, PartialSupportMethod, RecoveryInputs};
use samusic::sensing::{self, Ensemble, SensingSpec};
use samusic::signal::{NoiseKind, NoiseSpec, ProblemInstance, SignalModel, SignalSpec, SupportChoice};
use samusic::subspace;
use samusic::{Matrix, SupportSet};

type Rows = Vec<Vec<Complex64>>;

fn err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Rows) -> PyResult<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(err("ragged rows"));
    }
    Matrix::from_complex(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j])).map_err(err)
}

fn to_rows(m: &DMatrix<Complex64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn to_support(indices: Vec<usize>, n: usize) -> PyResult<SupportSet> {
    SupportSet::new(indices, n).map_err(err)
}

fn parse<T: std::str::FromStr>(text: &str) -> PyResult<T>
where
    T::Err: Display,
{
    text.parse().map_err(err)
}

/// Recovered support and diagnostics of one recovery run.
#[pyclass(get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct RecoveryReport {
    support: Vec<usize>,
    r_used: usize,
    method: String,
    scores: Vec<f64>,
    partial_support: Vec<usize>,
}

#[pymethods]
impl RecoveryReport {
    fn __repr__(&self) -> String {
        format!(
            "RecoveryReport(method={:?}, support={:?}, r_used={})",
            self.method, self.support, self.r_used
        )
    }
}

impl From<recovery::RecoveryReport> for RecoveryReport {
    fn from(r: recovery::RecoveryReport) -> Self {
        Self {
            support: r.support.indices().to_vec(),
            r_used: r.r_used,
            method: r.method,
            scores: r.scores,
            partial_support: r.partial_support.indices().to_vec(),
        }
    }
}

/// Estimated signal subspace of a snapshot matrix.
#[pyclass(get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct SubspaceEstimate {
    r: usize,
    /// m × r orthonormal basis.
    basis: Rows,
    eigenvalues: Vec<f64>,
    tau: f64,
    rank_deficient: bool,
}

#[pymethods]
impl SubspaceEstimate {
    fn __repr__(&self) -> String {
        format!("SubspaceEstimate(r={}, tau={})", self.r, self.tau)
    }
}

/// Weak-1 restricted isometry constants of a matrix at a support.
#[pyclass(get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct Weak1Ric {
    delta: f64,
    alpha: f64,
    beta: f64,
    argmax_j: usize,
}

#[pymethods]
impl Weak1Ric {
    fn __repr__(&self) -> String {
        format!(
            "Weak1Ric(delta={}, alpha={}, beta={}, argmax_j={})",
            self.delta, self.alpha, self.beta, self.argmax_j
        )
    }
}

/// A seeded recovery problem `Y = A X0 + W`.
#[pyclass(get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct Instance {
    a: Rows,
    x0: Rows,
    w: Rows,
    y: Rows,
    support: Vec<usize>,
    sigma_w: f64,
}

#[pymethods]
impl Instance {
    #[staticmethod]
    #[pyo3(signature = (ensemble, m, n, s, snapshots, seed, rank=None, kappa=None, snr_db=None))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        ensemble: &str,
        m: usize,
        n: usize,
        s: usize,
        snapshots: usize,
        seed: u64,
        rank: Option<usize>,
        kappa: Option<f64>,
        snr_db: Option<f64>,
    ) -> PyResult<Self> {
        let ensemble: Ensemble = parse(ensemble)?;
        let model = match (rank, kappa) {
            (Some(r), None) => SignalModel::equal_singular_values(r, 1.0),
            (None, Some(k)) => SignalModel::Conditioned { kappa: k },
            (None, None) => SignalModel::equal_singular_values(s.min(snapshots), 1.0),
            (Some(_), Some(_)) => return Err(err("give at most one of rank and kappa")),
        };
        let sensing = SensingSpec {
            ensemble,
            m,
            n,
            normalize_columns: true,
            seed,
        };
        let signal = SignalSpec {
            n,
            s,
            snapshots,
            support: SupportChoice::Random,
            model,
            field: ensemble.field(),
            seed: seed.wrapping_add(1),
        };
        let noise = NoiseSpec {
            kind: snr_db.map_or(NoiseKind::None, NoiseKind::SnrDb),
            seed: seed.wrapping_add(2),
        };
        let inst = ProblemInstance::generate(&sensing, &signal, &noise).map_err(err)?;
        Ok(Self {
            a: to_rows(inst.a.data()),
            x0: to_rows(inst.x0.data()),
            w: to_rows(inst.w.data()),
            y: to_rows(inst.y.data()),
            support: inst.support.indices().to_vec(),
            sigma_w: inst.meta.sigma_w,
        })
    }

    fn __repr__(&self) -> String {
        let m = self.a.len();
        let n = self.a.first().map_or(0, Vec::len);
        format!("Instance(m={m}, n={n}, s={}, N={})", self.support.len(), self.y.first().map_or(0, Vec::len))
    }
}

/// Sensing matrix from a named ensemble.
#[pyfunction]
#[pyo3(signature = (ensemble, m, n, seed=0, normalize=true))]
fn sensing_matrix(ensemble: &str, m: usize, n: usize, seed: u64, normalize: bool) -> PyResult<Rows> {
    let spec = SensingSpec {
        ensemble: parse(ensemble)?,
        m,
        n,
        normalize_columns: normalize,
        seed,
    };
    Ok(to_rows(sensing::generate(&spec).map_err(err)?.data()))
}

#[pyfunction]
fn coherence(a: Rows) -> PyResult<f64> {
    sensing::coherence(&to_matrix(a)?).map_err(err)
}

#[pyfunction]
fn welch_bound(m: usize, n: usize) -> PyResult<f64> {
    sensing::welch_bound(m, n).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (y, tau=1e-9))]
fn estimate_subspace(y: Rows, tau: f64) -> PyResult<SubspaceEstimate> {
    let est = subspace::estimate_signal_subspace(&to_matrix(y)?, tau).map_err(err)?;
    Ok(SubspaceEstimate {
        r: est.r,
        basis: to_rows(est.basis.columns()),
        eigenvalues: est.eigenvalues_biased,
        tau: est.tau,
        rank_deficient: est.rank_deficient_flag,
    })
}

/// Runs a named algorithm (`music`, `sa-music-ssomsp`, `m-omp`, ...).
#[pyfunction]
#[pyo3(signature = (algorithm, y, a, s=None, tau=1e-9, eta=0.0, oracle=None))]
fn recover(
    algorithm: &str,
    y: Rows,
    a: Rows,
    s: Option<usize>,
    tau: f64,
    eta: f64,
    oracle: Option<Vec<usize>>,
) -> PyResult<RecoveryReport> {
    let algo: Algorithm = parse(algorithm)?;
    let (y, a) = (to_matrix(y)?, to_matrix(a)?);
    let oracle = oracle.map(|j| to_support(j, a.cols())).transpose()?;
    let inputs = RecoveryInputs {
        y: &y,
        a: &a,
        s,
        tau,
        eta,
        oracle: oracle.as_ref(),
    };
    Ok(recovery::run_algorithm(algo, &inputs, None).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (y, a, s, tau=1e-9))]
fn music(y: Rows, a: Rows, s: usize, tau: f64) -> PyResult<RecoveryReport> {
    let est = subspace::estimate_signal_subspace(&to_matrix(y)?, tau).map_err(err)?;
    Ok(recovery::music(&est.basis, &to_matrix(a)?, s).map_err(err)?.into())
}

/// SA-MUSIC with partial support `method` in `ssomp`, `ssomsp`, `oracle`, `exhaustive`.
#[pyfunction]
#[pyo3(signature = (y, a, s, tau=1e-9, method="ssomsp", oracle=None))]
fn sa_music(
    y: Rows,
    a: Rows,
    s: usize,
    tau: f64,
    method: &str,
    oracle: Option<Vec<usize>>,
) -> PyResult<RecoveryReport> {
    let a = to_matrix(a)?;
    let method = match (method.replace('-', "_").as_str(), oracle) {
        ("ssomp" | "ss_omp", _) => PartialSupportMethod::SsOmp,
        ("ssomsp" | "ss_omsp", _) => PartialSupportMethod::SsOmsp,
        ("exhaustive", _) => PartialSupportMethod::Exhaustive,
        ("oracle", Some(j)) => PartialSupportMethod::Oracle(to_support(j, a.cols())?),
        ("oracle", None) => return Err(err("the oracle method needs `oracle`")),
        (other, _) => return Err(err(format!("unknown partial support method '{other}'"))),
    };
    Ok(recovery::sa_music(&to_matrix(y)?, &a, s, tau, &method).map_err(err)?.into())
}

/// SA-MUSIC without knowledge of s; `rule` is `ss-omp` or `ss-omsp`.
#[pyfunction]
#[pyo3(signature = (y, a, tau=1e-9, eta=0.0, rule="ss-omsp"))]
fn sa_music_unknown_s(y: Rows, a: Rows, tau: f64, eta: f64, rule: &str) -> PyResult<RecoveryReport> {
    let rule = match rule {
        "ss-omp" | "ssomp" => GreedyRule::SsOmp,
        "ss-omsp" | "ssomsp" => GreedyRule::SsOmsp,
        other => return Err(err(format!("unknown greedy rule '{other}'"))),
    };
    let report = recovery::sa_music_unknown_s(&to_matrix(y)?, &to_matrix(a)?, tau, eta, rule);
    Ok(report.map_err(err)?.into())
}

#[pyfunction]
fn weak1_ric(a: Rows, support: Vec<usize>) -> PyResult<Weak1Ric> {
    let a = to_matrix(a)?;
    let j = to_support(support, a.cols())?;
    let ric = analysis::weak1_ric(&a, &j).map_err(err)?;
    Ok(Weak1Ric {
        delta: ric.delta,
        alpha: ric.alpha,
        beta: ric.beta,
        argmax_j: ric.argmax_j,
    })
}

/// Largest admissible subspace error η at RIC `delta`, or `None` when infeasible.
///
/// `regime` uses the CLI syntax, e.g. `music_full_rank` or `sa_music_ssomsp:8,4`.
#[pyfunction]
fn eta_bound(regime: &str, delta: f64) -> PyResult<Option<f64>> {
    analysis::eta_bound(&parse::<Regime>(regime)?, delta).map_err(err)
}

/// Trade-off curve as CSV text with header `delta,eta_max,feasible`.
#[pyfunction]
#[pyo3(signature = (regime, points=101))]
fn guarantee_curve(regime: &str, points: usize) -> PyResult<String> {
    Ok(GuaranteeCurve::sample(parse(regime)?, points).map_err(err)?.to_csv())
}

#[pyfunction]
#[pyo3(signature = (bound, s, n, delta, epsilon, k=1.0))]
fn min_measurements(bound: &str, s: usize, n: usize, delta: f64, epsilon: f64, k: f64) -> PyResult<usize> {
    let bound = MeasurementBound::parse(bound, k).map_err(err)?;
    analysis::min_measurements(&bound, s, n, delta, epsilon).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, s, epsilon, eta, nu, theta, tau, noise_ratio=0.0))]
#[allow(clippy::too_many_arguments)]
fn min_snapshots(
    m: usize,
    s: usize,
    epsilon: f64,
    eta: f64,
    nu: f64,
    theta: f64,
    tau: f64,
    noise_ratio: f64,
) -> PyResult<usize> {
    let p = SnapshotParams {
        m,
        s,
        epsilon,
        eta,
        nu,
        theta,
        tau,
        noise_ratio,
    };
    analysis::min_snapshots(&p).map_err(err)
}

#[pyfunction]
fn rho_lower_bound(s: usize, r: usize) -> PyResult<f64> {
    analysis::rho_lower_bound(s, r).map_err(err)
}

/// Runs a sweep from a JSON config and returns the summary CSV text.
#[pyfunction]
#[pyo3(signature = (config_json, jobs=None))]
fn run_sweep(py: Python<'_>, config_json: &str, jobs: Option<usize>) -> PyResult<String> {
    let config: SweepConfig = serde_json::from_str(config_json).map_err(err)?;
    let out = py.detach(|| bench::run_sweep(&config, jobs)).map_err(err)?;
    bench::summary_csv_string(&out.summary).map_err(err)
}

#[pymodule]
fn pysamusic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<SubspaceEstimate>()?;
    m.add_class::<RecoveryReport>()?;
    m.add_class::<Weak1Ric>()?;
    m.add_function(wrap_pyfunction!(sensing_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(coherence, m)?)?;
    m.add_function(wrap_pyfunction!(welch_bound, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_subspace, m)?)?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add_function(wrap_pyfunction!(music, m)?)?;
    m.add_function(wrap_pyfunction!(sa_music, m)?)?;
    m.add_function(wrap_pyfunction!(sa_music_unknown_s, m)?)?;
    m.add_function(wrap_pyfunction!(weak1_ric, m)?)?;
    m.add_function(wrap_pyfunction!(eta_bound, m)?)?;
    m.add_function(wrap_pyfunction!(guarantee_curve, m)?)?;
    m.add_function(wrap_pyfunction!(min_measurements, m)?)?;
    m.add_function(wrap_pyfunction!(min_snapshots, m)?)?;
    m.add_function(wrap_pyfunction!(rho_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
