//! Seeded Monte-Carlo sweeps and runtime scaling.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{support_match, SupportSet};
use crate::recovery::{run_algorithm, Algorithm, RecoveryInputs};
use crate::rng::{derive_seed, label_hash};
use crate::sensing::{Ensemble, SensingSpec};
use crate::signal::{NoiseKind, NoiseSpec, ProblemInstance, SignalModel, SignalSpec, SupportChoice};
use crate::subspace::estimate_signal_subspace;

/// z-value of a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub s: usize,
    #[serde(rename = "N")]
    pub snapshots: usize,
    pub m_values: Vec<usize>,
    /// Ranks of the nonzero block, each with equal unit singular values.
    #[serde(default)]
    pub ranks: Vec<usize>,
    /// Condition numbers of a full-row-rank block with geometric singular values.
    #[serde(default)]
    pub kappas: Vec<f64>,
    #[serde(default)]
    pub snr_db: Option<f64>,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub tau: f64,
    /// Stopping threshold for the unknown-sparsity variant.
    #[serde(default)]
    pub eta: f64,
    pub base_seed: u64,
    pub ensemble: Ensemble,
    #[serde(default = "default_true")]
    pub normalize_columns: bool,
    /// When false, all times are reported as zero so the outputs are byte-reproducible.
    #[serde(default = "default_true")]
    pub measure_time: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        if self.s == 0 || self.s >= self.n {
            return Err(invalid(format!("need 1 <= s < n, got s = {}, n = {}", self.s, self.n)));
        }
        if self.snapshots == 0 {
            return Err(invalid("N must be >= 1"));
        }
        if self.m_values.is_empty() {
            return Err(invalid("m_values is empty"));
        }
        if let Some(&m) = self.m_values.iter().find(|&&m| m <= self.s || m > self.n) {
            return Err(invalid(format!("m = {m} outside [s+1, n] = [{}, {}]", self.s + 1, self.n)));
        }
        if self.ranks.is_empty() == self.kappas.is_empty() {
            return Err(invalid("give exactly one of ranks or kappas"));
        }
        if let Some(&r) = self.ranks.iter().find(|&&r| r == 0 || r > self.s.min(self.snapshots)) {
            return Err(invalid(format!("rank {r} outside [1, min(s, N)]")));
        }
        if let Some(&k) = self.kappas.iter().find(|&&k| !(k >= 1.0)) {
            return Err(invalid(format!("kappa {k} must be >= 1")));
        }
        if !self.kappas.is_empty() && self.snapshots < self.s {
            return Err(invalid("kappa sweeps need N >= s"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("no algorithms given"));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(invalid(format!("tau = {} must lie in (0, 1)", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(invalid(format!("eta = {} must lie in [0, 1]", self.eta)));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(invalid("snr_db must be finite"));
            }
        }
        Ok(())
    }

    fn cells(&self) -> Vec<Cell> {
        let params: Vec<CellParam> = if self.ranks.is_empty() {
            self.kappas.iter().map(|&k| CellParam::Kappa(k)).collect()
        } else {
            self.ranks.iter().map(|&r| CellParam::Rank(r)).collect()
        };
        params
            .iter()
            .flat_map(|&p| self.m_values.iter().map(move |&m| Cell { m, param: p }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CellParam {
    Rank(usize),
    Kappa(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    m: usize,
    param: CellParam,
}

impl Cell {
    fn label(&self) -> String {
        match self.param {
            CellParam::Rank(r) => format!("m={};rank={r}", self.m),
            CellParam::Kappa(k) => format!("m={};kappa={k:?}", self.m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    #[serde(rename = "N")]
    pub snapshots: usize,
    pub rank: Option<usize>,
    pub kappa: Option<f64>,
    pub snr_db: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    #[serde(rename = "J")]
    pub recovered: Option<SupportSet>,
    pub exact_match: bool,
    pub wall_time: f64,
    pub r_estimated: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub m: usize,
    pub rank: Option<usize>,
    pub kappa: Option<f64>,
    pub snr_db: Option<f64>,
    pub n: usize,
    pub s: usize,
    #[serde(rename = "N")]
    pub snapshots: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub median_ms: f64,
    /// Fraction of trials whose estimated r equals s.
    pub r_equals_s: f64,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl SweepOutput {
    pub fn row(&self, algorithm: Algorithm, m: usize) -> impl Iterator<Item = &SummaryRow> {
        self.summary
            .iter()
            .filter(move |r| r.algorithm == algorithm && r.m == m)
    }
}

/// Wilson score interval for `k` successes in `n` trials at 95%.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Seed of one trial, a function of the base seed, the cell and the trial index only.
fn trial_seed(base: u64, cell: &Cell, trial: usize) -> u64 {
    derive_seed(base, &[label_hash(&cell.label()), trial as u64])
}

fn build_instance(config: &SweepConfig, cell: &Cell, seed: u64) -> Result<ProblemInstance> {
    let sensing = SensingSpec {
        ensemble: config.ensemble,
        m: cell.m,
        n: config.n,
        normalize_columns: config.normalize_columns,
        seed: derive_seed(seed, &[1]),
    };
    let model = match cell.param {
        CellParam::Rank(r) => SignalModel::equal_singular_values(r, 1.0),
        CellParam::Kappa(k) => SignalModel::Conditioned { kappa: k },
    };
    let signal = SignalSpec {
        n: config.n,
        s: config.s,
        snapshots: config.snapshots,
        support: SupportChoice::Random,
        model,
        field: config.ensemble.field(),
        seed: derive_seed(seed, &[2]),
    };
    let noise = NoiseSpec {
        kind: config.snr_db.map_or(NoiseKind::None, NoiseKind::SnrDb),
        seed: derive_seed(seed, &[3]),
    };
    ProblemInstance::generate(&sensing, &signal, &noise)
}

/// Regenerates the problem instance behind a trial record of `config`.
pub fn trial_instance(config: &SweepConfig, record: &TrialRecord) -> Result<ProblemInstance> {
    let param = match (record.rank, record.kappa) {
        (Some(r), _) => CellParam::Rank(r),
        (None, Some(k)) => CellParam::Kappa(k),
        (None, None) => return Err(invalid("trial record has neither rank nor kappa")),
    };
    let cell = Cell { m: record.m, param };
    build_instance(config, &cell, trial_seed(config.base_seed, &cell, record.trial))
}

fn run_trial(config: &SweepConfig, cell: &Cell, trial: usize) -> Vec<TrialRecord> {
    let seed = trial_seed(config.base_seed, cell, trial);
    let (rank, kappa) = match cell.param {
        CellParam::Rank(r) => (Some(r), None),
        CellParam::Kappa(k) => (None, Some(k)),
    };
    let record = |algorithm: Algorithm| TrialRecord {
        m: cell.m,
        n: config.n,
        s: config.s,
        snapshots: config.snapshots,
        rank,
        kappa,
        snr_db: config.snr_db,
        trial,
        seed,
        algorithm,
        recovered: None,
        exact_match: false,
        wall_time: 0.0,
        r_estimated: None,
        error: None,
    };

    let instance = match build_instance(config, cell, seed) {
        Ok(i) => i,
        Err(e) => {
            return config
                .algorithms
                .iter()
                .map(|&a| TrialRecord {
                    error: Some(e.to_string()),
                    ..record(a)
                })
                .collect();
        }
    };

    let clock = Instant::now();
    let estimate = estimate_signal_subspace(&instance.y, config.tau);
    let estimate_time = clock.elapsed().as_secs_f64();
    let r_estimated = estimate.as_ref().ok().map(|e| e.r);

    let inputs = RecoveryInputs {
        y: &instance.y,
        a: &instance.a,
        s: Some(config.s),
        tau: config.tau,
        eta: config.eta,
        oracle: Some(&instance.support),
    };
    config
        .algorithms
        .iter()
        .map(|&algo| {
            let mut rec = record(algo);
            rec.r_estimated = r_estimated;
            let clock = Instant::now();
            let result = if algo.uses_subspace() {
                match &estimate {
                    Ok(est) => run_algorithm(algo, &inputs, Some(est)),
                    Err(e) => Err(crate::Error::Degenerate(format!("subspace estimation: {e}"))),
                }
            } else {
                run_algorithm(algo, &inputs, None)
            };
            let mut elapsed = clock.elapsed().as_secs_f64();
            if algo.uses_subspace() {
                elapsed += estimate_time;
            }
            if config.measure_time {
                rec.wall_time = elapsed;
            }
            match result {
                Ok(report) => {
                    rec.exact_match = support_match(&report.support, &instance.support).unwrap_or(false);
                    rec.recovered = Some(report.support);
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect()
}

fn summarize(config: &SweepConfig, cells: &[Cell], records: &[TrialRecord]) -> Vec<SummaryRow> {
    let per_cell = config.trials * config.algorithms.len();
    let mut rows = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let chunk = &records[ci * per_cell..(ci + 1) * per_cell];
        for &algo in &config.algorithms {
            let recs: Vec<&TrialRecord> = chunk.iter().filter(|r| r.algorithm == algo).collect();
            let trials = recs.len();
            let successes = recs.iter().filter(|r| r.exact_match).count();
            let (ci_lo, ci_hi) = wilson_interval(successes, trials);
            let mut times: Vec<f64> = recs.iter().map(|r| r.wall_time * 1e3).collect();
            let r_hits = recs.iter().filter(|r| r.r_estimated == Some(config.s)).count();
            let first = recs[0];
            rows.push(SummaryRow {
                algorithm: algo,
                m: cell.m,
                rank: first.rank,
                kappa: first.kappa,
                snr_db: config.snr_db,
                n: config.n,
                s: config.s,
                snapshots: config.snapshots,
                trials,
                successes,
                success_rate: successes as f64 / trials as f64,
                ci_lo,
                ci_hi,
                median_ms: median(&mut times),
                r_equals_s: r_hits as f64 / trials as f64,
                failures: recs.iter().filter(|r| r.error.is_some()).count(),
            });
        }
    }
    rows
}

/// Runs every (cell, trial) pair, in parallel on `jobs` threads when given.
///
/// Records come out in (cell, trial, algorithm) order regardless of scheduling.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<SweepOutput> {
    config.validate()?;
    let cells = config.cells();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.trials).map(move |t| (c, t)))
        .collect();
    let work = || -> Vec<TrialRecord> {
        tasks
            .par_iter()
            .flat_map_iter(|&(c, t)| run_trial(config, &cells[c], t))
            .collect()
    };
    let records = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let summary = summarize(config, &cells, &records);
    Ok(SweepOutput { records, summary })
}

/// Writes one CSV row per summary row.
pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| invalid(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn summary_csv_string(rows: &[SummaryRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_summary_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Writes one JSON object per line.
pub fn write_trials_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes `results.csv` to `csv_path` and `trials.jsonl` next to it.
pub fn write_sweep(output: &SweepOutput, csv_path: &Path) -> Result<()> {
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_summary_csv(&output.summary, std::fs::File::create(csv_path)?)?;
    let jsonl = csv_path.with_file_name("trials.jsonl");
    write_trials_jsonl(&output.records, std::io::BufWriter::new(std::fs::File::create(jsonl)?))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub scale: usize,
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub rank: usize,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub median_ms: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeConfig {
    pub scales: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub snapshots: usize,
    pub snr_db: f64,
    pub tau: f64,
    pub base_seed: u64,
}

impl RuntimeConfig {
    pub fn new(scales: Vec<usize>, trials: usize) -> Self {
        Self {
            scales,
            trials,
            algorithms: vec![
                Algorithm::Music,
                Algorithm::SaMusicSsomp,
                Algorithm::SaMusicSsomsp,
                Algorithm::MOmp,
            ],
            snapshots: 256,
            snr_db: 30.0,
            tau: 0.01,
            base_seed: 0,
        }
    }
}

/// Median runtimes at n = 64f, s = n/16, m = 2s, rank ⌈7s/8⌉ for each scale f.
///
/// Trials run one after another so the timings do not compete for cores.
pub fn runtime_scaling(config: &RuntimeConfig) -> Result<Vec<RuntimeRow>> {
    if config.scales.is_empty() || config.scales.contains(&0) {
        return Err(invalid("scale factors must be >= 1"));
    }
    if config.trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    let mut rows = Vec::new();
    for &scale in &config.scales {
        let n = 64 * scale;
        let s = n / 16;
        let m = 2 * s;
        let rank = (7 * s).div_ceil(8);
        let sweep = SweepConfig {
            n,
            s,
            snapshots: config.snapshots,
            m_values: vec![m],
            ranks: vec![rank],
            kappas: Vec::new(),
            snr_db: Some(config.snr_db),
            algorithms: config.algorithms.clone(),
            trials: config.trials,
            tau: config.tau,
            eta: 0.0,
            base_seed: derive_seed(config.base_seed, &[scale as u64]),
            ensemble: Ensemble::FourierUniformRows,
            normalize_columns: true,
            measure_time: true,
        };
        let out = run_sweep(&sweep, Some(1))?;
        for row in out.summary {
            rows.push(RuntimeRow {
                scale,
                n,
                s,
                m,
                rank,
                algorithm: row.algorithm,
                trials: row.trials,
                median_ms: row.median_ms,
                success_rate: row.success_rate,
            });
        }
    }
    Ok(rows)
}

pub fn runtime_csv_string(rows: &[RuntimeRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| invalid(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
