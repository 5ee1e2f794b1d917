use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use samusic::analysis::{
    min_measurements, min_snapshots, oversampling_factor_cond1, oversampling_factor_cond2,
    weak1_ric, GuaranteeCurve, MeasurementBound, Regime, SnapshotParams,
};
use samusic::bench::{run_sweep, runtime_csv_string, runtime_scaling, write_sweep, RuntimeConfig, SweepConfig};
use samusic::linalg::cmx;
use samusic::recovery::{run_algorithm, Algorithm, GreedyRule, RecoveryInputs, sa_music_unknown_s};
use samusic::sensing::{self, Ensemble, SensingSpec};
use samusic::signal::{NoiseKind, NoiseSpec, ProblemInstance, SignalModel, SignalSpec, SupportChoice};
use samusic::subspace::estimate_signal_subspace;
use samusic::SupportSet;

#[derive(Parser)]
#[command(name = "samusic", version, about = "Joint sparse recovery with subspace-augmented MUSIC")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sensing matrix.
    GenMatrix(GenMatrix),
    /// Draw a complete problem instance into a directory.
    GenInstance(GenInstance),
    /// Estimate the signal subspace of a snapshot matrix.
    Subspace(SubspaceCmd),
    /// Recover the support of an instance.
    Recover(Recover),
    /// Weak-1 restricted isometry constants of a matrix at a support.
    Rip(Rip),
    /// Sample a δ–η guarantee curve.
    Curve(Curve),
    /// Number of measurements required by a closed-form bound.
    Complexity(Complexity),
    /// Number of snapshots required for subspace estimation.
    Snapshots(Snapshots),
    /// Run a Monte-Carlo sweep.
    Sweep(Sweep),
    /// Median runtimes over problem scales.
    Runtime(Runtime),
}

#[derive(Args)]
struct GenMatrix {
    #[arg(long)]
    ensemble: Ensemble,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep the raw column norms.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenInstance {
    #[arg(long)]
    ensemble: Ensemble,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long = "snapshots", short = 'N')]
    snapshots: usize,
    /// Rank of the nonzero block (equal singular values).
    #[arg(long, conflicts_with = "kappa")]
    rank: Option<usize>,
    /// Condition number of a full-row-rank block.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, conflicts_with = "sigma_w")]
    snr_db: Option<f64>,
    #[arg(long)]
    sigma_w: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SubspaceCmd {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    tau: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Recover {
    #[arg(long)]
    algo: Algorithm,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Sparsity; defaults to the size of the instance support.
    #[arg(long)]
    s: Option<usize>,
    /// Greedy rule of the unknown-sparsity variant.
    #[arg(long, default_value = "ss-omsp")]
    rule: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Rip {
    #[arg(long)]
    matrix: PathBuf,
    /// 1-based comma-separated indices.
    #[arg(long)]
    support: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Curve {
    /// music_full_rank, sa_music_oracle, ssomsp_oracle, sa_music_ssomp:S,R,
    /// sa_music_ssomsp:S,R or mbp:N_COLS,SNAPSHOTS,EPSILON.
    #[arg(long)]
    regime: Regime,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Complexity {
    /// gaussian-weak1-cond1, gaussian-weak1-cond2, gaussian-asymmetric-cond1,
    /// gaussian-asymmetric-cond2, gaussian-uniform, fourier, untf or untf-uniform.
    #[arg(long)]
    ensemble: String,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    n: usize,
    /// δ, or γ for the asymmetric bounds.
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    epsilon: f64,
    /// Coherence constant K of the tight-frame bounds.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Snapshots {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_ratio: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Sweep {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct Runtime {
    /// Comma-separated scale factors.
    #[arg(long, value_delimiter = ',')]
    scales: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenMatrix(c) => {
            let spec = SensingSpec {
                ensemble: c.ensemble,
                m: c.m,
                n: c.n,
                normalize_columns: !c.no_normalize,
                seed: c.seed,
            };
            cmx::write(&c.out, &sensing::generate(&spec)?)?;
        }
        Command::GenInstance(c) => {
            let model = match (c.rank, c.kappa) {
                (Some(r), None) => SignalModel::equal_singular_values(r, 1.0),
                (None, Some(k)) => SignalModel::Conditioned { kappa: k },
                (None, None) => SignalModel::equal_singular_values(c.s.min(c.snapshots), 1.0),
                (Some(_), Some(_)) => bail!("give at most one of --rank and --kappa"),
            };
            let sensing = SensingSpec {
                ensemble: c.ensemble,
                m: c.m,
                n: c.n,
                normalize_columns: true,
                seed: c.seed,
            };
            let signal = SignalSpec {
                n: c.n,
                s: c.s,
                snapshots: c.snapshots,
                support: SupportChoice::Random,
                model,
                field: c.ensemble.field(),
                seed: c.seed.wrapping_add(1),
            };
            let kind = match (c.snr_db, c.sigma_w) {
                (Some(db), _) => NoiseKind::SnrDb(db),
                (None, Some(sw)) => NoiseKind::SigmaW(sw),
                (None, None) => NoiseKind::None,
            };
            let noise = NoiseSpec {
                kind,
                seed: c.seed.wrapping_add(2),
            };
            ProblemInstance::generate(&sensing, &signal, &noise)?.save(&c.out)?;
        }
        Command::Subspace(c) => {
            let y = cmx::read(&c.input)?;
            let est = estimate_signal_subspace(&y, c.tau)?;
            cmx::write(&c.out, &est.basis.to_matrix()?)?;
            write_json(&c.out.with_extension("json"), &serde_json::to_value(&est)?)?;
        }
        Command::Recover(c) => {
            let inst = ProblemInstance::load(&c.instance)?;
            let s = c.s.unwrap_or(inst.support.len());
            let report = if c.algo == Algorithm::SaMusicUnknown {
                let rule = match c.rule.as_str() {
                    "ss-omp" => GreedyRule::SsOmp,
                    "ss-omsp" => GreedyRule::SsOmsp,
                    other => bail!("unknown greedy rule '{other}'"),
                };
                sa_music_unknown_s(&inst.y, &inst.a, c.tau, c.eta, rule)?
            } else {
                let inputs = RecoveryInputs {
                    y: &inst.y,
                    a: &inst.a,
                    s: Some(s),
                    tau: c.tau,
                    eta: c.eta,
                    oracle: Some(&inst.support),
                };
                run_algorithm(c.algo, &inputs, None)?
            };
            let exact = report.support == inst.support;
            let mut value = serde_json::to_value(&report)?;
            value["exact_match"] = json!(exact);
            write_json(&c.out, &value)?;
            println!("{} -> {} (exact: {exact})", c.algo, report.support);
        }
        Command::Rip(c) => {
            let a = cmx::read(&c.matrix)?;
            let j = SupportSet::parse(&c.support, a.cols())?;
            let ric = weak1_ric(&a, &j)?;
            write_json(&c.out, &serde_json::to_value(&ric)?)?;
        }
        Command::Curve(c) => {
            let curve = GuaranteeCurve::sample(c.regime, c.points)?;
            std::fs::write(&c.out, curve.to_csv())?;
        }
        Command::Complexity(c) => {
            let bound = MeasurementBound::parse(&c.ensemble, c.k)?;
            let m = min_measurements(&bound, c.s, c.n, c.delta, c.epsilon)?;
            let mut value = json!({
                "bound": bound.name(),
                "s": c.s,
                "n": c.n,
                "delta": c.delta,
                "epsilon": c.epsilon,
                "m": m,
                "oversampling": m as f64 / c.s as f64,
            });
            if matches!(bound, MeasurementBound::GaussianWeak1Cond1 | MeasurementBound::GaussianWeak1Cond2) {
                value["asymptotic_factor_cond1"] = json!(oversampling_factor_cond1(c.delta));
                value["asymptotic_factor_cond2"] = json!(oversampling_factor_cond2(c.delta));
            }
            write_json(&c.out, &value)?;
        }
        Command::Snapshots(c) => {
            let p = SnapshotParams {
                m: c.m,
                s: c.s,
                epsilon: c.epsilon,
                eta: c.eta,
                nu: c.nu,
                theta: c.theta,
                tau: c.tau,
                noise_ratio: c.noise_ratio,
            };
            let big_n = min_snapshots(&p)?;
            let mut value = serde_json::to_value(p)?;
            value["N"] = json!(big_n);
            write_json(&c.out, &value)?;
        }
        Command::Sweep(c) => {
            let text = std::fs::read_to_string(&c.config)
                .with_context(|| format!("reading {}", c.config.display()))?;
            let config: SweepConfig = serde_json::from_str(&text).context("parsing sweep config")?;
            let output = run_sweep(&config, c.jobs)?;
            write_sweep(&output, &c.out)?;
            let failures = output.records.iter().filter(|r| r.error.is_some()).count();
            eprintln!(
                "{} trials, {} summary rows, {failures} failed calls",
                output.records.len(),
                output.summary.len()
            );
        }
        Command::Runtime(c) => {
            let mut config = RuntimeConfig::new(c.scales, c.trials);
            config.base_seed = c.seed;
            let rows = runtime_scaling(&config)?;
            std::fs::write(&c.out, runtime_csv_string(&rows)?)?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
