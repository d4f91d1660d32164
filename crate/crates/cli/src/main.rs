//! `steer`: runs steering scenarios and writes JSON-lines or CSV reports.
//!
//! Exit status is 0 whenever a run completes, whatever the physical verdict;
//! 2 for usage errors; 1 for internal failures (and for a failing selftest).

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use steering::criteria::{
    genuine_tripartite_cv, genuine_tripartite_qubit, ghz_spin_three_obs, ghz_spin_two_obs,
    CvEstimator, QubitEstimator, ScanConfig, StateRef,
};
use steering::cv::{cv_ghz, s_j_fixed_combo, s_j_optimal_gains, steering_product_cv, HomodynePlan};
use steering::qubit::{ghz, DetectionModel, NoClickPolicy};
use steering::report::{Record, RunReport, CSV_COLUMNS};
use steering::scenarios::{
    eavesdrop_sweep, parse_grid, run_sweep, secret_sharing_demo, simulate_shots, Backend,
    ShotCriterion, SweepConfig, ThresholdScenario, THRESHOLD_TOL,
};
use steering::selftest::run_selftest;
use steering::SteeringError;

#[derive(Parser, Debug)]
#[command(name = "steer", version, about = "Multipartite EPR-steering scenarios")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Seed for sampled quantities.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit JSON lines (default, except for `sweep`).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV with a header row.
    #[arg(long, global = true)]
    csv: bool,
    /// Record wall-clock time in the report header (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spin criteria on a (depolarized) GHZ state with lossy detection.
    GhzQubit(GhzQubitArgs),
    /// Quadrature criteria on the three-mode CV-GHZ state.
    GhzCv(GhzCvArgs),
    /// Steering of mode 1 by the legitimate pair and by a beamsplitter tap.
    Eavesdrop(EavesdropArgs),
    /// Bisection for the parameter value at which a verdict flips.
    Threshold(ThresholdArgs),
    /// One-parameter sweep described by a JSON file.
    Sweep(SweepArgs),
    /// Collective-steering check of a GHZ resource for secret sharing.
    SecretSharing(SecretSharingArgs),
    /// Finite-shot estimate of a criterion.
    Shots(ShotsArgs),
    /// Runs the golden-value suite.
    Selftest,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum QubitCriterion {
    TwoObs,
    ThreeObs,
    Result4,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum CvCriterion {
    Eq2,
    Eq6,
    Result4,
}

#[derive(Args, Debug)]
struct GhzQubitArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Weight of the GHZ state in the mixture with white noise.
    #[arg(long, default_value_t = 1.0)]
    noise_p: f64,
    /// Detection efficiency of the steering group.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// `marginal-mean` or `constant:<g>`.
    #[arg(long, default_value = "marginal-mean", value_parser = parse_policy)]
    policy: NoClickPolicy,
    #[arg(long, value_enum)]
    criterion: QubitCriterion,
    /// Steered site (defaults to the last).
    #[arg(long)]
    target: Option<usize>,
}

#[derive(Args, Debug)]
struct GhzCvArgs {
    /// Squeezing parameter.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 1)]
    target: usize,
    #[arg(long, value_enum)]
    criterion: CvCriterion,
}

#[derive(Args, Debug)]
struct EavesdropArgs {
    #[arg(long, default_value_t = 1.5)]
    r: f64,
    /// Tap transmissivities as `start:stop:step`.
    #[arg(long, default_value = "0:1:0.1", value_parser = parse_eta_grid)]
    eta_grid: Grid,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    /// `three-obs-eta`, `two-obs-eta` or `cv-result4-r`.
    #[arg(long, value_parser = parse_scenario)]
    scenario: ThresholdScenario,
    #[arg(long, default_value = "marginal-mean", value_parser = parse_policy)]
    policy: NoClickPolicy,
    /// Bracket width at which bisection stops.
    #[arg(long, default_value_t = THRESHOLD_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args, Debug)]
struct SecretSharingArgs {
    #[arg(long, value_parser = parse_backend)]
    backend: Backend,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Squeezing for the CV backend.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
}

#[derive(Args, Debug)]
struct ShotsArgs {
    #[arg(long, value_parser = parse_backend)]
    backend: Backend,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Qubit backend: GHZ weight against white noise.
    #[arg(long, default_value_t = 1.0)]
    noise_p: f64,
    /// CV backend: squeezing.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Steered site or mode (defaults: site 3, mode 1).
    #[arg(long)]
    target: Option<usize>,
}

fn parse_policy(s: &str) -> Result<NoClickPolicy, String> {
    s.parse().map_err(|e: SteeringError| e.to_string())
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_eta_grid(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

fn parse_scenario(s: &str) -> Result<ThresholdScenario, String> {
    s.parse().map_err(|e: SteeringError| e.to_string())
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: SteeringError| e.to_string())
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

/// Reading a user-supplied file counts as a usage problem when it fails.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let usage = err.chain().any(|cause| {
                cause.downcast_ref::<UsageError>().is_some()
                    || cause.downcast_ref::<SteeringError>().is_some_and(|e| e.is_usage())
            });
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let start = Instant::now();
    let default_format = match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Json,
    };
    let format = if cli.global.csv {
        Format::Csv
    } else if cli.global.json {
        Format::Json
    } else {
        default_format
    };
    let seed = cli.global.seed;
    let mut code = ExitCode::SUCCESS;
    let mut report = match cli.command {
        Command::GhzQubit(a) => ghz_qubit(&a)?,
        Command::GhzCv(a) => ghz_cv(&a)?,
        Command::Eavesdrop(a) => {
            let mut rep = RunReport::new("eavesdrop").with_parameter("r", a.r)?;
            for rec in eavesdrop_sweep(a.r, &a.eta_grid.0)? {
                rep.push(Record::Eavesdrop(rec));
            }
            rep
        }
        Command::Threshold(a) => {
            let mut rep = RunReport::new(format!("threshold:{}", a.scenario.name()))
                .with_parameter("tol", a.tol)?;
            if let NoClickPolicy::ConstantGuess(g) = a.policy {
                rep = rep.with_parameter("guess", g)?;
            }
            rep.push(Record::Threshold(a.scenario.run(a.policy, a.tol)?));
            rep
        }
        Command::Sweep(a) => {
            let text = std::fs::read_to_string(&a.config)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", a.config.display())))?;
            let mut config = SweepConfig::from_json(&text)
                .with_context(|| format!("invalid sweep config {}", a.config.display()))?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let mut rep = RunReport::new(config.scenario.clone())
                .with_parameter("seed", config.seed as f64)?;
            if let Some(shots) = config.shots {
                rep = rep.with_parameter("shots", shots as f64)?;
            }
            for p in run_sweep(&config)? {
                rep.push(Record::SweepPoint(p));
            }
            rep
        }
        Command::SecretSharing(a) => {
            let mut rep = RunReport::new("secret-sharing").with_parameter("n", a.n as f64)?;
            if a.backend == Backend::Cv {
                rep = rep.with_parameter("r", a.r)?;
            }
            let demo = secret_sharing_demo(a.backend, a.n, a.r, &ScanConfig::default())?;
            rep.push(Record::SecretSharing(demo));
            rep
        }
        Command::Shots(a) => shots(&a, seed.unwrap_or(0))?,
        Command::Selftest => {
            let mut rep = RunReport::new("selftest");
            let checks = run_selftest();
            if checks.iter().any(|c| !c.passed) {
                code = ExitCode::from(1);
            }
            for c in checks {
                rep.push(Record::Check(c));
            }
            rep
        }
    };
    if cli.global.timing {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    write_report(&report, format)?;
    Ok(code)
}

fn ghz_qubit(a: &GhzQubitArgs) -> Result<RunReport> {
    let rho = ghz(a.n)?.to_density().depolarize_global(a.noise_p)?;
    let model = DetectionModel::new(a.eta, a.policy)?;
    let target = a.target.unwrap_or(a.n);
    let mut rep = RunReport::new("ghz-qubit")
        .with_parameter("n", a.n as f64)?
        .with_parameter("noise_p", a.noise_p)?
        .with_parameter("eta", a.eta)?;
    if let NoClickPolicy::ConstantGuess(g) = a.policy {
        rep = rep.with_parameter("guess", g)?;
    }
    match a.criterion {
        QubitCriterion::TwoObs => {
            rep = rep.with_parameter("target", target as f64)?;
            rep.push(Record::Steering(ghz_spin_two_obs(&rho, target, &model)?));
        }
        QubitCriterion::ThreeObs => {
            rep = rep.with_parameter("target", target as f64)?;
            rep.push(Record::Steering(ghz_spin_three_obs(&rho, target, &model)?));
        }
        QubitCriterion::Result4 => {
            rep.push(Record::Genuine(genuine_tripartite_qubit(
                &rho,
                QubitEstimator::GhzPredictors,
                &model,
            )?));
        }
    }
    Ok(rep)
}

fn others(j: usize) -> Result<(usize, usize)> {
    match j {
        1 => Ok((2, 3)),
        2 => Ok((3, 1)),
        3 => Ok((1, 2)),
        _ => Err(SteeringError::InvalidArgument(format!("CV target must be 1, 2 or 3, got {j}")).into()),
    }
}

fn ghz_cv(a: &GhzCvArgs) -> Result<RunReport> {
    let state = cv_ghz(a.r)?;
    let mut rep = RunReport::new("ghz-cv").with_parameter("r", a.r)?;
    match a.criterion {
        CvCriterion::Eq2 => {
            let (k, m) = others(a.target)?;
            rep = rep.with_parameter("target", a.target as f64)?;
            rep.push(Record::Steering(steering_product_cv(
                &state,
                a.target,
                &HomodynePlan::x_of(&[k, m])?,
                &HomodynePlan::p_of(&[k, m])?,
            )?));
        }
        CvCriterion::Eq6 => {
            let (k, m) = others(a.target)?;
            rep = rep.with_parameter("target", a.target as f64)?;
            rep.push(Record::Steering(s_j_fixed_combo(&state, a.target, k, m)?));
            rep.push(Record::Steering(s_j_optimal_gains(&state, a.target, k, m)?));
        }
        CvCriterion::Result4 => {
            rep.push(Record::Genuine(genuine_tripartite_cv(&state, CvEstimator::FixedCombo)?));
            rep.push(Record::Genuine(genuine_tripartite_cv(&state, CvEstimator::OptimalGains)?));
        }
    }
    Ok(rep)
}

fn shots(a: &ShotsArgs, seed: u64) -> Result<RunReport> {
    let mut rep = RunReport::new("shots")
        .with_parameter("shots", a.shots as f64)?
        .with_parameter("seed", seed as f64)?;
    let estimate = match a.backend {
        Backend::Qubit => {
            rep = rep.with_parameter("noise_p", a.noise_p)?;
            let rho = ghz(3)?.to_density().depolarize_global(a.noise_p)?;
            let target = a.target.unwrap_or(3);
            simulate_shots(StateRef::Qubit(&rho), ShotCriterion::SpinTwoObs { target }, a.shots, seed)?
        }
        Backend::Cv => {
            rep = rep.with_parameter("r", a.r)?;
            let state = cv_ghz(a.r)?;
            let j = a.target.unwrap_or(1);
            let (k, m) = others(j)?;
            simulate_shots(StateRef::Cv(&state), ShotCriterion::CvFixedCombo { j, k, m }, a.shots, seed)?
        }
    };
    rep.push(Record::Shots(estimate));
    Ok(rep)
}

fn write_report(report: &RunReport, format: Format) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => out.write_all(report.to_json_lines()?.as_bytes())?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_COLUMNS)?;
            for row in report.csv_rows() {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}
