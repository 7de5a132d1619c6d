//! Command-line front end. Every command builds a report, renders it as
//! JSON or CSV, and maps "all checks passed" to exit code 0.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::collective::{check_dfs_condition, dfs_basis, dfs_dimension};
use crate::encoding::{distance2_report, encode, logical_one, logical_zero, random_encoded};
use crate::error::{Error, Result};
use crate::ftmeas::{binomial_tail, exact_vote_distribution, five_sigma, run_shots, ShotRow};
use crate::gates::{cphase_report, gates_report, reference_sweep, theorem_report, ConvergenceSweep, Formula};
use crate::hilbert::{basis_state, fidelity, StateVector};
use crate::linalg::C64;
use crate::noise::{collective_fidelity_sweep, trial_rng, FidelityReport};
use crate::report::{Check, VerificationReport};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerance: f64,
    pub format: OutputFormat,
    /// `None` writes to standard output.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(seed: u64, tolerance: f64, format: OutputFormat, out: Option<PathBuf>) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
        }
        Ok(Self { seed, tolerance, format, out })
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            format: OutputFormat::Json,
            out: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Dfs,
    Gates,
    Cphase,
    Distance2,
    Theorem,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormulaArg {
    Sum,
    Product,
}

impl From<FormulaArg> for Formula {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::Sum => Formula::Sum,
            FormulaArg::Product => Formula::Product,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputState {
    Zero,
    One,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseState {
    EncodedRandom,
    Product,
}

/// A rendered command result.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub report: VerificationReport,
    pub rendered: String,
}

impl CommandOutput {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            0
        } else {
            1
        }
    }
}

fn csv_string<S: Serialize>(rows: impl IntoIterator<Item = S>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct CheckRow<'a> {
    suite: &'a str,
    check: &'a str,
    passed: bool,
    residual: f64,
    tolerance: f64,
    details: &'a str,
}

fn render_report(report: &VerificationReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        OutputFormat::Csv => csv_string(report.checks.iter().map(|c| CheckRow {
            suite: &report.suite,
            check: &c.name,
            passed: c.passed,
            residual: c.residual,
            tolerance: c.tolerance,
            details: &c.details,
        })),
    }
}

/// A report plus command-specific payload, flattened into one JSON object.
#[derive(Serialize)]
struct WithPayload<'a, T: Serialize> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    #[serde(flatten)]
    payload: T,
}

fn render_json<T: Serialize>(report: &VerificationReport, payload: T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&WithPayload { report, payload })? + "\n")
}

fn dfs_report(tol: f64) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("dfs");
    r.absorb(check_dfs_condition(&[logical_zero(), logical_one()], 4, tol)?);
    for (k, want) in [(2, 1), (4, 2), (6, 5), (8, 14)] {
        let got = dfs_basis(k)?.dim() as i64;
        r.push(Check::exact(format!("dimension_k{k}"), got, want));
        r.push(Check::exact(format!("dimension_k{k}_binomial"), got, dfs_dimension(k)? as i64));
    }
    Ok(r)
}

pub fn verify_report(suite: Suite, config: &RunConfig) -> Result<VerificationReport> {
    let tol = config.tolerance;
    Ok(match suite {
        Suite::Dfs => dfs_report(tol)?,
        Suite::Gates => gates_report(tol)?,
        Suite::Cphase => cphase_report(tol)?,
        Suite::Distance2 => distance2_report(tol)?,
        Suite::Theorem => theorem_report(tol, config.seed)?,
        Suite::All => {
            let mut r = VerificationReport::new("all");
            for s in [Suite::Dfs, Suite::Gates, Suite::Cphase, Suite::Distance2, Suite::Theorem] {
                r.absorb(verify_report(s, config)?);
            }
            r
        }
    })
}

pub fn run_verify(suite: Suite, config: &RunConfig) -> Result<CommandOutput> {
    let report = verify_report(suite, config)?;
    Ok(CommandOutput {
        rendered: render_report(&report, config.format)?,
        report,
    })
}

#[derive(Serialize)]
struct SweepPayload<'a> {
    sweep: &'a ConvergenceSweep,
}

pub fn run_trotter_sweep(formula: Formula, n_values: &[usize], config: &RunConfig) -> Result<CommandOutput> {
    let sweep = reference_sweep(formula, n_values)?;
    let mut report = VerificationReport::new("trotter-sweep");
    let finite = sweep.rows.iter().all(|r| r.error.is_finite());
    report.push(Check::exact("errors_finite", i64::from(finite), 1));
    if let Some(slope) = sweep.slope {
        let (lo, hi) = formula.slope_window();
        let outside = (lo - slope).max(slope - hi).max(0.0);
        report.push(
            Check::at_most("slope_in_window", outside, 0.0)
                .with_details(format!("slope {slope:.6}, window [{lo}, {hi}]")),
        );
    }
    let rendered = match config.format {
        OutputFormat::Json => render_json(&report, SweepPayload { sweep: &sweep })?,
        OutputFormat::Csv => csv_string(sweep.rows.iter())?,
    };
    Ok(CommandOutput { report, rendered })
}

fn input_state(input: InputState) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match input {
        InputState::Zero => Ok(logical_zero()),
        InputState::One => Ok(logical_one()),
        InputState::Plus => encode(&[C64::new(h, 0.0), C64::new(h, 0.0)], 1),
    }
}

#[derive(Serialize)]
struct MeasureSummary {
    input: InputState,
    shots: usize,
    rounds: usize,
    p_ancilla: f64,
    bit0_frequency: f64,
    bit1_frequency: f64,
    exact_bit0_probability: f64,
    min_post_fidelity: f64,
    mean_post_fidelity: f64,
}

#[derive(Serialize)]
struct MeasurePayload {
    summary: MeasureSummary,
}

pub fn run_measure(
    shots: usize,
    rounds: usize,
    p_ancilla: f64,
    input: InputState,
    config: &RunConfig,
) -> Result<CommandOutput> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be ≥ 1".into()));
    }
    let data = input_state(input)?;
    let records = run_shots(&data, shots, rounds, p_ancilla, config.seed)?;
    let zero = logical_zero();
    let one = logical_one();

    let mut rows = Vec::with_capacity(shots);
    let mut eigen_fid = Vec::with_capacity(shots);
    for r in &records {
        let voted_state = if r.voted_bit == 0 { &zero } else { &one };
        rows.push(ShotRow::new(r, voted_state)?);
        // the data always collapses onto a Z̄ eigenstate, even when the vote is wrong
        eigen_fid.push(fidelity(&r.post_state, &zero)?.max(fidelity(&r.post_state, &one)?));
    }
    let zeros = records.iter().filter(|r| r.voted_bit == 0).count();
    let freq0 = zeros as f64 / shots as f64;
    let exact = exact_vote_distribution(&data, rounds, p_ancilla)?[0];

    let mut report = VerificationReport::new("measure");
    report.push(
        Check::at_most("bit0_frequency", (freq0 - exact).abs(), five_sigma(exact, shots).max(1e-12))
            .with_details(format!("{zeros}/{shots} voted 0, exact probability {exact:.6}, 5σ window")),
    );
    if input != InputState::Plus {
        let want_bit = u8::from(input == InputState::One);
        let errors = records.iter().filter(|r| r.voted_bit != want_bit).count();
        let rate = errors as f64 / shots as f64;
        let tail = binomial_tail(rounds, p_ancilla);
        report.push(
            Check::at_most("voted_error_rate", (rate - tail).abs(), five_sigma(tail, shots).max(1e-12))
                .with_details(format!("{errors}/{shots} wrong, binomial tail {tail:.6}")),
        );
    }
    let min_fid = eigen_fid.iter().copied().fold(1.0, f64::min);
    report.push(
        Check::at_most("post_state_eigen_infidelity", 1.0 - min_fid, 1e-9)
            .with_details("worst 1 − max(F(ψ, 0_L), F(ψ, 1_L))"),
    );

    let rendered = match config.format {
        OutputFormat::Csv => csv_string(rows.iter())?,
        OutputFormat::Json => render_json(
            &report,
            MeasurePayload {
                summary: MeasureSummary {
                    input,
                    shots,
                    rounds,
                    p_ancilla,
                    bit0_frequency: freq0,
                    bit1_frequency: 1.0 - freq0,
                    exact_bit0_probability: exact,
                    min_post_fidelity: rows.iter().map(|r| r.post_fidelity).fold(1.0, f64::min),
                    mean_post_fidelity: rows.iter().map(|r| r.post_fidelity).sum::<f64>() / shots as f64,
                },
            },
        )?,
    };
    Ok(CommandOutput { report, rendered })
}

/// Number of random encoded states used by `noise --state encoded-random`.
pub const NOISE_STATES: usize = 4;

#[derive(Serialize)]
struct NoisePayload<'a> {
    state: NoiseState,
    fidelity: &'a FidelityReport,
}

pub fn run_noise(trials: usize, state: NoiseState, config: &RunConfig) -> Result<CommandOutput> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
    }
    let states = match state {
        NoiseState::EncodedRandom => {
            // state draws use a stream no trial index can reach
            let mut rng = trial_rng(config.seed, u64::MAX);
            (0..NOISE_STATES)
                .map(|_| random_encoded(1, &mut rng))
                .collect::<Result<Vec<_>>>()?
        }
        NoiseState::Product => vec![basis_state("0000")?],
    };
    let fr = collective_fidelity_sweep(&states, trials, config.seed)?;
    let mut report = VerificationReport::new("noise");
    match state {
        NoiseState::EncodedRandom => {
            report.push(Check::at_most("min_infidelity", 1.0 - fr.min_fidelity, config.tolerance));
            report.push(Check::at_most("max_leakage", fr.max_leakage, config.tolerance));
        }
        NoiseState::Product => {
            report.push(
                Check::below("min_fidelity_moves", fr.min_fidelity, 0.99)
                    .with_details("product states are not protected"),
            );
        }
    }
    let rendered = match config.format {
        OutputFormat::Json => render_json(&report, NoisePayload { state, fidelity: &fr })?,
        OutputFormat::Csv => csv_string([&fr])?,
    };
    Ok(CommandOutput { report, rendered })
}

fn emit(output: &CommandOutput, config: &RunConfig) -> Result<i32> {
    match &config.out {
        Some(path) => std::fs::write(path, &output.rendered)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.rendered.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(output.exit_code())
}

pub fn cmd_verify(suite: Suite, config: &RunConfig) -> Result<i32> {
    emit(&run_verify(suite, config)?, config)
}

pub fn cmd_trotter_sweep(formula: Formula, n_values: &[usize], config: &RunConfig) -> Result<i32> {
    emit(&run_trotter_sweep(formula, n_values, config)?, config)
}

pub fn cmd_measure(shots: usize, rounds: usize, p_ancilla: f64, input: InputState, config: &RunConfig) -> Result<i32> {
    emit(&run_measure(shots, rounds, p_ancilla, input, config)?, config)
}

pub fn cmd_noise(trials: usize, state: NoiseState, config: &RunConfig) -> Result<i32> {
    emit(&run_noise(trials, state, config)?, config)
}

#[derive(Debug, Parser)]
#[command(name = "dfsforge", version, about = "Decoherence-free subspace gate and measurement simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Root seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Numerical tolerance for residual checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_odd(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n % 2 == 1 {
        Ok(n)
    } else {
        Err(format!("rounds must be odd, got {n}"))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Error of a product-formula approximant against its limit, per step count.
    TrotterSweep {
        #[arg(long, value_enum)]
        formula: FormulaArg,
        /// Ascending step counts, comma separated (defaults depend on the formula).
        #[arg(long = "n", value_delimiter = ',')]
        n_values: Vec<usize>,
    },
    /// Repeated nondestructive Z̄ readout with majority voting.
    Measure {
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, default_value_t = 3, value_parser = parse_odd)]
        rounds: usize,
        #[arg(long, default_value_t = 0.0)]
        p_ancilla: f64,
        #[arg(long, value_enum, default_value_t = InputState::Zero)]
        input: InputState,
    },
    /// Random collective rotations on encoded or product states.
    Noise {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = NoiseState::EncodedRandom)]
        state: NoiseState,
    },
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let g = cli.global;
    let result = RunConfig::new(g.seed, g.tolerance, g.format, g.out).and_then(|config| match cli.command {
        Command::Verify { suite } => cmd_verify(suite, &config),
        Command::TrotterSweep { formula, n_values } => {
            let formula = Formula::from(formula);
            let ns = if n_values.is_empty() { formula.default_steps() } else { n_values };
            cmd_trotter_sweep(formula, &ns, &config)
        }
        Command::Measure { shots, rounds, p_ancilla, input } => cmd_measure(shots, rounds, p_ancilla, input, &config),
        Command::Noise { trials, state } => cmd_noise(trials, state, &config),
    });
    match result {
        Ok(code) => code,
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
    }
}
