//! The `gme` command line tool.
//!
//! Subcommands:
//!
//! - `eval`: evaluate one criterion on a built-in state or a state file.
//! - `prob`: estimate a detection probability.
//! - `sweep`: estimate detection probabilities along a noise grid (CSV).
//! - `reference`: print the closed-form target values.
//! - `replay`: re-run a JSON run record written by `prob`/`sweep --format json`.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or values), 2 a state file
//! failed validation (Hermiticity, trace, positivity), 3 a state file could
//! not be read or parsed.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::criteria::{required_elements, CriterionId, CriterionPlan, CriterionResult, DETECTION_THRESHOLD};
use crate::estimator::{
    sweep_noise_with, BasisRotation, DetectorConfig, EstimatorOptions, Execution, SweepPoint,
    DEFAULT_CONFIDENCE, DEFAULT_SAMPLES,
};
use crate::haar::UnitaryGroup;
use crate::reference::reference_table;
use crate::states::{load_density_matrix, make_dicke, make_ghz, make_w, DensityMatrix, StateVector};
use crate::{Error, Result};

/// Header of every CSV the tool writes.
pub const CSV_HEADER: &str = "q,p_hat,ci_low,ci_high,n_samples,n_hits,seed";

/// Environment variable overriding the default sample count.
pub const SAMPLES_ENV: &str = "GME_SAMPLES";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gme", version, about = "Detection probabilities of genuine multipartite entanglement under random local bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a criterion on a state
    Eval(EvalArgs),
    /// Estimate the probability that a random local basis detects GME
    Prob(ProbArgs),
    /// Estimate detection probabilities along a noise grid
    Sweep(SweepArgs),
    /// Print closed-form target probabilities
    Reference,
    /// Re-run a JSON run record
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Ghz,
    W,
    Dicke,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Product,
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExecutionArg {
    Parallel,
    Sequential,
}

/// A built-in pure state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub kind: StateKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl StateSpec {
    pub fn build(&self) -> Result<StateVector> {
        match (self.kind, self.m) {
            (StateKind::Ghz, None) => make_ghz(self.n),
            (StateKind::W, None) => make_w(self.n),
            (StateKind::Dicke, Some(m)) => make_dicke(self.n, m),
            (StateKind::Dicke, None) => Err(Error::arg("dicke states need --m")),
            (_, Some(_)) => Err(Error::arg("--m only applies to dicke states")),
        }
    }

    fn label(&self) -> String {
        match self.m {
            Some(m) => format!("{:?} n={} m={m}", self.kind, self.n).to_lowercase(),
            None => format!("{:?} n={}", self.kind, self.n).to_lowercase(),
        }
    }
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Built-in state family
    #[arg(long, value_enum)]
    pub state: StateKind,
    /// Number of qubits
    #[arg(long)]
    pub n: usize,
    /// Excitation count (dicke only)
    #[arg(long)]
    pub m: Option<usize>,
}

impl StateArgs {
    fn spec(&self) -> StateSpec {
        StateSpec { kind: self.state, n: self.n, m: self.m }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Built-in state family
    #[arg(long, value_enum, conflicts_with = "file", required_unless_present = "file")]
    pub state: Option<StateKind>,
    /// Number of qubits
    #[arg(long, required_unless_present = "file")]
    pub n: Option<usize>,
    /// Excitation count (dicke only)
    #[arg(long)]
    pub m: Option<usize>,
    /// Density-matrix file (JSON with `n` and row-major `entries`)
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// White-noise weight mixed into the state
    #[arg(long, default_value_t = 0.0)]
    pub q: f64,
    /// Criterion: q0, q1, ..., q<n/2>
    #[arg(long)]
    pub criterion: String,
    /// Measurement basis: comp or hadamard
    #[arg(long, default_value = "comp")]
    pub basis: String,
    /// Also list the density-matrix elements the criterion reads
    #[arg(short, long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Local unitary group to sample
    #[arg(long, value_enum, default_value = "product")]
    pub group: GroupArg,
    /// Comma-separated criteria, e.g. q0,q1
    #[arg(long, default_value = "q0")]
    pub criteria: String,
    /// Comma-separated bases, e.g. comp,hadamard
    #[arg(long, default_value = "comp")]
    pub bases: String,
    /// Number of Monte Carlo samples
    #[arg(long, env = SAMPLES_ENV, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Evaluation mode
    #[arg(long, value_enum, default_value = "parallel")]
    pub execution: ExecutionArg,
    /// Worker threads for parallel execution (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// White-noise weight
    #[arg(long, default_value_t = 0.0)]
    pub q: f64,
    #[command(flatten)]
    pub estimate: EstimateArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// First noise weight of the grid
    #[arg(long, default_value_t = 0.0)]
    pub q_start: f64,
    /// Last noise weight of the grid
    #[arg(long, default_value_t = 1.0)]
    pub q_end: f64,
    /// Number of evenly spaced grid points
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    #[command(flatten)]
    pub estimate: EstimateArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Run record written with --format json
    pub record: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

/// Everything needed to reproduce an estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub state: StateSpec,
    pub q_grid: Vec<f64>,
    pub group: UnitaryGroup,
    pub detector: DetectorConfig,
    pub n_samples: u64,
    pub seed: u64,
    pub threshold: f64,
    pub confidence: f64,
}

impl RunConfig {
    pub fn execute(&self, execution: Execution) -> Result<RunRecord> {
        let base = self.state.build()?;
        let opts = EstimatorOptions { execution, threshold: self.threshold, confidence: self.confidence };
        let sweep = sweep_noise_with(&base, &self.q_grid, &self.group, &self.detector, self.n_samples, self.seed, &opts)?;
        Ok(RunRecord {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.clone(),
            results: sweep.points,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool_version: String,
    pub config: RunConfig,
    pub results: Vec<SweepPoint>,
}

impl RunRecord {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for p in &self.results {
            let e = &p.estimate;
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_num(p.q),
                fmt_num(e.p_hat),
                fmt_num(e.ci_low),
                fmt_num(e.ci_high),
                e.n_samples,
                e.n_hits,
                e.seed
            ));
        }
        s
    }
}

/// At least ten significant digits for nonzero values.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.10}")
    } else {
        format!("{x:.10e}")
    }
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(f).collect()
}

fn detector_from(args: &EstimateArgs) -> Result<DetectorConfig> {
    let criteria = parse_list(&args.criteria, |t| t.parse::<CriterionId>())?;
    let bases = parse_list(&args.bases, BasisRotation::parse)?;
    if criteria.is_empty() || bases.is_empty() {
        return Err(Error::arg("need at least one criterion and one basis"));
    }
    DetectorConfig::grid(&criteria, &bases)
}

fn execution_from(args: &EstimateArgs) -> Result<Execution> {
    match (args.execution, args.threads) {
        (ExecutionArg::Sequential, Some(_)) => Err(Error::arg("--threads needs parallel execution")),
        (ExecutionArg::Sequential, None) => Ok(Execution::Sequential),
        (ExecutionArg::Parallel, None) => Ok(Execution::Parallel),
        (ExecutionArg::Parallel, Some(0)) => Err(Error::arg("--threads must be positive")),
        (ExecutionArg::Parallel, Some(t)) => Ok(Execution::Threads(t)),
    }
}

fn config_from(state: &StateArgs, q_grid: Vec<f64>, args: &EstimateArgs) -> Result<RunConfig> {
    Ok(RunConfig {
        state: state.spec(),
        q_grid,
        group: match args.group {
            GroupArg::Product => UnitaryGroup::Product,
            GroupArg::Symmetric => UnitaryGroup::Symmetric,
        },
        detector: detector_from(args)?,
        n_samples: args.samples,
        seed: args.seed,
        threshold: DETECTION_THRESHOLD,
        confidence: DEFAULT_CONFIDENCE,
    })
}

/// `steps` evenly spaced points from `start` to `end`.
pub fn linear_grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    match steps {
        0 => Err(Error::arg("--steps must be at least 1")),
        1 => Ok(vec![start]),
        _ if end <= start => Err(Error::arg("--q-end must exceed --q-start")),
        _ => {
            let h = (end - start) / (steps - 1) as f64;
            let mut grid: Vec<f64> = (0..steps).map(|i| start + h * i as f64).collect();
            grid[steps - 1] = end;
            Ok(grid)
        }
    }
}

fn emit(record: &RunRecord, format: FormatArg, out: &mut dyn Write) -> Result<()> {
    match format {
        FormatArg::Csv => out.write_all(record.to_csv().as_bytes())?,
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut *out, record).map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let (label, pure) = match (&args.file, args.state) {
        (Some(path), _) => (path.display().to_string(), load_density_matrix(path)?),
        (None, Some(kind)) => {
            let n = args.n.ok_or_else(|| Error::arg("--n is required with --state"))?;
            let spec = StateSpec { kind, n, m: args.m };
            (spec.label(), spec.build()?.projector())
        }
        (None, None) => return Err(Error::arg("give --state or --file")),
    };
    crate::states::check_noise(args.q)?;
    let n = pure.qubits();
    let rho = if args.q == 0.0 {
        pure
    } else {
        DensityMatrix::mixture(&[(1.0 - args.q, pure), (args.q, DensityMatrix::maximally_mixed(n))])?
    };
    let id: CriterionId = args.criterion.parse()?;
    let basis = BasisRotation::parse(&args.basis)?;
    let plan = CriterionPlan::new(id, n)?;
    let rotated = match basis {
        BasisRotation::Computational => rho,
        ref b => rho.apply_local_unitary(&b.local_unitary(n))?,
    };
    let result = CriterionResult::from_value(plan.evaluate(&rotated));
    writeln!(out, "state     {label}")?;
    writeln!(out, "q         {}", fmt_num(args.q))?;
    writeln!(out, "criterion {id}")?;
    writeln!(out, "basis     {}", basis.label())?;
    writeln!(out, "value     {}", fmt_num(result.value))?;
    writeln!(out, "detected  {}", result.detected)?;
    if args.verbose {
        let elems = required_elements(id, n)?;
        let list: Vec<String> = elems.iter().map(|(r, c)| format!("({r},{c})")).collect();
        writeln!(out, "elements  {}", list.join(" "))?;
    }
    Ok(())
}

fn cmd_reference(out: &mut dyn Write) -> Result<()> {
    writeln!(out, "# closed-form detection probabilities: symmetric group U^(x)n, one basis, pure states")?;
    writeln!(out, "key,state,criteria,value,closed_form")?;
    for r in reference_table() {
        writeln!(out, "{},{},{},{},\"{}\"", r.key, r.state, r.criteria, fmt_num(r.value), r.closed_form)?;
    }
    Ok(())
}

fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&args.record)?;
    let record: RunRecord = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let again = record.config.execute(Execution::Parallel)?;
    emit(&again, args.format, out)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, out),
        Command::Prob(a) => {
            let config = config_from(&a.state, vec![a.q], &a.estimate)?;
            let record = config.execute(execution_from(&a.estimate)?)?;
            emit(&record, a.estimate.format, out)
        }
        Command::Sweep(a) => {
            let grid = linear_grid(a.q_start, a.q_end, a.steps)?;
            let config = config_from(&a.state, grid, &a.estimate)?;
            let record = config.execute(execution_from(&a.estimate)?)?;
            emit(&record, a.estimate.format, out)
        }
        Command::Reference => cmd_reference(out),
        Command::Replay(a) => cmd_replay(a, out),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        e if e.is_validation() => EXIT_VALIDATION,
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_construction() {
        assert_eq!(linear_grid(0.0, 0.8, 5).unwrap(), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8]);
        assert_eq!(linear_grid(0.3, 0.1, 1).unwrap(), vec![0.3]);
        assert!(linear_grid(0.5, 0.5, 3).is_err());
        assert!(linear_grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn number_formatting_keeps_six_significant_digits() {
        assert_eq!(fmt_num(0.5), "0.5000000000");
        assert_eq!(fmt_num(0.0), "0.0000000000");
        assert_eq!(fmt_num(1.25e-5), "1.2500000000e-5");
        assert_eq!(fmt_num(-0.375), "-0.3750000000");
    }

    #[test]
    fn state_spec_checks_m() {
        assert!(StateSpec { kind: StateKind::Dicke, n: 4, m: None }.build().is_err());
        assert!(StateSpec { kind: StateKind::Ghz, n: 4, m: Some(2) }.build().is_err());
        assert!(StateSpec { kind: StateKind::Dicke, n: 4, m: Some(2) }.build().is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Trace { trace: 0.9 }), EXIT_VALIDATION);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_PARSE);
        assert_eq!(exit_code(&Error::arg("x")), EXIT_USAGE);
    }
}
