//! Command-line driver for the `atsp` binary. Each subcommand is a plain
//! function returning `Result<(), Failure>`; the failure carries the process
//! exit code so `main` stays trivial and tests can call commands directly.

mod verify;

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use atsp_core::heldkarp::{HeldKarpError, SEPARATION_TOL};
use atsp_core::instance::{parse_instance, parse_tsplib, serialize_instance, InstanceError};
use atsp_core::oracle::{exact_atsp, sweep_csv, OracleError};
use atsp_core::patchup::{solve_detailed, PatchError, PipelineError};
use atsp_core::rounding::{run_trials, trials_csv, RoundingError, RNG_NAME};
use atsp_core::{generate, solve_lp, validate, CostMatrix, InstanceKind, RoundingConfig, VERSION};
use clap::{Args, Parser, Subcommand};

pub use verify::{verify_instance, CheckOutcome, CheckStatus};

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_ALGORITHMIC: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::new(EXIT_INPUT, e.to_string())
    }
}

impl From<HeldKarpError> for Failure {
    fn from(e: HeldKarpError) -> Self {
        let code = match e {
            HeldKarpError::InvalidInstance(_) | HeldKarpError::Parse { .. } => EXIT_INPUT,
            _ => EXIT_ALGORITHMIC,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<RoundingError> for Failure {
    fn from(e: RoundingError) -> Self {
        let code = match e {
            RoundingError::InvalidConfig(_) => EXIT_INPUT,
            _ => EXIT_ALGORITHMIC,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<PatchError> for Failure {
    fn from(e: PatchError) -> Self {
        Failure::new(EXIT_ALGORITHMIC, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } => Failure::new(EXIT_TOO_LARGE, e.to_string()),
            OracleError::Lp(e) => e.into(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Instance(e) => e.into(),
            PipelineError::Lp(e) => e.into(),
            PipelineError::Rounding(e) => e.into(),
            PipelineError::Patch(e) => e.into(),
            PipelineError::Invariant(msg) => {
                Failure::new(EXIT_ALGORITHMIC, format!("invariant violated: {msg}"))
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "atsp",
    version,
    about = "Randomized-rounding approximation for metric ATSP"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write the tour plus a key=value report.
    Solve(SolveArgs),
    /// Solve the Held-Karp relaxation and print its objective and support.
    Lp(LpArgs),
    /// Exact optimum by subset dynamic programming (n <= 15).
    Exact(ExactArgs),
    /// Run the invariant suite on one instance; exhaustive checks gate on n.
    Verify(VerifyArgs),
    /// Connectivity of rounded samples as a function of the scaling constant.
    Sweep(SweepArgs),
    /// Repeated retry loops logged one row per trial.
    Trials(TrialsArgs),
    /// Write a generated instance in the plain matrix format.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RoundingArgs {
    /// Multiplier in K = ceil(k_const * ln n).
    #[arg(long = "k-const", default_value_t = 100.0)]
    pub k_const: f64,
    #[arg(long, default_value_t = 0.316_227_766_016_837_9)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples drawn before giving up.
    #[arg(long, default_value_t = 20)]
    pub retries: u32,
}

impl RoundingArgs {
    pub fn config(&self) -> RoundingConfig {
        RoundingConfig {
            k_constant: self.k_const,
            epsilon: self.epsilon,
            max_retries: self.retries,
            seed: self.seed,
        }
    }

    fn describe(&self) -> String {
        format!(
            "seed={} k_const={} epsilon={} retries={} rng={RNG_NAME}",
            self.seed, self.k_const, self.epsilon, self.retries
        )
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub rounding: RoundingArgs,
    /// Tour file; the report goes to the same path with `.report` appended.
    /// Without it both are printed to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving z, w and z+w as multigraph text files.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub rounding: RoundingArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub instance: PathBuf,
    #[arg(long = "k-consts", value_delimiter = ',', default_values_t = [0.01, 0.5, 1.0, 2.0, 5.0])]
    pub k_consts: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrialsArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub rounding: RoundingArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// asymmetric-uniform, euclidean-perturbed or cycle-heavy.
    #[arg(long)]
    pub kind: InstanceKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Lp(a) => cmd_lp(&a),
        Command::Exact(a) => cmd_exact(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Trials(a) => cmd_trials(&a),
        Command::Generate(a) => cmd_generate(&a),
    }
}

/// Reads an instance in plain or TSPLIB format and rejects non-metric input.
pub fn load_instance(path: &Path) -> Result<CostMatrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    let m = if looks_like_tsplib(&text) {
        parse_tsplib(&text)?
    } else {
        parse_instance(&text)?
    };
    let report = validate(&m);
    if !report.is_empty() {
        return Err(InstanceError::Invalid(report).into());
    }
    Ok(m)
}

fn looks_like_tsplib(text: &str) -> bool {
    text.lines()
        .map(str::trim_start)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.chars().next().is_some_and(|c| c.is_ascii_alphabetic()))
}

fn header(command: &str, params: &str) -> String {
    format!("# atsp {VERSION} {command} {params}\n")
}

fn emit(out: Option<&Path>, header: &str, body: &str) -> Result<(), Failure> {
    let text = format!("{header}{body}");
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn cmd_solve(a: &SolveArgs) -> Result<(), Failure> {
    let m = load_instance(&a.instance)?;
    let run = solve_detailed(&m, &a.rounding.config(), SEPARATION_TOL)?;
    let params = format!(
        "instance={} {}",
        a.instance.display(),
        a.rounding.describe()
    );
    let head = header("solve", &params);
    let tour = run.tour.to_text();
    let report = run.report.to_key_values();
    match &a.out {
        Some(path) => {
            write_file(path, &format!("{head}{tour}"))?;
            write_file(&with_suffix(path, ".report"), &format!("{head}{report}"))?;
        }
        None => print!("{head}{tour}{report}"),
    }
    if let Some(dir) = &a.dump {
        fs::create_dir_all(dir).map_err(|e| {
            Failure::new(EXIT_INPUT, format!("cannot create {}: {e}", dir.display()))
        })?;
        let zw = run.z.sum(&run.w);
        for (name, g) in [("z.txt", &run.z), ("w.txt", &run.w), ("zw.txt", &zw)] {
            write_file(&dir.join(name), &format!("{head}{}", g.to_text()))?;
        }
    }
    Ok(())
}

pub fn cmd_lp(a: &LpArgs) -> Result<(), Failure> {
    let m = load_instance(&a.instance)?;
    let x = solve_lp(&m, SEPARATION_TOL)?;
    let head = header(
        "lp",
        &format!("instance={} tol={SEPARATION_TOL}", a.instance.display()),
    );
    emit(a.out.as_deref(), &head, &x.to_text())
}

pub fn cmd_exact(a: &ExactArgs) -> Result<(), Failure> {
    let m = load_instance(&a.instance)?;
    let tour = exact_atsp(&m)?;
    let head = header("exact", &format!("instance={}", a.instance.display()));
    emit(a.out.as_deref(), &head, &tour.to_text())
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let m = load_instance(&a.instance)?;
    let outcomes = verify_instance(&m, &a.rounding.config());
    let mut body = String::new();
    for o in &outcomes {
        writeln!(body, "{o}").unwrap();
    }
    let failed = outcomes
        .iter()
        .filter(|o| o.status == CheckStatus::Fail)
        .count();
    writeln!(body, "summary: {} checks, {failed} failed", outcomes.len()).unwrap();
    let params = format!(
        "instance={} {}",
        a.instance.display(),
        a.rounding.describe()
    );
    emit(a.out.as_deref(), &header("verify", &params), &body)?;
    if failed > 0 {
        return Err(Failure::new(
            EXIT_VERIFY_FAILED,
            format!("{failed} invariant check(s) failed"),
        ));
    }
    Ok(())
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<(), Failure> {
    if a.trials == 0 {
        return Err(Failure::new(EXIT_INPUT, "--trials must be at least 1"));
    }
    if let Some(k) = a.k_consts.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("k-const {k} must be positive"),
        ));
    }
    let m = load_instance(&a.instance)?;
    let rows = atsp_core::oracle::connectivity_sweep(&m, &a.k_consts, a.trials, a.seed)?;
    let consts: Vec<String> = a.k_consts.iter().map(f64::to_string).collect();
    let params = format!(
        "instance={} seed={} trials={} k_consts={} rng={RNG_NAME}",
        a.instance.display(),
        a.seed,
        a.trials,
        consts.join(",")
    );
    emit(
        a.out.as_deref(),
        &header("sweep", &params),
        &sweep_csv(&rows),
    )
}

pub fn cmd_trials(a: &TrialsArgs) -> Result<(), Failure> {
    let m = load_instance(&a.instance)?;
    let x = solve_lp(&m, SEPARATION_TOL)?;
    let records = run_trials(x.weights(), &m, &a.rounding.config(), a.trials)?;
    let params = format!(
        "instance={} trials={} {}",
        a.instance.display(),
        a.trials,
        a.rounding.describe()
    );
    emit(
        a.out.as_deref(),
        &header("trials", &params),
        &trials_csv(&records),
    )
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<(), Failure> {
    let m = generate(a.kind, a.n, a.seed)?;
    let params = format!("kind={} n={} seed={}", a.kind, a.n, a.seed);
    emit(
        a.out.as_deref(),
        &header("generate", &params),
        &serialize_instance(&m),
    )
}
