use std::io::Read as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::cnf::{parse_dimacs_answer, parse_smtlib_answer, Cnf, SatAnswer};
use super::encode::{encode, Bounds};
use super::prepare::SynthesisInstance;
use crate::automata::{mc_exists_forall, AutomatonError};
use crate::machine::{ExistGenerator, MooreSystem};

/// Environment variable naming the default external DIMACS solver command.
pub const SOLVER_ENV: &str = "HQPTL_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// CaDiCaL linked into the process.
    Internal,
    /// External command reading a DIMACS file given as last argument.
    Dimacs(Vec<String>),
    /// External command reading an SMT-LIB v2 file given as last argument.
    SmtLib(Vec<String>),
}

impl Backend {
    /// The DIMACS command in [`SOLVER_ENV`] if set, else the internal solver.
    pub fn from_env() -> Backend {
        match std::env::var(SOLVER_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Backend::Dimacs(split_command(&cmd)),
            _ => Backend::Internal,
        }
    }
}

pub fn split_command(cmd: &str) -> Vec<String> {
    cmd.split_whitespace().map(str::to_string).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub backend: Backend,
    pub timeout: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            backend: Backend::Internal,
            timeout: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver command is empty")]
    NoCommand,
    #[error("cannot run solver `{command}`: {source}")]
    Spawn { command: String, source: std::io::Error },
    #[error("solver exited with {status} without an answer: {stderr}")]
    Failed { status: String, stderr: String },
    #[error("solver timed out")]
    Timeout,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn run_internal(cnf: &Cnf, timeout: Option<Duration>) -> Result<SatAnswer, SolverError> {
    let mut s: cadical::Solver = cadical::Solver::new();
    if let Some(t) = timeout {
        s.set_callbacks(Some(cadical::Timeout::new(t.as_secs_f32())));
    }
    for c in cnf.clauses() {
        s.add_clause(c.iter().copied());
    }
    match s.solve() {
        Some(true) => Ok(SatAnswer::Sat(
            (0..=cnf.vars() as i32)
                .map(|v| v > 0 && s.value(v) == Some(true))
                .collect(),
        )),
        Some(false) => Ok(SatAnswer::Unsat),
        None => Err(SolverError::Timeout),
    }
}

fn run_external(
    command: &[String],
    file: PathBuf,
    timeout: Option<Duration>,
) -> Result<(String, String, String), SolverError> {
    let (prog, args) = command.split_first().ok_or(SolverError::NoCommand)?;
    let mut child = Command::new(prog)
        .args(args)
        .arg(&file)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Spawn {
            command: command.join(" "),
            source,
        })?;
    let mut stdout = child.stdout.take().expect("piped");
    let mut stderr = child.stderr.take().expect("piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let start = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if timeout.is_some_and(|t| start.elapsed() > t) {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SolverError::Timeout);
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let out = out_reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    Ok((out, err, status.to_string()))
}

/// Solves `cnf` with the configured backend.
pub fn run_solver(cnf: &Cnf, config: &SolverConfig) -> Result<SatAnswer, SolverError> {
    match &config.backend {
        Backend::Internal => run_internal(cnf, config.timeout),
        Backend::Dimacs(cmd) => {
            let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
            cnf.write_dimacs(&mut std::io::BufWriter::new(file.as_file_mut()))?;
            let (out, err, status) = run_external(cmd, file.path().to_path_buf(), config.timeout)?;
            parse_dimacs_answer(&out, cnf.vars()).ok_or(SolverError::Failed { status, stderr: err })
        }
        Backend::SmtLib(cmd) => {
            let mut file = tempfile::Builder::new().suffix(".smt2").tempfile()?;
            cnf.write_smtlib(&mut std::io::BufWriter::new(file.as_file_mut()))?;
            let (out, err, status) = run_external(cmd, file.path().to_path_buf(), config.timeout)?;
            parse_smtlib_answer(&out, cnf.vars()).ok_or(SolverError::Failed { status, stderr: err })
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("decoded solution at bounds ({n}, {m}) fails verification")]
    Verification { n: usize, m: usize },
}

#[derive(Clone, Debug)]
pub enum Outcome {
    /// A verified realization.
    Sat {
        system: MooreSystem,
        generator: ExistGenerator,
    },
    /// No realization within the bounds; says nothing about larger bounds.
    Unsat,
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat { .. })
    }
}

/// One solver call of a search.
#[derive(Clone, Debug)]
pub struct Attempt {
    pub bounds: Bounds,
    pub sat: bool,
    pub vars: u32,
    pub clauses: usize,
    pub automaton_states: usize,
    pub seconds: f64,
}

/// Encodes, solves and, on success, decodes and model checks the result. A
/// decoded pair failing the check is reported as an error.
pub fn solve(
    inst: &SynthesisInstance,
    bounds: Bounds,
    config: &SolverConfig,
) -> Result<(Outcome, Attempt), SynthesisError> {
    let start = Instant::now();
    let problem = encode(inst, bounds)?;
    let answer = run_solver(&problem.cnf, config)?;
    let outcome = match answer {
        SatAnswer::Unsat => Outcome::Unsat,
        SatAnswer::Sat(model) => {
            let (system, generator) = problem.decode(&model);
            let check = mc_exists_forall(&system, &generator, &inst.universal, &inst.body)?;
            if !check.holds {
                return Err(SynthesisError::Verification {
                    n: problem.bounds.system,
                    m: problem.bounds.generator,
                });
            }
            Outcome::Sat { system, generator }
        }
    };
    let attempt = Attempt {
        bounds: problem.bounds,
        sat: outcome.is_sat(),
        vars: problem.cnf.vars(),
        clauses: problem.cnf.clause_count(),
        automaton_states: problem.automaton_states,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((outcome, attempt))
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub attempts: Vec<Attempt>,
    /// First realization found, with its bounds.
    pub result: Option<(Bounds, Outcome)>,
}

/// Bound pairs in search order: nondecreasing `n + m`, then increasing `n`.
/// Generator bounds are fixed to 1 without existential copies.
pub fn bound_order(max_n: usize, max_m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for sum in 2..=max_n + max_m {
        for n in 1..=max_n {
            if sum > n && sum - n <= max_m {
                out.push((n, sum - n));
            }
        }
    }
    out
}

/// Tries bounds in [`bound_order`] until the first realization.
pub fn search(
    inst: &SynthesisInstance,
    max_n: usize,
    max_m: usize,
    lambda_max: Option<usize>,
    config: &SolverConfig,
) -> Result<SearchReport, SynthesisError> {
    let max_m = if inst.existential.is_empty() { 1 } else { max_m };
    let mut attempts = Vec::new();
    for (n, m) in bound_order(max_n, max_m) {
        let bounds = Bounds {
            system: n,
            generator: m,
            lambda_max,
        };
        let (outcome, attempt) = solve(inst, bounds, config)?;
        attempts.push(attempt);
        if outcome.is_sat() {
            return Ok(SearchReport {
                attempts,
                result: Some((bounds, outcome)),
            });
        }
    }
    Ok(SearchReport { attempts, result: None })
}
