use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use hyperqptl::automata::{mc_exists_forall, mc_universal, McVerdict};
use hyperqptl::bench::{run_suite, BenchmarkInstance, SuiteOptions};
use hyperqptl::formula::{check_well_formed, extract_prefix, parse, prenex, print, SpecDocument};
use hyperqptl::fragments::classify;
use hyperqptl::machine::MachineBundle;
use hyperqptl::semantics::LassoDisplay;
use hyperqptl::synthesis::{
    prepare, search, split_command, Backend, Outcome, PrepareOptions, SolverConfig, SolverError, SynthesisError,
    SynthesisInstance, SOLVER_ENV,
};

/// Exit statuses shared by all subcommands.
const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const SOLVER_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hqptl",
    version,
    about = "HyperQPTL classification, reduction, synthesis and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Internal,
    Dimacs,
    Smtlib,
}

#[derive(clap::Args)]
struct ReduceArgs {
    /// Input whose trace copies stand in for propositional variables.
    #[arg(long)]
    designated_input: Option<String>,
    /// Merge universal trace quantifiers into one.
    #[arg(long)]
    collapse: bool,
    /// Continue on prefixes outside the decidable classes.
    #[arg(long)]
    force: bool,
}

impl ReduceArgs {
    fn options(&self) -> PrepareOptions {
        PrepareOptions {
            designated_input: self.designated_input.clone(),
            collapse: self.collapse,
            force: self.force,
        }
    }
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Solver interface; defaults to dimacs if the solver variable is set, else internal.
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    /// External solver command; the constraint file is appended as last argument.
    #[arg(long)]
    solver: Option<String>,
    /// Per-call solver timeout in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let command = || {
            self.solver
                .clone()
                .or_else(|| std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty()))
        };
        let backend = match self.backend {
            None if self.solver.is_some() => Backend::Dimacs(split_command(self.solver.as_deref().unwrap())),
            None => Backend::from_env(),
            Some(BackendKind::Internal) => Backend::Internal,
            Some(BackendKind::Dimacs) => Backend::Dimacs(command().map_or_else(bundled_solver, |c| split_command(&c))),
            Some(BackendKind::Smtlib) => Backend::SmtLib(split_command(&command().unwrap_or_else(|| "z3".into()))),
        };
        SolverConfig {
            backend,
            timeout: self.timeout.map(Duration::from_secs_f64),
        }
    }
}

/// The DIMACS solver shipped next to this executable.
fn bundled_solver() -> Vec<String> {
    let sibling = std::env::current_exe()
        .ok()
        .and_then(|p| p.parent().map(|d| d.join("hqptl-sat")))
        .filter(|p| p.exists());
    vec![sibling.map_or("hqptl-sat".to_string(), |p| p.display().to_string())]
}

#[derive(Subcommand)]
enum Cmd {
    /// Report the realizability fragment of a specification.
    Classify { spec: PathBuf },
    /// Reduce a specification to an ∃*∀* HyperLTL formula and log each step.
    Reduce {
        spec: PathBuf,
        #[command(flatten)]
        args: ReduceArgs,
    },
    /// Search for a bounded implementation.
    Synth {
        spec: PathBuf,
        #[arg(long)]
        max_system: usize,
        #[arg(long)]
        max_exists: usize,
        /// Override the annotation bound.
        #[arg(long)]
        lambda_max: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        reduce: ReduceArgs,
        /// Write the system and generator as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the system as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Model check a machine file against a specification.
    Verify {
        machine: PathBuf,
        spec: PathBuf,
        #[command(flatten)]
        reduce: ReduceArgs,
    },
    /// Run arbiter benchmarks and compare with published verdicts.
    Bench {
        /// Instance name such as arbiter-2-prompt; repeatable. Defaults to the catalog.
        #[arg(long = "instance")]
        instances: Vec<String>,
        /// Solve every bound pair instead of stopping at the first realization.
        #[arg(long)]
        full_table: bool,
        #[arg(long, default_value_t = 4)]
        max_system: usize,
        #[arg(long, default_value_t = 3)]
        max_exists: usize,
        #[arg(long)]
        lambda_max: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the report as a tab-separated table.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
}

struct Failure(u8, String);

type CmdResult = Result<u8, Failure>;

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure(INPUT_ERROR, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(input_error)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<SpecDocument, Failure> {
    let text = read(path)?;
    let doc = parse(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if let Some(d) = check_well_formed(&doc).into_iter().next() {
        return Err(input_error(format!("{}: {d}", path.display())));
    }
    Ok(doc)
}

fn load_instance(path: &Path, args: &ReduceArgs) -> Result<SynthesisInstance, Failure> {
    let doc = load_spec(path)?;
    prepare(&doc, &args.options()).map_err(input_error)
}

fn classify_cmd(spec: &Path) -> CmdResult {
    let doc = load_spec(spec)?;
    let f = prenex(&doc.formula).map_err(input_error)?;
    let (prefix, _) = extract_prefix(&f).map_err(input_error)?;
    let verdict = classify(&prefix);
    println!("prefix: {prefix}");
    println!("class: {}", verdict.class);
    println!("decidable: {}", verdict.class.is_decidable());
    println!("reason: {}", verdict.justification);
    Ok(OK)
}

fn reduce_cmd(spec: &Path, args: &ReduceArgs) -> CmdResult {
    let inst = load_instance(spec, args)?;
    println!("class: {}", inst.verdict.class);
    if inst.trace.steps.is_empty() {
        println!("no reduction steps");
    } else {
        print!("{}", inst.trace);
    }
    println!("result: {}", print(&inst.reduced));
    Ok(OK)
}

fn show_verdict(v: &McVerdict) {
    println!("{}", if v.holds { "holds" } else { "violated" });
    println!(
        "automaton states: {}, product states: {}",
        v.automaton_states, v.product_states
    );
    if let Some(cx) = &v.counterexample {
        println!("counterexample:");
        for (copy, t) in cx.copies.iter().zip(&cx.traces.traces) {
            println!("  {copy}: {}", LassoDisplay(t));
        }
    }
}

fn check(inst: &SynthesisInstance, bundle: &MachineBundle) -> Result<McVerdict, Failure> {
    let verdict = if inst.existential.is_empty() {
        mc_universal(&bundle.system, &inst.universal, &inst.body)
    } else {
        let gen = bundle
            .generator
            .as_ref()
            .ok_or_else(|| input_error("specification has existential traces but the machine file has no generator"))?;
        mc_exists_forall(&bundle.system, gen, &inst.universal, &inst.body)
    };
    verdict.map_err(input_error)
}

fn verify_cmd(machine: &Path, spec: &Path, args: &ReduceArgs) -> CmdResult {
    let bundle = MachineBundle::from_json(&read(machine)?).map_err(input_error)?;
    let inst = load_instance(spec, args)?;
    let v = check(&inst, &bundle)?;
    show_verdict(&v);
    Ok(if v.holds { OK } else { NEGATIVE })
}

fn solver_failure(e: SynthesisError) -> Failure {
    match e {
        SynthesisError::Solver(SolverError::Timeout) => Failure(SOLVER_FAILURE, "solver timed out".into()),
        SynthesisError::Automaton(e) => input_error(e),
        e => Failure(SOLVER_FAILURE, e.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn synth_cmd(
    spec: &Path,
    max_system: usize,
    max_exists: usize,
    lambda_max: Option<usize>,
    solver: &SolverArgs,
    reduce: &ReduceArgs,
    out: Option<&Path>,
    dot: Option<&Path>,
) -> CmdResult {
    if max_system == 0 || max_exists == 0 {
        return Err(input_error("bounds must be at least 1"));
    }
    let inst = load_instance(spec, reduce)?;
    let report = search(&inst, max_system, max_exists, lambda_max, &solver.config()).map_err(solver_failure)?;
    for a in &report.attempts {
        println!(
            "bounds ({}, {}): {} [{} vars, {} clauses, {:.2}s]",
            a.bounds.system,
            a.bounds.generator,
            if a.sat { "sat" } else { "unsat" },
            a.vars,
            a.clauses,
            a.seconds
        );
    }
    let Some((bounds, Outcome::Sat { system, generator })) = report.result else {
        println!("unrealizable within ({max_system}, {max_exists})");
        return Ok(NEGATIVE);
    };
    println!(
        "realized with {} system and {} generator states; verified",
        bounds.system, bounds.generator
    );
    let bundle = MachineBundle {
        system,
        generator: (!inst.existential.is_empty()).then_some(generator),
    };
    match out {
        Some(p) => write(p, &bundle.to_json())?,
        None => println!("{}", bundle.to_json()),
    }
    if let Some(p) = dot {
        write(p, &bundle.system.to_dot())?;
    }
    Ok(OK)
}

#[allow(clippy::too_many_arguments)]
fn bench_cmd(
    names: &[String],
    full_table: bool,
    max_system: usize,
    max_exists: usize,
    lambda_max: Option<usize>,
    solver: &SolverArgs,
    json: Option<&Path>,
    tsv: Option<&Path>,
) -> CmdResult {
    let selection = if names.is_empty() {
        BenchmarkInstance::catalog()
    } else {
        names
            .iter()
            .map(|n| BenchmarkInstance::from_name(n).ok_or_else(|| input_error(format!("unknown instance {n}"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let opts = SuiteOptions {
        max_system,
        max_generator: max_exists,
        lambda_max,
        full_table,
    };
    let report = run_suite(&selection, &opts, &solver.config());
    print!("{report}");
    if let Some(p) = json {
        write(p, &report.to_json())?;
    }
    match tsv {
        Some(p) => write(p, &report.to_tsv())?,
        None => print!("{}", report.to_tsv()),
    }
    if report.has_unverified() {
        return Err(Failure(
            SOLVER_FAILURE,
            "a decoded realization failed verification".into(),
        ));
    }
    Ok(if report.passed() { OK } else { NEGATIVE })
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Cmd::Classify { spec } => classify_cmd(spec),
        Cmd::Reduce { spec, args } => reduce_cmd(spec, args),
        Cmd::Synth {
            spec,
            max_system,
            max_exists,
            lambda_max,
            solver,
            reduce,
            out,
            dot,
        } => synth_cmd(
            spec,
            *max_system,
            *max_exists,
            *lambda_max,
            solver,
            reduce,
            out.as_deref(),
            dot.as_deref(),
        ),
        Cmd::Verify { machine, spec, reduce } => verify_cmd(machine, spec, reduce),
        Cmd::Bench {
            instances,
            full_table,
            max_system,
            max_exists,
            lambda_max,
            solver,
            json,
            tsv,
        } => bench_cmd(
            instances,
            *full_table,
            *max_system,
            *max_exists,
            *lambda_max,
            solver,
            json.as_deref(),
            tsv.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
