use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const HQPTL: &str = env!("CARGO_BIN_EXE_hqptl");
const SAT: &str = env!("CARGO_BIN_EXE_hqptl-sat");

const RESPONSE: &str = "inputs: i\noutputs: o\nforall pi:trace. G (i[pi] -> X o[pi])\n";
const DELAY: &str = "inputs: i\noutputs: o\nforall pi:trace. G (i[pi] <-> X o[pi])\n";
const CLAIRVOYANT: &str = "inputs: i\noutputs: o\nforall pi:trace. G (o[pi] <-> X i[pi])\n";
const PROMPT: &str = "inputs: i\noutputs: o\nexists q:prop. forall pi:trace. G F q & G (i[pi] -> (!q) U o[pi])\n";

struct Workspace(TempDir);

impl Workspace {
    fn new() -> Self {
        Workspace(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn hqptl(args: &[&str]) -> Command {
    let mut c = Command::new(HQPTL);
    c.args(args).env_remove("HQPTL_SOLVER");
    c
}

fn sat_solver(file: &Path) -> Command {
    let mut c = Command::new(SAT);
    c.arg(file);
    c
}

fn run(mut c: Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = c.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_reports_the_fragment() {
    let w = Workspace::new();
    let (code, out, _) = run(hqptl(&["classify", s(&w.file("p.hq", PROMPT))]));
    assert_eq!(code, 0);
    assert!(out.contains("class: SingleUniversalDecidable"), "{out}");
    assert!(out.contains("decidable: true"));
    let alt = w.file(
        "alt.hq",
        "inputs: i\noutputs: o\nforall pi:trace. exists rho:trace. G (o[pi] <-> o[rho])\n",
    );
    let (code, out, _) = run(hqptl(&["classify", s(&alt)]));
    assert_eq!(code, 0);
    assert!(out.contains("class: Undecidable_TraceForallExists"), "{out}");
}

#[test]
fn classify_reads_standard_input() {
    let mut child = hqptl(&["classify", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(RESPONSE.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("SingleUniversalDecidable"));
}

#[test]
fn reduce_replaces_propositional_quantifiers() {
    let w = Workspace::new();
    let (code, out, _) = run(hqptl(&["reduce", s(&w.file("p.hq", PROMPT))]));
    assert_eq!(code, 0);
    let result = out.lines().find(|l| l.starts_with("result: ")).expect("result line");
    assert!(!result.contains(":prop"), "{result}");
    assert!(result.contains(":trace"), "{result}");
    let (code, _, err) = run(hqptl(&[
        "reduce",
        s(&w.file("p.hq", PROMPT)),
        "--designated-input",
        "o",
    ]));
    assert_eq!(code, 2, "{err}");
}

#[test]
fn input_errors_exit_with_two() {
    let w = Workspace::new();
    let bad = w.file("bad.hq", "inputs: i\noutputs: o\nforall pi:trace. G (i[pi] ->\n");
    for args in [
        vec!["classify", s(&bad)],
        vec!["synth", s(&bad), "--max-system", "1", "--max-exists", "1"],
        vec!["classify", "/definitely/missing.hq"],
        vec!["bench", "--instance", "arbiter-0-nonsense"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = run(hqptl(&args));
        assert_eq!(code, 2, "{args:?}: {err}");
    }
    let alt = w.file(
        "alt.hq",
        "inputs: i\noutputs: o\nforall pi:trace. exists rho:trace. G (o[pi] <-> o[rho])\n",
    );
    let (code, _, err) = run(hqptl(&["synth", s(&alt), "--max-system", "1", "--max-exists", "1"]));
    assert_eq!(code, 2, "undecidable prefixes need --force: {err}");
}

#[test]
fn synth_then_verify_round_trips() {
    let w = Workspace::new();
    let spec = w.file("d.hq", DELAY);
    let machine = w.path("m.json");
    let dot = w.path("m.dot");
    let (code, out, err) = run(hqptl(&[
        "synth",
        s(&spec),
        "--max-system",
        "2",
        "--max-exists",
        "1",
        "--backend",
        "internal",
        "--out",
        s(&machine),
        "--dot",
        s(&dot),
    ]));
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("bounds (1, 1): unsat"), "{out}");
    assert!(out.contains("bounds (2, 1): sat"), "{out}");
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let (code, out, _) = run(hqptl(&["verify", s(&machine), s(&spec)]));
    assert_eq!((code, out.lines().next()), (0, Some("holds")));
    let (code, out, _) = run(hqptl(&["verify", s(&machine), s(&w.file("c.hq", CLAIRVOYANT))]));
    assert_eq!(code, 1);
    assert!(out.starts_with("violated") && out.contains("counterexample"), "{out}");
}

#[test]
fn synth_with_an_existential_copy_writes_a_generator() {
    let w = Workspace::new();
    let spec = w.file("p.hq", PROMPT);
    let machine = w.path("m.json");
    let (code, out, err) = run(hqptl(&[
        "synth",
        s(&spec),
        "--max-system",
        "2",
        "--max-exists",
        "2",
        "--out",
        s(&machine),
    ]));
    assert_eq!(code, 0, "{out}{err}");
    assert!(std::fs::read_to_string(&machine).unwrap().contains("generator"));
    let (code, out, _) = run(hqptl(&["verify", s(&machine), s(&spec)]));
    assert_eq!(code, 0, "{out}");
}

#[test]
fn unrealizable_within_bounds_exits_with_one() {
    let w = Workspace::new();
    let (code, out, _) = run(hqptl(&[
        "synth",
        s(&w.file("c.hq", CLAIRVOYANT)),
        "--max-system",
        "2",
        "--max-exists",
        "1",
    ]));
    assert_eq!(code, 1);
    assert!(out.contains("unrealizable within (2, 1)"), "{out}");
}

#[test]
fn external_dimacs_solver_is_used() {
    let w = Workspace::new();
    let spec = w.file("r.hq", RESPONSE);
    let args = |backend: &'static str, solver: &str| {
        vec![
            "synth".to_string(),
            s(&spec).to_string(),
            "--max-system".into(),
            "2".into(),
            "--max-exists".into(),
            "1".into(),
            "--backend".into(),
            backend.into(),
            "--solver".into(),
            solver.to_string(),
        ]
    };
    let a = args("dimacs", SAT);
    let (code, out, err) = run(hqptl(&a.iter().map(String::as_str).collect::<Vec<_>>()));
    assert_eq!(code, 0, "{out}{err}");
    let a = args("dimacs", "/definitely/missing-solver");
    let (code, _, err) = run(hqptl(&a.iter().map(String::as_str).collect::<Vec<_>>()));
    assert_eq!(code, 3, "{err}");
}

#[test]
fn solver_variable_selects_the_default_solver() {
    let w = Workspace::new();
    let spec = w.file("r.hq", RESPONSE);
    let base = ["synth", s(&spec), "--max-system", "2", "--max-exists", "1"];
    let mut c = hqptl(&base);
    c.env("HQPTL_SOLVER", SAT);
    let (code, out, err) = run(c);
    assert_eq!(code, 0, "{out}{err}");
    let mut c = hqptl(&base);
    c.env("HQPTL_SOLVER", "/definitely/missing-solver");
    let (code, _, err) = run(c);
    assert_eq!(code, 3, "the variable must be honored: {err}");
}

#[test]
fn smtlib_backend_without_a_solver_is_a_solver_failure() {
    let w = Workspace::new();
    let spec = w.file("r.hq", RESPONSE);
    let (code, _, err) = run(hqptl(&[
        "synth",
        s(&spec),
        "--max-system",
        "1",
        "--max-exists",
        "1",
        "--backend",
        "smtlib",
        "--solver",
        "/definitely/missing-solver",
    ]));
    assert_eq!(code, 3, "{err}");
}

#[test]
fn bench_writes_text_and_tables() {
    let w = Workspace::new();
    let json = w.path("r.json");
    let tsv = w.path("r.tsv");
    let (code, out, err) = run(hqptl(&[
        "bench",
        "--instance",
        "arbiter-1",
        "--max-system",
        "2",
        "--max-exists",
        "1",
        "--json",
        s(&json),
        "--tsv",
        s(&tsv),
    ]));
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("arbiter-1"), "{out}");
    let json = std::fs::read_to_string(&json).unwrap();
    assert!(
        json.trim_start().starts_with('{') && json.contains("\"arbiter-1\""),
        "{json}"
    );
    let tsv = std::fs::read_to_string(&tsv).unwrap();
    assert!(
        tsv.lines().count() >= 2 && tsv.lines().all(|l| l.contains('\t')),
        "{tsv}"
    );
}

#[test]
fn bundled_solver_speaks_dimacs() {
    let w = Workspace::new();
    let sat = w.file("sat.cnf", "c tiny\np cnf 2 2\n1 2 0\n-1 0\n");
    let (code, out, _) = run(sat_solver(&sat));
    assert_eq!(code, 10);
    assert!(out.contains("s SATISFIABLE") && out.contains("v -1 2 0"), "{out}");
    let unsat = w.file("unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let (code, out, _) = run(sat_solver(&unsat));
    assert_eq!(code, 20);
    assert!(out.contains("s UNSATISFIABLE"));
    let bad = w.file("bad.cnf", "p cnf 1 1\n1 x 0\n");
    assert_eq!(run(sat_solver(&bad)).0, 2);
}
