//! The prompt-arbiter benchmark family and a regression harness over it.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::time::Instant;

use serde::Serialize;

use crate::formula::{Formula, SpecDocument};
use crate::fragments::FragmentClass;
use crate::synthesis::{
    bound_order, prepare, solve, Bounds, Outcome, PrepareOptions, SolverConfig, SolverError, SynthesisError,
};

fn r(i: usize) -> Formula {
    Formula::trace_atom(format!("r{i}"), "pi")
}

fn g(i: usize) -> Formula {
    Formula::trace_atom(format!("g{i}"), "pi")
}

/// Arbiter for clients `1..=k`: pairwise mutual exclusion, eventual service for
/// clients outside `prompt`, service within two color changes of one shared
/// alternating `q` for clients in `prompt`, and no spurious grants if `full`.
pub fn gen_arbiter(k: usize, prompt: &BTreeSet<usize>, full: bool) -> SpecDocument {
    assert!(k >= 1, "an arbiter needs a client");
    assert!(
        prompt.iter().all(|&p| (1..=k).contains(&p)),
        "prompt clients out of range"
    );
    let mut conj = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            conj.push(Formula::globally(Formula::not(Formula::and(g(i), g(j)))));
        }
    }
    for i in (1..=k).filter(|i| !prompt.contains(i)) {
        conj.push(Formula::globally(Formula::implies(r(i), Formula::eventually(g(i)))));
    }
    let q = || Formula::prop("q");
    let nq = || Formula::not(Formula::prop("q"));
    if !prompt.is_empty() {
        conj.push(Formula::globally(Formula::eventually(q())));
        conj.push(Formula::globally(Formula::eventually(nq())));
        for &p in prompt {
            let on = Formula::implies(q(), Formula::until(q(), Formula::until(nq(), g(p))));
            let off = Formula::implies(nq(), Formula::until(nq(), Formula::until(q(), g(p))));
            conj.push(Formula::globally(Formula::implies(r(p), Formula::and(on, off))));
        }
    }
    if full {
        for i in 1..=k {
            conj.push(Formula::weak_until(Formula::not(g(i)), r(i)));
        }
    }
    let mut f = Formula::forall_trace("pi", Formula::and_all(conj));
    if !prompt.is_empty() {
        f = Formula::exists_prop("q", f);
    }
    SpecDocument::new(
        (1..=k).map(|i| format!("r{i}")).collect(),
        (1..=k).map(|i| format!("g{i}")).collect(),
        f,
    )
}

/// A named member of the arbiter family with any known verdicts.
#[derive(Clone, Debug)]
pub struct BenchmarkInstance {
    pub name: String,
    pub clients: usize,
    pub prompt: BTreeSet<usize>,
    pub full: bool,
    pub spec: SpecDocument,
    /// `((system, generator), realizable)`.
    pub expected: Vec<((usize, usize), bool)>,
    /// Known to be slow; failures are reported but do not fail a suite.
    pub optional: bool,
}

impl BenchmarkInstance {
    /// `arbiter-k`, `arbiter-k-prompt` or `arbiter-k-full-prompt`; prompt
    /// instances ask for promptness of client 1.
    pub fn from_name(name: &str) -> Option<BenchmarkInstance> {
        let rest = name.strip_prefix("arbiter-")?;
        let (k, tail) = rest.split_once('-').unwrap_or((rest, ""));
        let k: usize = k.parse().ok().filter(|&k| k >= 1)?;
        let (prompt, full) = match tail {
            "" => (BTreeSet::new(), false),
            "prompt" => (BTreeSet::from([1]), false),
            "full-prompt" => (BTreeSet::from([1]), true),
            _ => return None,
        };
        let expected = match (k, full, prompt.is_empty()) {
            (2, false, false) => vec![((2, 1), false), ((2, 2), true)],
            (2, true, false) => vec![((3, 1), false), ((3, 2), true)],
            (3, false, false) => vec![((3, 1), false), ((3, 2), true)],
            (4, false, false) => vec![((4, 1), false)],
            _ => vec![],
        };
        Some(BenchmarkInstance {
            name: name.to_string(),
            clients: k,
            spec: gen_arbiter(k, &prompt, full),
            prompt,
            full,
            expected,
            optional: k >= 4,
        })
    }

    /// The instances with published verdicts.
    pub fn catalog() -> Vec<BenchmarkInstance> {
        [
            "arbiter-2-prompt",
            "arbiter-2-full-prompt",
            "arbiter-3-prompt",
            "arbiter-4-prompt",
        ]
        .iter()
        .map(|n| BenchmarkInstance::from_name(n).expect("catalog names parse"))
        .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowVerdict {
    Sat,
    Unsat,
    Timeout,
    Error,
}

impl fmt::Display for RowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowVerdict::Sat => "sat",
            RowVerdict::Unsat => "unsat",
            RowVerdict::Timeout => "timeout",
            RowVerdict::Error => "error",
        })
    }
}

/// One bound pair of one instance.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub system: usize,
    pub generator: usize,
    pub verdict: RowVerdict,
    /// Set for SAT rows: whether the decoded pair passed model checking.
    pub verified: Option<bool>,
    pub vars: u32,
    pub clauses: usize,
    pub seconds: f64,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub name: String,
    pub class: Option<FragmentClass>,
    pub reduction: Vec<String>,
    pub rows: Vec<Row>,
    /// Published verdicts not reproduced, as `(system, generator)`: a
    /// realization at the bound or within [`slack_region`] is required for a
    /// published one, no realization at the bound for a published failure.
    pub mismatches: Vec<(usize, usize)>,
    pub optional: bool,
    pub error: Option<String>,
    pub seconds: f64,
}

impl InstanceReport {
    pub fn first_sat(&self) -> Option<(usize, usize)> {
        self.rows
            .iter()
            .find(|r| r.verdict == RowVerdict::Sat)
            .map(|r| (r.system, r.generator))
    }

    pub fn verdict_at(&self, n: usize, m: usize) -> Option<RowVerdict> {
        self.rows
            .iter()
            .find(|r| (r.system, r.generator) == (n, m))
            .map(|r| r.verdict)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub max_system: usize,
    pub max_generator: usize,
    pub lambda_max: Option<usize>,
    /// Solve every bound pair instead of stopping at the first realization.
    pub full_table: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_system: 3,
            max_generator: 3,
            lambda_max: None,
            full_table: false,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub instances: Vec<InstanceReport>,
}

fn row(bounds: Bounds, result: Result<(Outcome, crate::synthesis::Attempt), SynthesisError>, start: Instant) -> Row {
    let blank = |verdict, verified, detail: String| Row {
        system: bounds.system,
        generator: bounds.generator,
        verdict,
        verified,
        vars: 0,
        clauses: 0,
        seconds: start.elapsed().as_secs_f64(),
        detail: Some(detail),
    };
    match result {
        Ok((outcome, a)) => Row {
            system: a.bounds.system,
            generator: a.bounds.generator,
            verdict: if outcome.is_sat() {
                RowVerdict::Sat
            } else {
                RowVerdict::Unsat
            },
            verified: outcome.is_sat().then_some(true),
            vars: a.vars,
            clauses: a.clauses,
            seconds: a.seconds,
            detail: None,
        },
        Err(e @ SynthesisError::Verification { .. }) => blank(RowVerdict::Sat, Some(false), e.to_string()),
        Err(SynthesisError::Solver(SolverError::Timeout)) => {
            blank(RowVerdict::Timeout, None, "solver timed out".into())
        }
        Err(e) => blank(RowVerdict::Error, None, e.to_string()),
    }
}

/// Bound pairs accepted as reproducing a published realization at `(n, m)`:
/// one extra state for the system and for the generator, which here emits
/// every signal as a Moore machine.
pub fn slack_region((n, m): (usize, usize)) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 1..=n + 1 {
        for b in 1..=m + 1 {
            out.push((a, b));
        }
    }
    out
}

/// Whether a published verdict is still undecided by the rows so far.
fn pending(inst: &BenchmarkInstance, report: &InstanceReport, max_m: usize) -> bool {
    inst.expected.iter().any(|&(p, sat)| {
        if sat {
            let region = slack_region(p);
            let found = region
                .iter()
                .any(|&(a, b)| report.verdict_at(a, b) == Some(RowVerdict::Sat));
            !found
                && region
                    .iter()
                    .any(|&(a, b)| b <= max_m && report.verdict_at(a, b).is_none())
        } else {
            p.1 <= max_m && report.verdict_at(p.0, p.1).is_none()
        }
    })
}

/// Runs one instance over the bound pairs in search order.
pub fn run_instance(inst: &BenchmarkInstance, opts: &SuiteOptions, config: &SolverConfig) -> InstanceReport {
    let start = Instant::now();
    let mut report = InstanceReport {
        name: inst.name.clone(),
        class: None,
        reduction: vec![],
        rows: vec![],
        mismatches: vec![],
        optional: inst.optional,
        error: None,
        seconds: 0.0,
    };
    let prepared = match prepare(&inst.spec, &PrepareOptions::default()) {
        Ok(p) => p,
        Err(e) => {
            report.error = Some(e.to_string());
            report.seconds = start.elapsed().as_secs_f64();
            return report;
        }
    };
    report.class = Some(prepared.verdict.class);
    report.reduction = prepared.trace.rules().iter().map(|s| s.to_string()).collect();
    let max_m = if prepared.existential.is_empty() {
        1
    } else {
        opts.max_generator
    };
    let mut pairs = bound_order(opts.max_system, max_m);
    // Published bounds and their slack neighbours are always tried.
    for &(p, sat) in &inst.expected {
        let extra = if sat { slack_region(p) } else { vec![p] };
        for q in extra {
            if q.1 <= max_m && !pairs.contains(&q) {
                pairs.push(q);
            }
        }
    }
    for (n, m) in pairs {
        let bounds = Bounds {
            system: n,
            generator: m,
            lambda_max: opts.lambda_max,
        };
        let t = Instant::now();
        let row = row(bounds, solve(&prepared, bounds, config), t);
        let sat = row.verdict == RowVerdict::Sat;
        report.rows.push(row);
        if sat && !opts.full_table && !pending(inst, &report, max_m) {
            break;
        }
    }
    for &((n, m), expected) in &inst.expected {
        let ok = if expected {
            slack_region((n, m))
                .iter()
                .any(|&(a, b)| report.verdict_at(a, b) == Some(RowVerdict::Sat))
        } else {
            report.verdict_at(n, m) != Some(RowVerdict::Sat)
        };
        if !ok {
            report.mismatches.push((n, m));
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

/// Runs the selection in name order.
pub fn run_suite(selection: &[BenchmarkInstance], opts: &SuiteOptions, config: &SolverConfig) -> SuiteReport {
    let mut sorted: Vec<&BenchmarkInstance> = selection.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    SuiteReport {
        instances: sorted.into_iter().map(|i| run_instance(i, opts, config)).collect(),
    }
}

impl SuiteReport {
    /// No SAT row failed verification, and required instances ran without
    /// errors and agree with the published verdicts.
    pub fn passed(&self) -> bool {
        self.instances.iter().all(|i| {
            let unverified = i.rows.iter().any(|r| r.verified == Some(false));
            let broken =
                i.error.is_some() || !i.mismatches.is_empty() || i.rows.iter().any(|r| r.verdict == RowVerdict::Error);
            !unverified && (i.optional || !broken)
        })
    }

    pub fn has_unverified(&self) -> bool {
        self.instances
            .iter()
            .flat_map(|i| &i.rows)
            .any(|r| r.verified == Some(false))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Tab-separated, one row per bound pair.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("instance\tsystem\tgenerator\tresult\tverified\tvars\tclauses\tseconds\n");
        for i in &self.instances {
            for r in &i.rows {
                let verified = r.verified.map_or("-".to_string(), |v| v.to_string());
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
                    i.name, r.system, r.generator, r.verdict, verified, r.vars, r.clauses, r.seconds
                );
            }
        }
        out
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instances {
            let class = i.class.map_or("-".to_string(), |c| c.to_string());
            writeln!(
                f,
                "{}  [{}]{}",
                i.name,
                class,
                if i.optional { " (optional)" } else { "" }
            )?;
            if !i.reduction.is_empty() {
                writeln!(f, "  reduction: {}", i.reduction.join(", "))?;
            }
            if let Some(e) = &i.error {
                writeln!(f, "  error: {e}")?;
            }
            writeln!(
                f,
                "  {:>6} {:>9} {:>8} {:>8} {:>8} {:>9} {:>8}",
                "system", "generator", "result", "verified", "vars", "clauses", "seconds"
            )?;
            for r in &i.rows {
                let verified = r
                    .verified
                    .map_or("-".to_string(), |v| if v { "yes".into() } else { "NO".into() });
                writeln!(
                    f,
                    "  {:>6} {:>9} {:>8} {:>8} {:>8} {:>9} {:>8.2}",
                    r.system,
                    r.generator,
                    r.verdict.to_string(),
                    verified,
                    r.vars,
                    r.clauses,
                    r.seconds
                )?;
                if let Some(d) = &r.detail {
                    writeln!(f, "         {d}")?;
                }
            }
            for (n, m) in &i.mismatches {
                writeln!(f, "  mismatch with published verdict at ({n}, {m})")?;
            }
            writeln!(f, "  total {:.2}s", i.seconds)?;
        }
        Ok(())
    }
}
