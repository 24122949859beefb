use std::collections::HashMap;

use super::graph;
use super::nba::{flat_name, ltl_to_nba_over, Nba};
use super::AutomatonError;
use crate::formula::{extract_prefix, Formula, FreshNames, Kind, QuantKind};
use crate::machine::{ExistGenerator, MachineError, MooreSystem};
use crate::reductions::build_consistency;
use crate::semantics::{bits_to_trace, Lasso, TraceSet};

/// `k` independent copies of `m` running side by side. Signal `s` of copy `j`
/// is named `s@j`, copies counted from 1.
pub fn self_composition(m: &MooreSystem, k: usize) -> Result<MooreSystem, MachineError> {
    let names: Vec<String> = (1..=k).map(|j| j.to_string()).collect();
    self_composition_named(m, &names)
}

/// [`self_composition`] with the given copy names.
pub fn self_composition_named(m: &MooreSystem, copies: &[String]) -> Result<MooreSystem, MachineError> {
    let k = copies.len();
    let (ni, no, n) = (m.inputs.len(), m.outputs.len(), m.states());
    if ni * k > 63 || no * k > 64 {
        return Err(MachineError::TooManySignals((ni + no) * k));
    }
    let rename = |sigs: &[String]| -> Vec<String> {
        copies
            .iter()
            .flat_map(|c| sigs.iter().map(move |s| flat_name(s, c)))
            .collect()
    };
    let states = n
        .checked_pow(k as u32)
        .filter(|&s| s <= 1 << 20)
        .ok_or(MachineError::Format(format!(
            "self-composition of {n} states {k} times is too large"
        )))?;
    let digits = |mut s: usize| -> Vec<usize> {
        (0..k)
            .map(|_| {
                let d = s % n;
                s /= n;
                d
            })
            .collect()
    };
    let mut next = Vec::with_capacity(states);
    let mut labels = Vec::with_capacity(states);
    for s in 0..states {
        let ds = digits(s);
        labels.push(
            ds.iter()
                .enumerate()
                .fold(0u64, |acc, (j, &d)| acc | m.labels[d] << (j * no)),
        );
        let row = (0..1usize << (ni * k))
            .map(|v| {
                ds.iter()
                    .enumerate()
                    .rev()
                    .fold(0, |acc, (j, &d)| acc * n + m.step(d, (v >> (j * ni)) & ((1 << ni) - 1)))
            })
            .collect();
        next.push(row);
    }
    let initial = (0..k).fold(0, |acc, _| acc * n + m.initial);
    MooreSystem::new(rename(&m.inputs), rename(&m.outputs), initial, next, labels)
}

/// Where a signal of the property automaton is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Source {
    /// Bit of the trace of a universal copy.
    Copy(usize, usize),
    /// Bit of a generator copy's label.
    Generator(usize, usize),
    Off,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductNode {
    pub systems: Vec<usize>,
    pub generator: usize,
    pub automaton: usize,
}

/// Reachable part of the product of universal copies of a system, an
/// existential generator and a property automaton. Edges carry the combined
/// input valuation of all copies.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    pub nodes: Vec<ProductNode>,
    pub edges: Vec<Vec<(u64, usize)>>,
    pub accepting: Vec<bool>,
}

/// A violating run: one trace per universal copy, then one per generator copy.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub copies: Vec<String>,
    pub inputs: Vec<Lasso<u64>>,
    pub traces: TraceSet,
}

#[derive(Clone, Debug)]
pub struct McVerdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    pub automaton_states: usize,
    pub product_states: usize,
}

struct Setup<'a> {
    m: &'a MooreSystem,
    generator: Option<&'a ExistGenerator>,
    universal: Vec<String>,
    nba: Nba,
    sources: Vec<Source>,
}

impl Setup<'_> {
    fn build(&self) -> Result<ProductGraph, AutomatonError> {
        let (ni, k) = (self.m.inputs.len(), self.universal.len());
        if ni * k > 20 {
            return Err(AutomatonError::TooLarge(format!("{} input bits per step", ni * k)));
        }
        let mask = (1u64 << ni) - 1;
        let gen_labels = |e: usize| -> &[u64] { self.generator.map_or(&[], |g| &g.labels[e][..]) };
        let mut index: HashMap<ProductNode, usize> = HashMap::new();
        let init = ProductNode {
            systems: vec![self.m.initial; k],
            generator: 0,
            automaton: self.nba.initial,
        };
        let mut g = ProductGraph {
            nodes: vec![init.clone()],
            edges: Vec::new(),
            accepting: Vec::new(),
        };
        index.insert(init, 0);
        let mut i = 0;
        while i < g.nodes.len() {
            let node = g.nodes[i].clone();
            g.accepting.push(self.nba.accepting[node.automaton]);
            let next_gen = self.generator.map_or(0, |e| e.successor(node.generator));
            let mut out = Vec::new();
            for v in 0..1u64 << (ni * k) {
                let trace_bits: Vec<u64> = (0..k)
                    .map(|j| (v >> (j * ni) & mask) | self.m.labels[node.systems[j]] << ni)
                    .collect();
                let gl = gen_labels(node.generator);
                let letter = self.sources.iter().enumerate().fold(0u64, |acc, (b, s)| {
                    let bit = match *s {
                        Source::Copy(j, x) => trace_bits[j] >> x & 1,
                        Source::Generator(c, x) => gl[c] >> x & 1,
                        Source::Off => 0,
                    };
                    acc | bit << b
                });
                let systems: Vec<usize> = (0..k)
                    .map(|j| self.m.step(node.systems[j], (v >> (j * ni) & mask) as usize))
                    .collect();
                for e in &self.nba.edges[node.automaton] {
                    if !e.guard.matches(letter) {
                        continue;
                    }
                    let target = ProductNode {
                        systems: systems.clone(),
                        generator: next_gen,
                        automaton: e.target,
                    };
                    let id = match index.get(&target) {
                        Some(&id) => id,
                        None => {
                            let id = g.nodes.len();
                            index.insert(target.clone(), id);
                            g.nodes.push(target);
                            id
                        }
                    };
                    out.push((v, id));
                }
            }
            g.edges.push(out);
            i += 1;
        }
        Ok(g)
    }

    fn run(&self) -> Result<McVerdict, AutomatonError> {
        let g = self.build()?;
        let succ: Vec<Vec<usize>> = g.edges.iter().map(|es| es.iter().map(|e| e.1).collect()).collect();
        let lasso = graph::accepting_lasso(&succ, &g.accepting, 0);
        Ok(McVerdict {
            holds: lasso.is_none(),
            counterexample: lasso.map(|(p, c)| self.counterexample(&g, &p, &c)),
            automaton_states: self.nba.states(),
            product_states: g.nodes.len(),
        })
    }

    fn counterexample(&self, g: &ProductGraph, prefix: &graph::Path, cycle: &graph::Path) -> Counterexample {
        let ni = self.m.inputs.len();
        let mask = (1u64 << ni) - 1;
        let signals = self.m.signals();
        let word = |steps: &graph::Path, f: &dyn Fn(&ProductNode, u64) -> u64| -> Vec<u64> {
            steps.iter().map(|&(n, e)| f(&g.nodes[n], g.edges[n][e].0)).collect()
        };
        let mut copies = self.universal.clone();
        let mut inputs = Vec::new();
        let mut traces = Vec::new();
        for j in 0..self.universal.len() {
            let inp = |_: &ProductNode, v: u64| v >> (j * ni) & mask;
            let tr = |n: &ProductNode, v: u64| (v >> (j * ni) & mask) | self.m.labels[n.systems[j]] << ni;
            inputs.push(Lasso::new(word(prefix, &inp), word(cycle, &inp)).expect("cycle"));
            let t = Lasso::new(word(prefix, &tr), word(cycle, &tr)).expect("cycle");
            traces.push(bits_to_trace(&t, &signals));
        }
        if let Some(gen) = self.generator {
            for (c, name) in gen.copies.iter().enumerate() {
                let lab = |n: &ProductNode, _: u64| gen.labels[n.generator][c];
                let t = Lasso::new(word(prefix, &lab), word(cycle, &lab)).expect("cycle");
                copies.push(name.clone());
                traces.push(bits_to_trace(&t, &gen.signals));
            }
        }
        Counterexample {
            copies,
            inputs,
            traces: TraceSet { signals, traces },
        }
    }
}

/// Flattened signals of `body` and where each is read from: a universal copy
/// of a system with `system_signals`, or a copy of a generator.
pub(crate) fn resolve_sources(
    body: &Formula,
    universal: &[String],
    system_signals: &[String],
    gen_copies: &[String],
    gen_signals: &[String],
) -> Result<(Vec<String>, Vec<Source>), AutomatonError> {
    let mut signals = Vec::new();
    let mut sources = Vec::new();
    let mut err = None;
    body.walk(&mut |f| {
        let (name, source) = match &f.kind {
            Kind::TraceAtom { prop, trace } => {
                let source = if let Some(j) = universal.iter().position(|u| u == trace) {
                    system_signals
                        .iter()
                        .position(|s| s == prop)
                        .map(|x| Source::Copy(j, x))
                } else if let Some(c) = gen_copies.iter().position(|g| g == trace) {
                    Some(
                        gen_signals
                            .iter()
                            .position(|s| s == prop)
                            .map_or(Source::Off, |x| Source::Generator(c, x)),
                    )
                } else {
                    err.get_or_insert(AutomatonError::UnboundTrace(trace.clone()));
                    return;
                };
                match source {
                    Some(s) => (flat_name(prop, trace), s),
                    None => {
                        err.get_or_insert(AutomatonError::UnknownSignal(prop.clone()));
                        return;
                    }
                }
            }
            Kind::PropAtom(v) => {
                err.get_or_insert(AutomatonError::UnknownSignal(v.clone()));
                return;
            }
            _ => return,
        };
        if !signals.contains(&name) {
            signals.push(name);
            sources.push(source);
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok((signals, sources)),
    }
}

fn setup<'a>(
    m: &'a MooreSystem,
    generator: Option<&'a ExistGenerator>,
    universal: &[String],
    body: &Formula,
) -> Result<Setup<'a>, AutomatonError> {
    let (copies, gen_signals) = generator.map_or((&[][..], &[][..]), |g| (&g.copies[..], &g.signals[..]));
    let (signals, sources) = resolve_sources(body, universal, &m.signals(), copies, gen_signals)?;
    let nba = ltl_to_nba_over(&Formula::not(body.clone()), &signals)?;
    Ok(Setup {
        m,
        generator,
        universal: universal.to_vec(),
        nba,
        sources,
    })
}

/// Checks `∀π_1 … ∀π_k. body` on `m`, where `copies` names the universal
/// trace variables. Builds the product of `k` copies of `m` with an automaton
/// for the negated body; the property holds iff no accepting cycle is
/// reachable.
pub fn mc_universal(m: &MooreSystem, copies: &[String], body: &Formula) -> Result<McVerdict, AutomatonError> {
    setup(m, None, copies, body)?.run()
}

/// Checks `∃π'_1 … ∃π'_n ∀π_1 … ∀π_k. body` on `m` with the existential traces
/// fixed to the lassos of `gen`, and requires every generated trace to be a
/// trace of `m`.
pub fn mc_exists_forall(
    m: &MooreSystem,
    gen: &ExistGenerator,
    universal: &[String],
    body: &Formula,
) -> Result<McVerdict, AutomatonError> {
    if gen.copies.is_empty() {
        return mc_universal(m, universal, body);
    }
    let msig = m.signals();
    if gen.signals.len() != msig.len() || msig.iter().any(|s| !gen.signals.contains(s)) {
        return Err(AutomatonError::GeneratorSignals {
            expected: msig,
            found: gen.signals.clone(),
        });
    }
    let mut universal = universal.to_vec();
    if universal.is_empty() {
        let mut fresh = FreshNames::for_formula(body);
        for c in &gen.copies {
            fresh.reserve(c.clone());
        }
        universal.push(fresh.fresh("pi"));
    }
    let body = Formula::and(
        body.clone(),
        build_consistency(&gen.copies, &universal[0], &m.inputs, &m.outputs),
    );
    setup(m, Some(gen), &universal, &body)?.run()
}

/// Model checks a closed prenex `∃*π ∀*π` formula, taking the existential
/// traces from `gen`.
pub fn model_check(m: &MooreSystem, gen: Option<&ExistGenerator>, f: &Formula) -> Result<McVerdict, AutomatonError> {
    let (prefix, body) = extract_prefix(f).map_err(|e| AutomatonError::Shape(e.to_string()))?;
    let kinds = prefix.kinds();
    if kinds.iter().any(|k| !k.is_trace()) {
        return Err(AutomatonError::Shape(
            "propositional quantifiers must be reduced before model checking".into(),
        ));
    }
    let split = kinds
        .iter()
        .position(|&k| k == QuantKind::TraceForall)
        .unwrap_or(kinds.len());
    if kinds[split..].contains(&QuantKind::TraceExists) {
        return Err(AutomatonError::Shape("prefix is not of the form ∃*π ∀*π".into()));
    }
    let existential: Vec<String> = prefix.entries[..split].iter().map(|e| e.var.clone()).collect();
    let universal: Vec<String> = prefix.entries[split..].iter().map(|e| e.var.clone()).collect();
    if existential.is_empty() {
        return mc_universal(m, &universal, &body);
    }
    let gen = gen.ok_or(AutomatonError::Shape("existential traces need a generator".into()))?;
    if let Some(v) = existential.iter().find(|v| gen.copy_index(v).is_none()) {
        return Err(AutomatonError::UnboundTrace(v.clone()));
    }
    mc_exists_forall(m, gen, &universal, &body)
}
