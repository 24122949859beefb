use std::collections::HashMap;

use super::cnf::Cnf;
use super::prepare::SynthesisInstance;
use crate::automata::graph::sccs;
use crate::automata::mc::{resolve_sources, Source};
use crate::automata::{ltl_to_nba_over, AutomatonError};
use crate::formula::Formula;
use crate::machine::{ExistGenerator, MooreSystem};

/// Size bounds of one synthesis query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// States of the system.
    pub system: usize,
    /// States of the existential generator.
    pub generator: usize,
    /// Overrides the annotation bound of every automaton component.
    pub lambda_max: Option<usize>,
}

impl Bounds {
    pub fn new(system: usize, generator: usize) -> Self {
        Bounds {
            system,
            generator,
            lambda_max: None,
        }
    }
}

/// Product node key: system state per universal copy, generator state and
/// automaton state.
pub type NodeKey = (Vec<usize>, usize, usize);

/// The rank bound of every product node that got one, for a model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotation {
    /// `(node, Some(rank))` for reachable ranked nodes, `None` for reachable
    /// nodes outside ranked components.
    pub entries: Vec<(NodeKey, Option<usize>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Lit {
    True,
    False,
    Var(i32),
}

/// Propositional constraints whose models are bounded realizations, and the
/// map back from variables to machines.
#[derive(Clone, Debug)]
pub struct ConstraintProblem {
    pub cnf: Cnf,
    pub bounds: Bounds,
    pub automaton_states: usize,
    pub product_nodes: usize,
    inputs: Vec<String>,
    outputs: Vec<String>,
    copies: Vec<String>,
    /// `tau[(s * valuations + v) * n + t]`
    tau: Vec<Lit>,
    /// `lam[s * |O| + o]`
    lam: Vec<i32>,
    /// `gam[(e * copies + c) * |I ∪ O| + x]`
    gam: Vec<i32>,
    loop_target: Vec<Lit>,
    reach: Vec<(NodeKey, i32)>,
    ranks: HashMap<NodeKey, Vec<i32>>,
}

struct Encoder<'a> {
    cnf: Cnf,
    n: usize,
    ni: usize,
    no: usize,
    sources: &'a [Source],
    tau: Vec<Lit>,
    lam: Vec<i32>,
    gam: Vec<i32>,
    loop_target: Vec<Lit>,
    nsig: usize,
    copies: usize,
}

impl Encoder<'_> {
    fn tau(&self, s: usize, v: usize, t: usize) -> Lit {
        self.tau[(s * (1 << self.ni) + v) * self.n + t]
    }

    /// The literal of automaton signal `b` at a product node under inputs `v`.
    fn signal(&self, b: usize, systems: &[usize], e: usize, v: usize) -> Lit {
        match self.sources[b] {
            Source::Copy(j, x) if x < self.ni => {
                if v >> (j * self.ni + x) & 1 == 1 {
                    Lit::True
                } else {
                    Lit::False
                }
            }
            Source::Copy(j, x) => Lit::Var(self.lam[systems[j] * self.no + x - self.ni]),
            Source::Generator(c, x) => Lit::Var(self.gam[(e * self.copies + c) * self.nsig + x]),
            Source::Off => Lit::False,
        }
    }

    fn exactly_one(&mut self, lits: &[Lit]) {
        let vars: Vec<i32> = lits
            .iter()
            .filter_map(|l| match l {
                Lit::Var(v) => Some(*v),
                _ => None,
            })
            .collect();
        if vars.is_empty() {
            return;
        }
        self.cnf.add(&vars);
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                self.cnf.add(&[-vars[i], -vars[j]]);
            }
        }
    }
}

/// Encodes the existence of an `n`-state system and an `m`-state generator
/// whose product with the automaton for the negated constrained body admits a
/// bounded annotation: every automaton component with an accepting cycle gets
/// ranks in `0..=λ_C`, non-decreasing along edges and increasing into accepting
/// states, with `λ_C = n^k · m · |F ∩ C|` unless overridden.
pub fn encode(inst: &SynthesisInstance, bounds: Bounds) -> Result<ConstraintProblem, AutomatonError> {
    let (n, m) = (bounds.system.max(1), bounds.generator.max(1));
    let signals = inst.signals();
    let (ni, no, k) = (inst.inputs.len(), inst.outputs.len(), inst.universal.len());
    if ni * k > 16 {
        return Err(AutomatonError::TooLarge(format!("{} input bits per step", ni * k)));
    }
    let (flat, sources) = resolve_sources(
        &inst.constrained_body,
        &inst.universal,
        &signals,
        &inst.existential,
        &signals,
    )?;
    let nba = ltl_to_nba_over(&Formula::not(inst.constrained_body.clone()), &flat)?;

    // Ranked components of the automaton.
    let succ: Vec<Vec<usize>> = nba
        .edges
        .iter()
        .map(|es| es.iter().map(|e| e.target).collect())
        .collect();
    let comp = sccs(&succ);
    let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut size = vec![0usize; ncomp];
    let mut finals = vec![0usize; ncomp];
    for q in 0..nba.states() {
        size[comp[q]] += 1;
        if nba.accepting[q] {
            finals[comp[q]] += 1;
        }
    }
    let cyclic = |q: usize| size[comp[q]] > 1 || succ[q].contains(&q);
    let tuples = n.pow(k as u32);
    let lambda: Vec<usize> = (0..ncomp)
        .map(|c| bounds.lambda_max.unwrap_or(tuples * m * finals[c]))
        .collect();
    let ranked = |q: usize| cyclic(q) && finals[comp[q]] > 0;

    let mut cnf = Cnf::new();
    let valuations = 1usize << ni;
    let mut tau = Vec::with_capacity(n * valuations * n);
    for _ in 0..n * valuations {
        for _ in 0..n {
            tau.push(if n == 1 { Lit::True } else { Lit::Var(cnf.new_var()) });
        }
    }
    let lam: Vec<i32> = (0..n * no).map(|_| cnf.new_var()).collect();
    let copies = inst.existential.len();
    let gam: Vec<i32> = (0..m * copies * signals.len()).map(|_| cnf.new_var()).collect();
    let loop_target: Vec<Lit> = (0..m)
        .map(|_| if m == 1 { Lit::True } else { Lit::Var(cnf.new_var()) })
        .collect();
    let mut enc = Encoder {
        cnf,
        n,
        ni,
        no,
        sources: &sources,
        tau,
        lam,
        gam,
        loop_target,
        nsig: signals.len(),
        copies,
    };
    for sv in 0..n * valuations {
        let row = enc.tau[sv * n..(sv + 1) * n].to_vec();
        enc.exactly_one(&row);
    }
    let lt = enc.loop_target.clone();
    enc.exactly_one(&lt);

    // Reachability and ranks over the product.
    let mut index: HashMap<NodeKey, usize> = HashMap::new();
    let mut nodes: Vec<NodeKey> = Vec::new();
    let mut reach: Vec<i32> = Vec::new();
    let mut ranks: HashMap<NodeKey, Vec<i32>> = HashMap::new();
    let mut node_id = |key: NodeKey,
                       enc: &mut Encoder,
                       nodes: &mut Vec<NodeKey>,
                       reach: &mut Vec<i32>,
                       ranks: &mut HashMap<NodeKey, Vec<i32>>|
     -> usize {
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let r = enc.cnf.new_var();
        if ranked(key.2) {
            let l = lambda[comp[key.2]];
            let bits: Vec<i32> = (0..l).map(|_| enc.cnf.new_var()).collect();
            for w in bits.windows(2) {
                enc.cnf.add(&[-w[1], w[0]]);
            }
            ranks.insert(key.clone(), bits);
        }
        index.insert(key.clone(), nodes.len());
        nodes.push(key);
        reach.push(r);
        nodes.len() - 1
    };
    let init = node_id(
        (vec![0; k], 0, nba.initial),
        &mut enc,
        &mut nodes,
        &mut reach,
        &mut ranks,
    );
    enc.cnf.add(&[reach[init]]);
    let mut i = 0;
    let mut clause: Vec<i32> = Vec::new();
    while i < nodes.len() {
        let (systems, e, q) = nodes[i].clone();
        let r = reach[i];
        let gen_next: Vec<(usize, Lit)> = if e + 1 < m {
            vec![(e + 1, Lit::True)]
        } else {
            (0..m).map(|j| (j, enc.loop_target[j])).collect()
        };
        for v in 0..1usize << (ni * k) {
            for edge in &nba.edges[q] {
                let mut guard: Vec<i32> = Vec::new();
                let mut possible = true;
                for b in 0..nba.signals.len() {
                    let want = if edge.guard.pos >> b & 1 == 1 {
                        true
                    } else if edge.guard.neg >> b & 1 == 1 {
                        false
                    } else {
                        continue;
                    };
                    match enc.signal(b, &systems, e, v) {
                        Lit::True if want => {}
                        Lit::False if !want => {}
                        Lit::Var(x) => guard.push(if want { -x } else { x }),
                        _ => {
                            possible = false;
                            break;
                        }
                    }
                }
                if !possible {
                    continue;
                }
                let same_comp = comp[edge.target] == comp[q] && ranked(q);
                for t in 0..tuples {
                    let mut targets = Vec::with_capacity(k);
                    let mut rest = t;
                    let mut conds: Vec<i32> = Vec::new();
                    let mut possible = true;
                    for (j, &sj) in systems.iter().enumerate().take(k) {
                        let tj = rest % n;
                        rest /= n;
                        targets.push(tj);
                        match enc.tau(sj, v >> (j * ni) & (valuations - 1), tj) {
                            Lit::Var(x) => conds.push(-x),
                            Lit::False => possible = false,
                            Lit::True => {}
                        }
                    }
                    if !possible {
                        continue;
                    }
                    for &(e2, l) in &gen_next {
                        clause.clear();
                        clause.push(-r);
                        clause.extend_from_slice(&guard);
                        clause.extend_from_slice(&conds);
                        if let Lit::Var(x) = l {
                            clause.push(-x);
                        }
                        let key = (targets.clone(), e2, edge.target);
                        let tid = node_id(key.clone(), &mut enc, &mut nodes, &mut reach, &mut ranks);
                        let rt = reach[tid];
                        if !same_comp {
                            clause.push(rt);
                            enc.cnf.add(&clause);
                            continue;
                        }
                        let d = enc.cnf.new_var();
                        clause.push(d);
                        enc.cnf.add(&clause);
                        enc.cnf.add(&[-d, rt]);
                        let src = ranks[&nodes[i]].clone();
                        let dst = ranks[&key].clone();
                        if nba.accepting[edge.target] {
                            match dst.first() {
                                Some(&b1) => enc.cnf.add(&[-d, b1]),
                                None => enc.cnf.add(&[-d]),
                            }
                            for (x, &a) in src.iter().enumerate() {
                                match dst.get(x + 1) {
                                    Some(&b) => enc.cnf.add(&[-d, -a, b]),
                                    None => enc.cnf.add(&[-d, -a]),
                                }
                            }
                        } else {
                            for (&a, &b) in src.iter().zip(&dst) {
                                enc.cnf.add(&[-d, -a, b]);
                            }
                        }
                    }
                }
            }
        }
        i += 1;
    }
    let automaton_states = nba.states();
    Ok(ConstraintProblem {
        cnf: enc.cnf,
        bounds: Bounds {
            system: n,
            generator: m,
            lambda_max: bounds.lambda_max,
        },
        automaton_states,
        product_nodes: nodes.len(),
        inputs: inst.inputs.clone(),
        outputs: inst.outputs.clone(),
        copies: inst.existential.clone(),
        tau: enc.tau,
        lam: enc.lam,
        gam: enc.gam,
        loop_target: enc.loop_target,
        reach: nodes.into_iter().zip(reach).collect(),
        ranks,
    })
}

impl ConstraintProblem {
    fn value(model: &[bool], l: Lit) -> bool {
        match l {
            Lit::True => true,
            Lit::False => false,
            Lit::Var(v) => model.get(v as usize).copied().unwrap_or(false),
        }
    }

    /// Reads the system and generator off a model.
    pub fn decode(&self, model: &[bool]) -> (MooreSystem, ExistGenerator) {
        let (n, m) = (self.bounds.system, self.bounds.generator);
        let valuations = 1usize << self.inputs.len();
        let no = self.outputs.len();
        let next: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                (0..valuations)
                    .map(|v| {
                        (0..n)
                            .find(|&t| Self::value(model, self.tau[(s * valuations + v) * n + t]))
                            .unwrap_or(0)
                    })
                    .collect()
            })
            .collect();
        let labels: Vec<u64> = (0..n)
            .map(|s| (0..no).fold(0u64, |acc, o| acc | (model[self.lam[s * no + o] as usize] as u64) << o))
            .collect();
        let system = MooreSystem::new(self.inputs.clone(), self.outputs.clone(), 0, next, labels)
            .expect("decoded system is total");
        let signals: Vec<String> = self.inputs.iter().chain(&self.outputs).cloned().collect();
        let nsig = signals.len();
        let copies = self.copies.len();
        let generator = if copies == 0 {
            ExistGenerator::empty(signals)
        } else {
            let loop_target = (0..m).find(|&j| Self::value(model, self.loop_target[j])).unwrap_or(0);
            let labels = (0..m)
                .map(|e| {
                    (0..copies)
                        .map(|c| {
                            (0..nsig).fold(0u64, |acc, x| {
                                acc | (model[self.gam[(e * copies + c) * nsig + x] as usize] as u64) << x
                            })
                        })
                        .collect()
                })
                .collect();
            ExistGenerator::new(self.copies.clone(), signals, loop_target, labels)
                .expect("decoded generator is well formed")
        };
        (system, generator)
    }

    /// Ranks of the nodes marked reachable in a model.
    pub fn annotation(&self, model: &[bool]) -> Annotation {
        let entries = self
            .reach
            .iter()
            .filter(|(_, r)| model[*r as usize])
            .map(|(key, _)| {
                let rank = self
                    .ranks
                    .get(key)
                    .map(|bits| bits.iter().take_while(|&&b| model[b as usize]).count());
                (key.clone(), rank)
            })
            .collect();
        Annotation { entries }
    }
}
