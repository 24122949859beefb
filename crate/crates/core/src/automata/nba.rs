use std::collections::HashMap;
use std::fmt::Write as _;

use super::graph;
use super::AutomatonError;
use crate::formula::{BinOp, Formula, Kind, UnOp};
use crate::semantics::Lasso;

/// A conjunction of literals over the automaton's signals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub pos: u64,
    pub neg: u64,
}

impl Guard {
    pub const TRUE: Guard = Guard { pos: 0, neg: 0 };

    pub fn matches(&self, letter: u64) -> bool {
        letter & self.pos == self.pos && letter & self.neg == 0
    }

    /// Every letter matching `self` matches `other`.
    pub fn implies(&self, other: &Guard) -> bool {
        other.pos & !self.pos == 0 && other.neg & !self.neg == 0
    }

    /// HOA label syntax over signal indices.
    pub fn hoa(&self) -> String {
        let mut lits = Vec::new();
        for i in 0..64 {
            if self.pos >> i & 1 == 1 {
                lits.push(format!("{i}"));
            } else if self.neg >> i & 1 == 1 {
                lits.push(format!("!{i}"));
            }
        }
        if lits.is_empty() {
            "t".into()
        } else {
            lits.join("&")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NbaEdge {
    pub guard: Guard,
    pub target: usize,
}

/// A nondeterministic Büchi automaton with state-based acceptance and
/// conjunctive guards. Letters are bit sets over `signals`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nba {
    pub signals: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub edges: Vec<Vec<NbaEdge>>,
}

impl Nba {
    pub fn states(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Whether the automaton accepts the ultimately periodic word `w`.
    pub fn accepts(&self, w: &Lasso<u64>) -> bool {
        let (p, len) = (w.prefix_len(), w.prefix_len() + w.cycle_len());
        let n = self.states();
        let id = |pos: usize, q: usize| pos * n + q;
        let mut succ = vec![Vec::new(); len * n];
        let mut accepting = vec![false; len * n];
        for pos in 0..len {
            let next = if pos + 1 == len { p } else { pos + 1 };
            let letter = *w.at(pos);
            for q in 0..n {
                accepting[id(pos, q)] = self.accepting[q];
                for e in &self.edges[q] {
                    if e.guard.matches(letter) {
                        succ[id(pos, q)].push(id(next, e.target));
                    }
                }
            }
        }
        graph::accepting_lasso(&succ, &accepting, id(0, self.initial)).is_some()
    }

    /// HOA v1 text.
    pub fn to_hoa(&self, name: &str) -> String {
        let mut out = String::from("HOA: v1\n");
        let _ = writeln!(out, "name: \"{}\"", name.replace('"', "'"));
        let _ = writeln!(out, "States: {}", self.states());
        let _ = writeln!(out, "Start: {}", self.initial);
        let aps: Vec<String> = self.signals.iter().map(|s| format!("\"{s}\"")).collect();
        let _ = writeln!(out, "AP: {} {}", self.signals.len(), aps.join(" "));
        out.push_str(
            "acc-name: Buchi\nAcceptance: 1 Inf(0)\nproperties: trans-labels explicit-labels state-acc\n--BODY--\n",
        );
        for q in 0..self.states() {
            let acc = if self.accepting[q] { " {0}" } else { "" };
            let _ = writeln!(out, "State: {q}{acc}");
            for e in &self.edges[q] {
                let _ = writeln!(out, "[{}] {}", e.guard.hoa(), e.target);
            }
        }
        out.push_str("--END--\n");
        out
    }

    /// Removes states from which no accepting cycle is reachable. An empty
    /// language leaves a single rejecting state without edges.
    pub fn trim(&self) -> Nba {
        let succ: Vec<Vec<usize>> = self
            .edges
            .iter()
            .map(|es| es.iter().map(|e| e.target).collect())
            .collect();
        let live = graph::live(&succ, &self.accepting);
        if !live[self.initial] {
            return Nba {
                signals: self.signals.clone(),
                initial: 0,
                accepting: vec![false],
                edges: vec![Vec::new()],
            };
        }
        let mut map = vec![usize::MAX; self.states()];
        let mut order = vec![self.initial];
        map[self.initial] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for e in &self.edges[q] {
                if live[e.target] && map[e.target] == usize::MAX {
                    map[e.target] = order.len();
                    order.push(e.target);
                }
            }
            i += 1;
        }
        Nba {
            signals: self.signals.clone(),
            initial: 0,
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            edges: order
                .iter()
                .map(|&q| {
                    self.edges[q]
                        .iter()
                        .filter(|e| live[e.target])
                        .map(|e| NbaEdge {
                            guard: e.guard,
                            target: map[e.target],
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        let succ: Vec<Vec<usize>> = self
            .edges
            .iter()
            .map(|es| es.iter().map(|e| e.target).collect())
            .collect();
        !graph::live(&succ, &self.accepting)[self.initial]
    }
}

/// Name of the trace atom `a[π]` as a signal of an automaton.
pub fn flat_name(prop: &str, trace: &str) -> String {
    format!("{prop}@{trace}")
}

/// Signal names of a quantifier-free body in first-appearance order, with
/// trace atoms flattened to `a@π`.
pub fn body_signals(body: &Formula) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    body.walk(&mut |f| {
        let name = match &f.kind {
            Kind::TraceAtom { prop, trace } => flat_name(prop, trace),
            Kind::PropAtom(v) => v.clone(),
            _ => return,
        };
        if !out.contains(&name) {
            out.push(name);
        }
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    untils: HashMap<u32, u32>,
}

const TT: u32 = 0;
const FF: u32 = 1;

impl Arena {
    fn new() -> Self {
        let mut a = Arena::default();
        a.intern(Node::True);
        a.intern(Node::False);
        a
    }

    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.index.insert(n, id);
        if let Node::Until(..) = n {
            let k = self.untils.len() as u32;
            self.untils.insert(id, k);
        }
        id
    }

    fn complementary(&self, a: u32, b: u32) -> bool {
        matches!((self.nodes[a as usize], self.nodes[b as usize]),
            (Node::Lit(x, p), Node::Lit(y, q)) if x == y && p != q)
    }

    fn mk(&mut self, n: Node) -> u32 {
        match n {
            Node::And(a, b) => {
                if a == FF || b == FF || self.complementary(a, b) {
                    FF
                } else if a == TT || a == b {
                    b
                } else if b == TT {
                    a
                } else {
                    self.intern(Node::And(a.min(b), a.max(b)))
                }
            }
            Node::Or(a, b) => {
                if a == TT || b == TT || self.complementary(a, b) {
                    TT
                } else if a == FF || a == b {
                    b
                } else if b == FF {
                    a
                } else {
                    self.intern(Node::Or(a.min(b), a.max(b)))
                }
            }
            Node::Next(a) if a == TT || a == FF => a,
            Node::Until(a, b) if b == TT || b == FF || a == FF => b,
            Node::Release(a, b) if b == TT || b == FF || a == TT => b,
            n => self.intern(n),
        }
    }

    fn convert(&mut self, f: &Formula, neg: bool, signals: &[String]) -> Result<u32, AutomatonError> {
        let lit = |name: String| -> Result<u32, AutomatonError> {
            signals
                .iter()
                .position(|s| *s == name)
                .map(|i| i as u32)
                .ok_or(AutomatonError::UnknownSignal(name))
        };
        Ok(match &f.kind {
            Kind::True => {
                if neg {
                    FF
                } else {
                    TT
                }
            }
            Kind::False => {
                if neg {
                    TT
                } else {
                    FF
                }
            }
            Kind::TraceAtom { prop, trace } => {
                let i = lit(flat_name(prop, trace))?;
                self.mk(Node::Lit(i, !neg))
            }
            Kind::PropAtom(v) => {
                let i = lit(v.clone())?;
                self.mk(Node::Lit(i, !neg))
            }
            Kind::Quant(_, v, _) => return Err(AutomatonError::ResidualQuantifier(v.clone())),
            Kind::Knowledge { .. } => return Err(AutomatonError::Knowledge),
            Kind::Unary(op, b) => match op {
                UnOp::Not => self.convert(b, !neg, signals)?,
                UnOp::Next => {
                    let x = self.convert(b, neg, signals)?;
                    self.mk(Node::Next(x))
                }
                UnOp::Eventually | UnOp::Globally => {
                    let x = self.convert(b, neg, signals)?;
                    if (*op == UnOp::Eventually) != neg {
                        self.mk(Node::Until(TT, x))
                    } else {
                        self.mk(Node::Release(FF, x))
                    }
                }
            },
            Kind::Binary(op, l, r) => {
                let mut c = |g: &Formula, n: bool| self.convert(g, n, signals);
                match (op, neg) {
                    (BinOp::And, false) | (BinOp::Or, true) => {
                        let (a, b) = (c(l, neg)?, c(r, neg)?);
                        self.mk(Node::And(a, b))
                    }
                    (BinOp::Or, false) | (BinOp::And, true) => {
                        let (a, b) = (c(l, neg)?, c(r, neg)?);
                        self.mk(Node::Or(a, b))
                    }
                    (BinOp::Implies, false) => {
                        let (a, b) = (c(l, true)?, c(r, false)?);
                        self.mk(Node::Or(a, b))
                    }
                    (BinOp::Implies, true) => {
                        let (a, b) = (c(l, false)?, c(r, true)?);
                        self.mk(Node::And(a, b))
                    }
                    (BinOp::Iff, _) => {
                        let (a, na) = (c(l, false)?, c(l, true)?);
                        let (b, nb) = (c(r, neg)?, c(r, !neg)?);
                        let x = self.mk(Node::And(a, b));
                        let y = self.mk(Node::And(na, nb));
                        self.mk(Node::Or(x, y))
                    }
                    (BinOp::Until, false) | (BinOp::Release, true) => {
                        let (a, b) = (c(l, neg)?, c(r, neg)?);
                        self.mk(Node::Until(a, b))
                    }
                    (BinOp::Release, false) | (BinOp::Until, true) => {
                        let (a, b) = (c(l, neg)?, c(r, neg)?);
                        self.mk(Node::Release(a, b))
                    }
                    // a W b = b R (a | b)
                    (BinOp::WeakUntil, false) => {
                        let (a, b) = (c(l, false)?, c(r, false)?);
                        let ab = self.mk(Node::Or(a, b));
                        self.mk(Node::Release(b, ab))
                    }
                    // !(a W b) = !b U (!a & !b)
                    (BinOp::WeakUntil, true) => {
                        let (na, nb) = (c(l, true)?, c(r, true)?);
                        let both = self.mk(Node::And(na, nb));
                        self.mk(Node::Until(nb, both))
                    }
                }
            }
        })
    }
}

/// One way of satisfying a set of obligations in the current step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Cover {
    guard: Guard,
    next: Vec<u32>,
    postponed: u64,
}

impl Cover {
    fn subsumes(&self, other: &Cover) -> bool {
        other.guard.implies(&self.guard)
            && self.postponed & !other.postponed == 0
            && self.next.iter().all(|n| other.next.binary_search(n).is_ok())
    }
}

impl Arena {
    fn expand(&self, state: &[u32]) -> Vec<Cover> {
        let mut out: Vec<Cover> = Vec::new();
        let start = Cover {
            guard: Guard::TRUE,
            next: Vec::new(),
            postponed: 0,
        };
        let mut work: Vec<(Vec<u32>, Cover)> = vec![(state.to_vec(), start)];
        'branch: while let Some((mut todo, mut cover)) = work.pop() {
            while let Some(f) = todo.pop() {
                match self.nodes[f as usize] {
                    Node::True => {}
                    Node::False => continue 'branch,
                    Node::Lit(s, positive) => {
                        let bit = 1u64 << s;
                        if positive {
                            if cover.guard.neg & bit != 0 {
                                continue 'branch;
                            }
                            cover.guard.pos |= bit;
                        } else {
                            if cover.guard.pos & bit != 0 {
                                continue 'branch;
                            }
                            cover.guard.neg |= bit;
                        }
                    }
                    Node::And(a, b) => {
                        todo.push(a);
                        todo.push(b);
                    }
                    Node::Or(a, b) => {
                        let mut other = todo.clone();
                        other.push(b);
                        work.push((other, cover.clone()));
                        todo.push(a);
                    }
                    Node::Next(a) => cover.next.push(a),
                    Node::Until(a, b) => {
                        let mut later = todo.clone();
                        let mut postponed = cover.clone();
                        later.push(a);
                        postponed.next.push(f);
                        postponed.postponed |= 1 << self.untils[&f];
                        work.push((later, postponed));
                        todo.push(b);
                    }
                    Node::Release(a, b) => {
                        let mut later = todo.clone();
                        let mut kept = cover.clone();
                        later.push(b);
                        kept.next.push(f);
                        work.push((later, kept));
                        todo.push(a);
                        todo.push(b);
                    }
                }
            }
            cover.next.sort_unstable();
            cover.next.dedup();
            out.push(cover);
        }
        out.sort_by_key(|a| (a.next.len(), a.guard, a.postponed));
        out.dedup();
        let kept: Vec<Cover> = out
            .iter()
            .filter(|c| !out.iter().any(|d| d != *c && d.subsumes(c)))
            .cloned()
            .collect();
        kept
    }
}

/// Translates a quantifier-free, knowledge-free body into an NBA over
/// `signals`. Trace atoms `a[π]` read the signal `a@π`, propositional atoms
/// read the signal of the same name.
pub fn ltl_to_nba_over(body: &Formula, signals: &[String]) -> Result<Nba, AutomatonError> {
    if signals.len() > 64 {
        return Err(AutomatonError::TooManySignals(signals.len()));
    }
    let mut arena = Arena::new();
    let root = arena.convert(body, false, signals)?;
    let m = arena.untils.len();
    if m > 64 {
        return Err(AutomatonError::TooManyEventualities(m));
    }
    // Generalized automaton over obligation sets, degeneralized on the fly
    // with a level counter in 0..=m; level m marks accepting states.
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut set_ids: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut covers: Vec<Vec<Cover>> = Vec::new();
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut set_id = |s: Vec<u32>, sets: &mut Vec<Vec<u32>>, covers: &mut Vec<Vec<Cover>>| -> usize {
        *set_ids.entry(s.clone()).or_insert_with(|| {
            covers.push(arena.expand(&s));
            sets.push(s);
            sets.len() - 1
        })
    };
    let init_set = set_id(vec![root], &mut sets, &mut covers);
    ids.insert((init_set, 0), 0);
    states.push((init_set, 0));
    let mut edges: Vec<Vec<NbaEdge>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (s, level) = states[i];
        let base = if level == m { 0 } else { level };
        let mut out = Vec::new();
        for c in covers[s].clone() {
            let mut l = base;
            while l < m && c.postponed >> l & 1 == 0 {
                l += 1;
            }
            let t = set_id(c.next.clone(), &mut sets, &mut covers);
            let next = states.len();
            let target = *ids.entry((t, l)).or_insert(next);
            if target == next {
                states.push((t, l));
            }
            out.push(NbaEdge { guard: c.guard, target });
        }
        edges.push(out);
        i += 1;
    }
    let nba = Nba {
        signals: signals.to_vec(),
        initial: 0,
        accepting: states.iter().map(|&(_, l)| l == m).collect(),
        edges,
    };
    Ok(nba.trim())
}

/// [`ltl_to_nba_over`] with the signals of the body in first-appearance order.
pub fn ltl_to_nba(body: &Formula) -> Result<Nba, AutomatonError> {
    ltl_to_nba_over(body, &body_signals(body))
}
