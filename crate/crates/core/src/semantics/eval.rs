//! Reference evaluator over finite sets of lasso traces.
//!
//! All traces are unrolled onto one frame of `p + l` positions (prefix `p`,
//! loop `l`), and every subformula is computed as a bit mask over those
//! positions. Position `p + l - 1` is followed by position `p`.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use super::lasso::{lcm, Lasso, LassoTrace};
use super::traceset::TraceSet;
use crate::formula::{BinOp, Formula, Kind, UnOp};

pub const DEFAULT_PROP_BOUND: usize = 3;
pub const DEFAULT_ALIGN_CAP: usize = 64;

/// Frames are limited by the width of the position masks.
const MAX_FRAME: usize = 128;
const MAX_WITNESS_CANDIDATES: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Size bound of the lasso witnesses tried for propositional quantifiers.
    pub prop_bound: usize,
    /// Largest allowed aligned loop length.
    pub align_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            prop_bound: DEFAULT_PROP_BOUND,
            align_cap: DEFAULT_ALIGN_CAP,
        }
    }
}

impl EvalOptions {
    pub fn with_prop_bound(prop_bound: usize) -> Self {
        EvalOptions {
            prop_bound,
            ..Self::default()
        }
    }
}

/// Truth value together with the witness bound it was computed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub prop_bound: usize,
}

/// Values of the free variables: trace variables map to members of the trace
/// set (by index), propositional variables to fixed lassos.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub traces: BTreeMap<String, usize>,
    pub props: BTreeMap<String, Lasso<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trace(mut self, var: impl Into<String>, index: usize) -> Self {
        self.traces.insert(var.into(), index);
        self
    }

    pub fn prop(mut self, var: impl Into<String>, witness: Lasso<bool>) -> Self {
        self.props.insert(var.into(), witness);
        self
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound trace variable {0}")]
    UnboundTrace(String),
    #[error("unbound propositional variable {0}")]
    UnboundProp(String),
    #[error("trace variable {var} assigned to index {index}, but the set has {len} traces")]
    TraceIndex { var: String, index: usize, len: usize },
    #[error("signal {0} is not part of the trace set")]
    UnknownSignal(String),
    #[error("aligned loop length {needed} exceeds the cap of {cap}")]
    AlignmentCap { needed: usize, cap: usize },
    #[error("evaluation frame of {0} positions exceeds the supported {MAX_FRAME}")]
    FrameTooLarge(usize),
    #[error("witness class at propositional depth {depth} has more than {MAX_WITNESS_CANDIDATES} candidates")]
    WitnessClassTooLarge { depth: usize },
    #[error("unsupported here: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug)]
enum Node {
    True,
    False,
    Atom {
        slot: usize,
        sig: usize,
    },
    Prop {
        slot: usize,
    },
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Next(usize),
    Eventually(usize),
    Globally(usize),
    Until(usize, usize),
    WeakUntil(usize, usize),
    Release(usize, usize),
    TraceQuant {
        forall: bool,
        slot: usize,
        body: usize,
    },
    PropQuant {
        forall: bool,
        slot: usize,
        depth: usize,
        body: usize,
    },
    Knows {
        slot: usize,
        agents: usize,
        body: usize,
    },
}

/// A formula compiled against a fixed signal order, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    root: usize,
    agent_sets: Vec<Vec<usize>>,
    trace_slots: usize,
    prop_slots: usize,
    free_traces: usize,
    free_props: usize,
    max_prop_depth: Option<usize>,
    has_knowledge: bool,
    signals: usize,
}

struct Compiler<'a> {
    signals: &'a [String],
    nodes: Vec<Node>,
    agent_sets: Vec<Vec<usize>>,
    traces: Vec<(String, usize)>,
    props: Vec<(String, usize)>,
    trace_slots: usize,
    prop_slots: usize,
    max_prop_depth: Option<usize>,
    has_knowledge: bool,
}

impl Compiler<'_> {
    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn signal(&self, name: &str) -> Result<usize, EvalError> {
        self.signals
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| EvalError::UnknownSignal(name.to_string()))
    }

    fn trace_slot(&self, var: &str) -> Result<usize, EvalError> {
        self.traces
            .iter()
            .rev()
            .find(|(v, _)| v == var)
            .map(|(_, s)| *s)
            .ok_or_else(|| EvalError::UnboundTrace(var.to_string()))
    }

    fn compile(&mut self, f: &Formula, depth: usize) -> Result<usize, EvalError> {
        let node = match &f.kind {
            Kind::True => Node::True,
            Kind::False => Node::False,
            Kind::TraceAtom { prop, trace } => Node::Atom {
                slot: self.trace_slot(trace)?,
                sig: self.signal(prop)?,
            },
            Kind::PropAtom(v) => Node::Prop {
                slot: self
                    .props
                    .iter()
                    .rev()
                    .find(|(p, _)| p == v)
                    .map(|(_, s)| *s)
                    .ok_or_else(|| EvalError::UnboundProp(v.clone()))?,
            },
            Kind::Unary(op, b) => {
                let b = self.compile(b, depth)?;
                match op {
                    UnOp::Not => Node::Not(b),
                    UnOp::Next => Node::Next(b),
                    UnOp::Eventually => Node::Eventually(b),
                    UnOp::Globally => Node::Globally(b),
                }
            }
            Kind::Binary(op, l, r) => {
                let l = self.compile(l, depth)?;
                let r = self.compile(r, depth)?;
                match op {
                    BinOp::And => Node::And(l, r),
                    BinOp::Or => Node::Or(l, r),
                    BinOp::Implies => Node::Implies(l, r),
                    BinOp::Iff => Node::Iff(l, r),
                    BinOp::Until => Node::Until(l, r),
                    BinOp::WeakUntil => Node::WeakUntil(l, r),
                    BinOp::Release => Node::Release(l, r),
                }
            }
            Kind::Quant(q, v, b) => {
                let forall = q.is_universal();
                if q.is_trace() {
                    let slot = self.trace_slots;
                    self.trace_slots += 1;
                    self.traces.push((v.clone(), slot));
                    let body = self.compile(b, depth)?;
                    self.traces.pop();
                    Node::TraceQuant { forall, slot, body }
                } else {
                    let slot = self.prop_slots;
                    self.prop_slots += 1;
                    self.max_prop_depth = Some(self.max_prop_depth.map_or(depth, |d| d.max(depth)));
                    self.props.push((v.clone(), slot));
                    let body = self.compile(b, depth + 1)?;
                    self.props.pop();
                    Node::PropQuant {
                        forall,
                        slot,
                        depth,
                        body,
                    }
                }
            }
            Kind::Knowledge {
                agents, trace, body, ..
            } => {
                self.has_knowledge = true;
                let slot = self.trace_slot(trace)?;
                let set = agents.iter().map(|a| self.signal(a)).collect::<Result<Vec<_>, _>>()?;
                self.agent_sets.push(set);
                let agents = self.agent_sets.len() - 1;
                let body = self.compile(body, depth)?;
                Node::Knows { slot, agents, body }
            }
        };
        Ok(self.push(node))
    }
}

#[derive(Clone, Copy, Debug)]
struct Frame {
    p: usize,
    n: usize,
    full: u128,
}

impl Frame {
    fn new(p: usize, l: usize) -> Self {
        let n = p + l;
        Frame {
            p,
            n,
            full: if n == 128 { u128::MAX } else { (1u128 << n) - 1 },
        }
    }

    fn index(&self, i: usize) -> usize {
        if i < self.p {
            i
        } else {
            self.p + (i - self.p) % (self.n - self.p)
        }
    }

    fn next(&self, m: u128) -> u128 {
        (m >> 1) | (((m >> self.p) & 1) << (self.n - 1))
    }

    /// Positions whose successor lies in `need`.
    fn pre(&self, need: u128) -> u128 {
        ((need << 1) & self.full) | (((need >> (self.n - 1)) & 1) << self.p)
    }

    fn loop_mask(&self) -> u128 {
        self.full & !((1u128 << self.p) - 1)
    }

    fn eventually(&self, a: u128) -> u128 {
        if a & self.loop_mask() != 0 {
            self.full
        } else if a == 0 {
            0
        } else {
            let msb = 127 - a.leading_zeros() as usize;
            (1u128 << (msb + 1)) - 1
        }
    }

    fn globally(&self, a: u128) -> u128 {
        let lm = self.loop_mask();
        if a & lm != lm {
            return 0;
        }
        let gaps = !a & self.full;
        if gaps == 0 {
            self.full
        } else {
            let msb = 127 - gaps.leading_zeros() as usize;
            self.full & !((1u128 << (msb + 1)) - 1)
        }
    }

    /// Least fixpoint of `x = b | (a & X x)`.
    fn until(&self, a: u128, b: u128) -> u128 {
        let mut x = b;
        loop {
            let nx = b | (a & self.next(x));
            if nx == x {
                return x;
            }
            x = nx;
        }
    }

    /// Greatest fixpoint of `x = b | (a & X x)`.
    fn weak_until(&self, a: u128, b: u128) -> u128 {
        let mut x = self.full;
        loop {
            let nx = b | (a & self.next(x));
            if nx == x {
                return x;
            }
            x = nx;
        }
    }

    /// Greatest fixpoint of `x = b & (a | X x)`.
    fn release(&self, a: u128, b: u128) -> u128 {
        let mut x = self.full;
        loop {
            let nx = b & (a | self.next(x));
            if nx == x {
                return x;
            }
            x = nx;
        }
    }
}

struct Ctx<'a> {
    c: &'a CompiledFormula,
    frame: Frame,
    /// `traces[t][sig]`
    traces: &'a [Vec<u128>],
    tslot: Vec<usize>,
    pslot: Vec<u128>,
    witnesses: Vec<Vec<u128>>,
    agree: HashMap<(usize, usize, usize), u128>,
}

impl Ctx<'_> {
    fn agreement(&mut self, agents: usize, t: usize, u: usize) -> u128 {
        let frame = self.frame;
        let (traces, sets) = (self.traces, &self.c.agent_sets);
        *self.agree.entry((agents, t, u)).or_insert_with(|| {
            let diff = sets[agents]
                .iter()
                .fold(0u128, |acc, &s| acc | (traces[t][s] ^ traces[u][s]));
            if diff == 0 {
                frame.full
            } else {
                (1u128 << diff.trailing_zeros()) - 1
            }
        })
    }

    /// Mask of `id`; only the bits in `need` are guaranteed to be exact.
    fn eval(&mut self, id: usize, need: u128) -> u128 {
        let f = self.frame;
        match self.c.nodes[id] {
            Node::True => f.full,
            Node::False => 0,
            Node::Atom { slot, sig } => self.traces[self.tslot[slot]][sig],
            Node::Prop { slot } => self.pslot[slot],
            Node::Not(a) => !self.eval(a, need) & f.full,
            Node::And(a, b) => {
                let x = self.eval(a, need);
                if x & need == 0 {
                    return x;
                }
                x & self.eval(b, need & x)
            }
            Node::Or(a, b) => {
                let x = self.eval(a, need);
                if x & need == need {
                    return x;
                }
                x | self.eval(b, need & !x)
            }
            Node::Implies(a, b) => {
                let x = self.eval(a, need);
                let y = if x & need == 0 { 0 } else { self.eval(b, need & x) };
                (!x | y) & f.full
            }
            Node::Iff(a, b) => {
                let x = self.eval(a, need);
                let y = self.eval(b, need);
                !(x ^ y) & f.full
            }
            Node::Next(a) => f.next(self.eval(a, f.pre(need))),
            Node::Eventually(a) => f.eventually(self.eval(a, f.full)),
            Node::Globally(a) => f.globally(self.eval(a, f.full)),
            Node::Until(a, b) => {
                let (x, y) = (self.eval(a, f.full), self.eval(b, f.full));
                f.until(x, y)
            }
            Node::WeakUntil(a, b) => {
                let (x, y) = (self.eval(a, f.full), self.eval(b, f.full));
                f.weak_until(x, y)
            }
            Node::Release(a, b) => {
                let (x, y) = (self.eval(a, f.full), self.eval(b, f.full));
                f.release(x, y)
            }
            Node::TraceQuant { forall, slot, body } => {
                let mut acc = if forall { f.full } else { 0 };
                for t in 0..self.traces.len() {
                    self.tslot[slot] = t;
                    let r = self.eval(body, need);
                    if forall {
                        acc &= r;
                        if acc & need == 0 {
                            break;
                        }
                    } else {
                        acc |= r;
                        if acc & need == need {
                            break;
                        }
                    }
                }
                acc
            }
            Node::PropQuant {
                forall,
                slot,
                depth,
                body,
            } => {
                let mut acc = if forall { f.full } else { 0 };
                for w in 0..self.witnesses[depth].len() {
                    self.pslot[slot] = self.witnesses[depth][w];
                    let r = self.eval(body, need);
                    if forall {
                        acc &= r;
                        if acc & need == 0 {
                            break;
                        }
                    } else {
                        acc |= r;
                        if acc & need == need {
                            break;
                        }
                    }
                }
                acc
            }
            Node::Knows { slot, agents, body } => {
                let t = self.tslot[slot];
                let mut acc = f.full;
                for u in 0..self.traces.len() {
                    let ag = self.agreement(agents, t, u);
                    if ag & need == 0 {
                        continue;
                    }
                    self.tslot[slot] = u;
                    let r = self.eval(body, need & ag);
                    acc &= !ag | r;
                    if acc & need == 0 {
                        break;
                    }
                }
                self.tslot[slot] = t;
                acc & f.full
            }
        }
    }
}

/// Prefix bound for witnesses at propositional nesting depth `d`.
pub fn witness_prefix_bound(prop_bound: usize, depth: usize, set_prefix: usize, set_loop: usize) -> usize {
    prop_bound + depth * (prop_bound * set_loop + set_prefix)
}

/// Whether `w` belongs to the witness class at depth `d` for a trace set with
/// maximal prefix `set_prefix` and aligned loop `set_loop`: prefix at most the
/// depth bound and some period `set_loop * k` with `1 <= k <= prop_bound`.
pub fn in_witness_class(w: &Lasso<bool>, prop_bound: usize, depth: usize, set_prefix: usize, set_loop: usize) -> bool {
    let w = w.canonical();
    w.prefix_len() <= witness_prefix_bound(prop_bound, depth, set_prefix, set_loop)
        && (1..=prop_bound).any(|k| (set_loop * k).is_multiple_of(w.cycle_len()))
}

fn witness_masks(
    prefix: usize,
    set_loop: usize,
    prop_bound: usize,
    frame: Frame,
    depth: usize,
) -> Result<Vec<u128>, EvalError> {
    let mut total = 0u64;
    for k in 1..=prop_bound {
        let bits = prefix + set_loop * k;
        if bits >= 40 {
            return Err(EvalError::WitnessClassTooLarge { depth });
        }
        total += 1u64 << bits;
    }
    if total > MAX_WITNESS_CANDIDATES {
        return Err(EvalError::WitnessClassTooLarge { depth });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for k in 1..=prop_bound {
        let per = set_loop * k;
        let pos: Vec<usize> = (0..frame.n)
            .map(|j| if j < prefix { j } else { prefix + (j - prefix) % per })
            .collect();
        for x in 0u64..(1u64 << (prefix + per)) {
            let mut m = 0u128;
            for (j, &p) in pos.iter().enumerate() {
                m |= ((x >> p & 1) as u128) << j;
            }
            if seen.insert(m) {
                out.push(m);
            }
        }
    }
    Ok(out)
}

impl CompiledFormula {
    /// Compiles `f` over the given signal order. `free_traces` and `free_props`
    /// name the free variables in the order their values are supplied later.
    pub fn new(f: &Formula, signals: &[String], free_traces: &[&str], free_props: &[&str]) -> Result<Self, EvalError> {
        let mut c = Compiler {
            signals,
            nodes: Vec::new(),
            agent_sets: Vec::new(),
            traces: free_traces
                .iter()
                .enumerate()
                .map(|(i, v)| (v.to_string(), i))
                .collect(),
            props: free_props.iter().enumerate().map(|(i, v)| (v.to_string(), i)).collect(),
            trace_slots: free_traces.len(),
            prop_slots: free_props.len(),
            max_prop_depth: None,
            has_knowledge: false,
        };
        let root = c.compile(f, 0)?;
        Ok(CompiledFormula {
            nodes: c.nodes,
            root,
            agent_sets: c.agent_sets,
            trace_slots: c.trace_slots,
            prop_slots: c.prop_slots,
            free_traces: free_traces.len(),
            free_props: free_props.len(),
            max_prop_depth: c.max_prop_depth,
            has_knowledge: c.has_knowledge,
            signals: signals.len(),
        })
    }

    pub fn has_prop_quantifier(&self) -> bool {
        self.max_prop_depth.is_some()
    }

    /// Core evaluation. `shapes[t]` is (prefix, loop) of trace `t`; `masks`
    /// builds the per-signal masks of a trace on a frame `(p, n)`.
    fn run(
        &self,
        shapes: &[(usize, usize)],
        masks: impl Fn(usize, usize, usize) -> Vec<u128>,
        assign: &[usize],
        props: &[&Lasso<bool>],
        position: usize,
        opts: EvalOptions,
    ) -> Result<bool, EvalError> {
        assert_eq!(assign.len(), self.free_traces, "free trace values");
        assert_eq!(props.len(), self.free_props, "free propositional values");
        let set_prefix = shapes.iter().map(|s| s.0).max().unwrap_or(0);
        let mut set_loop = 1;
        for s in shapes {
            set_loop = lcm(set_loop, s.1);
            if set_loop > opts.align_cap {
                return Err(EvalError::AlignmentCap {
                    needed: set_loop,
                    cap: opts.align_cap,
                });
            }
        }
        let mut frame_loop = set_loop;
        let mut frame_prefix = set_prefix;
        if let Some(d) = self.max_prop_depth {
            for k in 1..=opts.prop_bound {
                frame_loop = lcm(frame_loop, set_loop * k);
            }
            frame_prefix = frame_prefix.max(witness_prefix_bound(opts.prop_bound, d, set_prefix, set_loop));
        }
        if self.has_knowledge {
            frame_prefix = frame_prefix.max((set_prefix + set_loop).saturating_sub(1));
        }
        for w in props {
            frame_loop = lcm(frame_loop, w.cycle_len());
            frame_prefix = frame_prefix.max(w.prefix_len());
        }
        if frame_loop > opts.align_cap {
            return Err(EvalError::AlignmentCap {
                needed: frame_loop,
                cap: opts.align_cap,
            });
        }
        if frame_prefix + frame_loop > MAX_FRAME {
            return Err(EvalError::FrameTooLarge(frame_prefix + frame_loop));
        }
        let frame = Frame::new(frame_prefix, frame_loop);
        let traces: Vec<Vec<u128>> = (0..shapes.len()).map(|t| masks(t, frame.p, frame.n)).collect();
        let mut witnesses = Vec::new();
        if let Some(d) = self.max_prop_depth {
            for depth in 0..=d {
                let b = witness_prefix_bound(opts.prop_bound, depth, set_prefix, set_loop);
                witnesses.push(witness_masks(b, set_loop, opts.prop_bound, frame, depth)?);
            }
        }
        let mut pslot = vec![0u128; self.prop_slots];
        for (k, w) in props.iter().enumerate() {
            pslot[k] = (0..frame.n).fold(0, |m, j| m | ((*w.at(j) as u128) << j));
        }
        let mut tslot = vec![0usize; self.trace_slots];
        tslot[..assign.len()].copy_from_slice(assign);
        let mut ctx = Ctx {
            c: self,
            frame,
            traces: &traces,
            tslot,
            pslot,
            witnesses,
            agree: HashMap::new(),
        };
        let bit = 1u128 << frame.index(position);
        Ok(ctx.eval(self.root, bit) & bit != 0)
    }

    /// Evaluates on a trace set; `assign[k]` indexes the value of the `k`-th free trace variable.
    pub fn eval_set(
        &self,
        set: &TraceSet,
        assign: &[usize],
        props: &[&Lasso<bool>],
        position: usize,
        opts: EvalOptions,
    ) -> Result<bool, EvalError> {
        let shapes: Vec<(usize, usize)> = set.traces.iter().map(|t| (t.prefix_len(), t.cycle_len())).collect();
        let sigs = &set.signals;
        self.run(
            &shapes,
            |t, _, n| {
                let tr = &set.traces[t];
                sigs.iter()
                    .map(|s| (0..n).fold(0u128, |m, j| m | ((tr.at(j).contains(s) as u128) << j)))
                    .collect()
            },
            assign,
            props,
            position,
            opts,
        )
    }

    /// Evaluates on a set of bit-set lassos whose bit `k` is signal `k` of the
    /// compile-time signal order.
    pub fn eval_bits(
        &self,
        traces: &[&Lasso<u64>],
        assign: &[usize],
        props: &[&Lasso<bool>],
        position: usize,
        opts: EvalOptions,
    ) -> Result<bool, EvalError> {
        let shapes: Vec<(usize, usize)> = traces.iter().map(|t| (t.prefix_len(), t.cycle_len())).collect();
        let nsig = self.signals;
        self.run(
            &shapes,
            |t, _, n| {
                let tr = traces[t];
                let mut out = vec![0u128; nsig];
                for j in 0..n {
                    let v = *tr.at(j);
                    for (s, m) in out.iter_mut().enumerate() {
                        *m |= ((v >> s & 1) as u128) << j;
                    }
                }
                out
            },
            assign,
            props,
            position,
            opts,
        )
    }
}

/// Evaluates `f` at `position` on `set` under `assign`, with propositional
/// quantifiers ranging over the bounded witness class.
pub fn eval(
    f: &Formula,
    set: &TraceSet,
    assign: &Assignment,
    position: usize,
    opts: EvalOptions,
) -> Result<Verdict, EvalError> {
    let free_t: Vec<String> = f.free_trace_vars().into_iter().collect();
    let free_p: Vec<String> = f.free_prop_vars().into_iter().collect();
    let mut idx = Vec::new();
    for v in &free_t {
        let &i = assign.traces.get(v).ok_or_else(|| EvalError::UnboundTrace(v.clone()))?;
        if i >= set.len() {
            return Err(EvalError::TraceIndex {
                var: v.clone(),
                index: i,
                len: set.len(),
            });
        }
        idx.push(i);
    }
    let mut props = Vec::new();
    for v in &free_p {
        props.push(assign.props.get(v).ok_or_else(|| EvalError::UnboundProp(v.clone()))?);
    }
    let ft: Vec<&str> = free_t.iter().map(String::as_str).collect();
    let fp: Vec<&str> = free_p.iter().map(String::as_str).collect();
    let c = CompiledFormula::new(f, &set.signals, &ft, &fp)?;
    let holds = c.eval_set(set, &idx, &props, position, opts)?;
    Ok(Verdict {
        holds,
        prop_bound: opts.prop_bound,
    })
}

/// Evaluation of formulas containing knowledge operators; `eval` handles them
/// natively, this entry point only insists that one is present.
pub fn eval_knowledge(
    f: &Formula,
    set: &TraceSet,
    assign: &Assignment,
    position: usize,
    opts: EvalOptions,
) -> Result<Verdict, EvalError> {
    if !f.contains_knowledge() {
        return Err(EvalError::Unsupported("formula contains no knowledge operator".into()));
    }
    eval(f, set, assign, position, opts)
}

/// Result of a streamed universal check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamVerdict {
    pub holds: bool,
    pub checked: u64,
    pub counterexample: Option<Lasso<u64>>,
}

/// Checks `∀var. body` over a stream of traces without materializing the set.
/// `body` must be free of quantifiers and knowledge operators (so each trace is
/// judged on its own); its free propositional variables take the given lassos.
pub fn check_forall_stream(
    var: &str,
    body: &Formula,
    signals: &[String],
    traces: impl IntoIterator<Item = Lasso<u64>>,
    props: &BTreeMap<String, Lasso<bool>>,
    opts: EvalOptions,
) -> Result<StreamVerdict, EvalError> {
    if !body.is_quantifier_free() || body.contains_knowledge() {
        return Err(EvalError::Unsupported(
            "streamed checks need a quantifier- and knowledge-free body".into(),
        ));
    }
    if let Some(v) = body.free_trace_vars().into_iter().find(|v| v != var) {
        return Err(EvalError::UnboundTrace(v));
    }
    let names: Vec<String> = body.free_prop_vars().into_iter().collect();
    let mut witness = Vec::new();
    for n in &names {
        witness.push(props.get(n).ok_or_else(|| EvalError::UnboundProp(n.clone()))?);
    }
    let fp: Vec<&str> = names.iter().map(String::as_str).collect();
    let c = CompiledFormula::new(body, signals, &[var], &fp)?;
    let mut checked = 0;
    for t in traces {
        checked += 1;
        if !c.eval_bits(&[&t], &[0], &witness, 0, opts)? {
            return Ok(StreamVerdict {
                holds: false,
                checked,
                counterexample: Some(t),
            });
        }
    }
    Ok(StreamVerdict {
        holds: true,
        checked,
        counterexample: None,
    })
}

/// Evaluates a closed formula at position 0 on a trace set.
pub fn holds(f: &Formula, set: &TraceSet, opts: EvalOptions) -> Result<bool, EvalError> {
    Ok(eval(f, set, &Assignment::new(), 0, opts)?.holds)
}

/// Converts a named-signal lasso into a boolean lasso of one signal.
pub fn signal_lasso(t: &LassoTrace, signal: &str) -> Lasso<bool> {
    t.map(|v| v.contains(signal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn set(text: &str) -> TraceSet {
        text.parse().unwrap()
    }

    fn check(f: &str, t: &TraceSet) -> bool {
        holds(&parse_formula(f).unwrap(), t, EvalOptions::default()).unwrap()
    }

    #[test]
    fn promptness_on_always_e() {
        let t = set("signals: e\n| {e}");
        let f = "exists b:prop. forall pi:trace. F b & ((!b) U e[pi])";
        assert!(check(f, &t));
        // the witness (∅{b})^ω with one prefix letter works on its own
        let w = Lasso::new(vec![false], vec![true]).unwrap();
        let body = parse_formula("forall pi:trace. F b & ((!b) U e[pi])").unwrap();
        let v = eval(&body, &t, &Assignment::new().prop("b", w), 0, EvalOptions::default()).unwrap();
        assert_eq!(
            v,
            Verdict {
                holds: true,
                prop_bound: 3
            }
        );
    }

    #[test]
    fn promptness_fails_without_e() {
        let t = set("signals: e\n| {}");
        assert!(!check("exists b:prop. forall pi:trace. F b & ((!b) U e[pi])", &t));
    }

    #[test]
    fn observational_determinism_violated() {
        let t = set("signals: i, o\n| {i,o}\n| {i}");
        let f = "forall p:trace. forall p2:trace. G (i[p] <-> i[p2]) -> G (o[p] <-> o[p2])";
        assert!(!check(f, &t));
    }

    #[test]
    fn knowledge_examples() {
        let single = set("signals: a\n| {a}");
        let f = parse_formula("K{a}[pi] a[pi]").unwrap();
        let a = Assignment::new().trace("pi", 0);
        assert!(
            eval_knowledge(&f, &single, &a, 0, EvalOptions::default())
                .unwrap()
                .holds
        );

        let two = set("signals: a, s\n| {a,s}\n| {s}");
        let f = parse_formula("K{s}[pi] a[pi]").unwrap();
        for t in 0..2 {
            let a = Assignment::new().trace("pi", t);
            assert!(!eval_knowledge(&f, &two, &a, 0, EvalOptions::default()).unwrap().holds);
        }
        // with every signal observed, knowledge collapses to truth on distinguishable traces
        let f = parse_formula("K{a,s}[pi] a[pi]").unwrap();
        let a = Assignment::new().trace("pi", 0);
        assert!(eval_knowledge(&f, &two, &a, 0, EvalOptions::default()).unwrap().holds);
    }

    #[test]
    fn knowledge_depends_on_the_observed_prefix() {
        // the traces agree on s only at position 0
        let t = set("signals: a, s\n{s} | {a}\n{s} | {s}");
        let f = parse_formula("K{s}[pi] F a[pi]").unwrap();
        let a = Assignment::new().trace("pi", 0);
        let o = EvalOptions::default();
        assert!(!eval(&f, &t, &a, 0, o).unwrap().holds);
        assert!(eval(&f, &t, &a, 1, o).unwrap().holds);
        assert!(eval(&f, &t, &a, 7, o).unwrap().holds);
    }

    #[test]
    fn temporal_operators_on_one_trace() {
        let t = set("signals: a, b\n{a} {a} | {b} {}");
        assert!(check("forall p:trace. a[p] U b[p]", &t));
        assert!(check("forall p:trace. G F b[p]", &t));
        assert!(!check("forall p:trace. F G b[p]", &t));
        assert!(check("forall p:trace. X X b[p]", &t));
        assert!(check("forall p:trace. b[p] R (a[p] | b[p])", &t));
        assert!(check("forall p:trace. a[p] W b[p]", &t));
        assert!(!check("forall p:trace. G (a[p] W b[p])", &t));
    }

    #[test]
    fn positions_past_the_prefix_wrap() {
        let t = set("signals: a\n{} | {a} {}");
        let f = parse_formula("a[p]").unwrap();
        let o = EvalOptions::default();
        for i in 0..10 {
            let v = eval(&f, &t, &Assignment::new().trace("p", 0), i, o).unwrap();
            assert_eq!(v.holds, i % 2 == 1, "position {i}");
        }
    }

    #[test]
    fn universal_propositions_are_bounded() {
        let t = set("signals: a\n| {a}");
        // a universally quantified proposition cannot be forced to be constant
        assert!(!check("forall q:prop. G q | G !q", &t));
        assert!(check("exists q:prop. G (q <-> X !q)", &t));
    }

    #[test]
    fn unbound_and_unknown() {
        let t = set("signals: a\n| {a}");
        let err = eval(
            &parse_formula("a[p]").unwrap(),
            &t,
            &Assignment::new(),
            0,
            EvalOptions::default(),
        );
        assert_eq!(err, Err(EvalError::UnboundTrace("p".into())));
        let err = holds(
            &parse_formula("forall p:trace. z[p]").unwrap(),
            &t,
            EvalOptions::default(),
        );
        assert_eq!(err, Err(EvalError::UnknownSignal("z".into())));
    }

    #[test]
    fn alignment_cap_is_reported() {
        let t = set("signals: a\n| {a} {} {} {} {} {} {}\n| {a} {} {} {} {} {} {} {} {} {} {}");
        let err = holds(
            &parse_formula("forall p:trace. G a[p]").unwrap(),
            &t,
            EvalOptions::default(),
        );
        assert_eq!(err, Err(EvalError::AlignmentCap { needed: 77, cap: 64 }));
    }

    #[test]
    fn witness_class_membership() {
        let w = Lasso::new(vec![true], vec![false, true]).unwrap();
        assert!(in_witness_class(&w, 3, 0, 0, 1));
        let long = Lasso::new(vec![], vec![true, false, false, false, false]).unwrap();
        assert!(!in_witness_class(&long, 3, 0, 0, 1));
    }
}
