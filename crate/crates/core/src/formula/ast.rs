use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

/// Source position of a node. Synthesized nodes carry `Span::default()`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantKind {
    TraceForall,
    TraceExists,
    PropForall,
    PropExists,
}

impl QuantKind {
    pub fn is_trace(self) -> bool {
        matches!(self, QuantKind::TraceForall | QuantKind::TraceExists)
    }

    pub fn is_universal(self) -> bool {
        matches!(self, QuantKind::TraceForall | QuantKind::PropForall)
    }

    pub fn dual(self) -> Self {
        match self {
            QuantKind::TraceForall => QuantKind::TraceExists,
            QuantKind::TraceExists => QuantKind::TraceForall,
            QuantKind::PropForall => QuantKind::PropExists,
            QuantKind::PropExists => QuantKind::PropForall,
        }
    }

    /// Same quantifier, other variable sort.
    pub fn with_trace_sort(self, trace: bool) -> Self {
        match (self.is_universal(), trace) {
            (true, true) => QuantKind::TraceForall,
            (false, true) => QuantKind::TraceExists,
            (true, false) => QuantKind::PropForall,
            (false, false) => QuantKind::PropExists,
        }
    }

    pub(crate) fn keyword(self) -> (&'static str, &'static str) {
        match self {
            QuantKind::TraceForall => ("forall", "trace"),
            QuantKind::TraceExists => ("exists", "trace"),
            QuantKind::PropForall => ("forall", "prop"),
            QuantKind::PropExists => ("exists", "prop"),
        }
    }
}

impl fmt::Display for QuantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QuantKind::TraceForall => "∀π",
            QuantKind::TraceExists => "∃π",
            QuantKind::PropForall => "∀q",
            QuantKind::PropExists => "∃q",
        };
        f.write_str(s)
    }
}

/// Polarity of a knowledge operator after negation normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
    Until,
    WeakUntil,
    Release,
}

impl BinOp {
    pub(crate) fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Implies => "->",
            BinOp::Iff => "<->",
            BinOp::Until => "U",
            BinOp::WeakUntil => "W",
            BinOp::Release => "R",
        }
    }

    pub fn is_temporal(self) -> bool {
        matches!(self, BinOp::Until | BinOp::WeakUntil | BinOp::Release)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Next,
    Eventually,
    Globally,
}

impl UnOp {
    pub(crate) fn symbol(self) -> &'static str {
        match self {
            UnOp::Not => "!",
            UnOp::Next => "X",
            UnOp::Eventually => "F",
            UnOp::Globally => "G",
        }
    }
}

/// A HyperQPTL formula node. Equality and hashing ignore source spans.
#[derive(Clone, Debug)]
pub struct Formula {
    pub kind: Kind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    True,
    False,
    Quant(QuantKind, String, Box<Formula>),
    /// `a[pi]`: proposition `a` on the trace bound to `pi`.
    TraceAtom {
        prop: String,
        trace: String,
    },
    /// Bare `q`: a propositional variable bound by a propositional quantifier.
    PropAtom(String),
    Unary(UnOp, Box<Formula>),
    Binary(BinOp, Box<Formula>, Box<Formula>),
    Knowledge {
        agents: Vec<String>,
        trace: String,
        polarity: Option<Polarity>,
        body: Box<Formula>,
    },
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

impl From<Kind> for Formula {
    fn from(kind: Kind) -> Self {
        Formula {
            kind,
            span: Span::default(),
        }
    }
}

impl Formula {
    pub fn with_span(kind: Kind, span: Span) -> Self {
        Formula { kind, span }
    }

    pub fn tt() -> Self {
        Kind::True.into()
    }

    pub fn ff() -> Self {
        Kind::False.into()
    }

    pub fn trace_atom(prop: impl Into<String>, trace: impl Into<String>) -> Self {
        Kind::TraceAtom {
            prop: prop.into(),
            trace: trace.into(),
        }
        .into()
    }

    pub fn prop(var: impl Into<String>) -> Self {
        Kind::PropAtom(var.into()).into()
    }

    pub fn quant(kind: QuantKind, var: impl Into<String>, body: Formula) -> Self {
        Kind::Quant(kind, var.into(), Box::new(body)).into()
    }

    pub fn forall_trace(var: impl Into<String>, body: Formula) -> Self {
        Self::quant(QuantKind::TraceForall, var, body)
    }

    pub fn exists_trace(var: impl Into<String>, body: Formula) -> Self {
        Self::quant(QuantKind::TraceExists, var, body)
    }

    pub fn forall_prop(var: impl Into<String>, body: Formula) -> Self {
        Self::quant(QuantKind::PropForall, var, body)
    }

    pub fn exists_prop(var: impl Into<String>, body: Formula) -> Self {
        Self::quant(QuantKind::PropExists, var, body)
    }

    pub fn unary(op: UnOp, f: Formula) -> Self {
        Kind::Unary(op, Box::new(f)).into()
    }

    pub fn binary(op: BinOp, l: Formula, r: Formula) -> Self {
        Kind::Binary(op, Box::new(l), Box::new(r)).into()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Self::unary(UnOp::Not, f)
    }

    pub fn next(f: Formula) -> Self {
        Self::unary(UnOp::Next, f)
    }

    pub fn eventually(f: Formula) -> Self {
        Self::unary(UnOp::Eventually, f)
    }

    pub fn globally(f: Formula) -> Self {
        Self::unary(UnOp::Globally, f)
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Self::binary(BinOp::And, l, r)
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Self::binary(BinOp::Or, l, r)
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Self::binary(BinOp::Implies, l, r)
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Self::binary(BinOp::Iff, l, r)
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Self::binary(BinOp::Until, l, r)
    }

    pub fn weak_until(l: Formula, r: Formula) -> Self {
        Self::binary(BinOp::WeakUntil, l, r)
    }

    pub fn release(l: Formula, r: Formula) -> Self {
        Self::binary(BinOp::Release, l, r)
    }

    pub fn knowledge(
        agents: impl IntoIterator<Item = impl Into<String>>,
        trace: impl Into<String>,
        body: Formula,
    ) -> Self {
        Kind::Knowledge {
            agents: agents.into_iter().map(Into::into).collect(),
            trace: trace.into(),
            polarity: None,
            body: Box::new(body),
        }
        .into()
    }

    /// Left-nested conjunction; `true` for an empty iterator.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::tt)
    }

    /// Left-nested disjunction; `false` for an empty iterator.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::ff)
    }

    /// `a ↮ b`
    pub fn xor(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::iff(l, r))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self.kind,
            Kind::True | Kind::False | Kind::TraceAtom { .. } | Kind::PropAtom(_)
        )
    }

    pub fn children(&self) -> Vec<&Formula> {
        match &self.kind {
            Kind::True | Kind::False | Kind::TraceAtom { .. } | Kind::PropAtom(_) => vec![],
            Kind::Quant(_, _, b) | Kind::Unary(_, b) | Kind::Knowledge { body: b, .. } => {
                vec![b]
            }
            Kind::Binary(_, l, r) => vec![l, r],
        }
    }

    /// Rebuilds the node with every direct child replaced by `f(child)`.
    pub fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        let kind = match &self.kind {
            k @ (Kind::True | Kind::False | Kind::TraceAtom { .. } | Kind::PropAtom(_)) => k.clone(),
            Kind::Quant(q, v, b) => Kind::Quant(*q, v.clone(), Box::new(f(b))),
            Kind::Unary(op, b) => Kind::Unary(*op, Box::new(f(b))),
            Kind::Binary(op, l, r) => Kind::Binary(*op, Box::new(f(l)), Box::new(f(r))),
            Kind::Knowledge {
                agents,
                trace,
                polarity,
                body,
            } => Kind::Knowledge {
                agents: agents.clone(),
                trace: trace.clone(),
                polarity: *polarity,
                body: Box::new(f(body)),
            },
        };
        Formula::with_span(kind, self.span)
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Height of the syntax tree; atoms have depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut free = true;
        self.walk(&mut |f| {
            if matches!(f.kind, Kind::Quant(..)) {
                free = false
            }
        });
        free
    }

    pub fn contains_knowledge(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if matches!(f.kind, Kind::Knowledge { .. }) {
                found = true
            }
        });
        found
    }

    pub fn has_prop_quantifier(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if let Kind::Quant(q, ..) = f.kind {
                if !q.is_trace() {
                    found = true
                }
            }
        });
        found
    }

    /// Every variable name bound by a quantifier, plus every name used in an atom.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        self.walk(&mut |f| match &f.kind {
            Kind::Quant(_, v, _) => {
                names.insert(v.clone());
            }
            Kind::TraceAtom { prop, trace } => {
                names.insert(prop.clone());
                names.insert(trace.clone());
            }
            Kind::PropAtom(v) => {
                names.insert(v.clone());
            }
            Kind::Knowledge { agents, trace, .. } => {
                names.extend(agents.iter().cloned());
                names.insert(trace.clone());
            }
            _ => {}
        });
        names
    }

    /// Trace variables occurring free.
    pub fn free_trace_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match &f.kind {
                Kind::Quant(q, v, b) if q.is_trace() => {
                    bound.push(v.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Kind::TraceAtom { trace, .. } if !bound.contains(trace) => {
                    out.insert(trace.clone());
                }
                Kind::Knowledge { trace, body, .. } => {
                    if !bound.contains(trace) {
                        out.insert(trace.clone());
                    }
                    go(body, bound, out);
                }
                _ => {
                    for c in f.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Propositional variables occurring free.
    pub fn free_prop_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match &f.kind {
                Kind::Quant(q, v, b) if !q.is_trace() => {
                    bound.push(v.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Kind::PropAtom(v) if !bound.contains(v) => {
                    out.insert(v.clone());
                }
                _ => {
                    for c in f.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Trace-indexed propositions, in first-appearance order.
    pub fn trace_propositions(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.walk(&mut |f| match &f.kind {
            Kind::TraceAtom { prop, .. } if !out.contains(prop) => out.push(prop.clone()),
            Kind::Knowledge { agents, .. } => {
                for a in agents {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
            }
            _ => {}
        });
        out
    }

    /// Replaces free occurrences of trace variable `from` by `to`.
    pub fn rename_trace(&self, from: &str, to: &str) -> Formula {
        match &self.kind {
            Kind::Quant(q, v, _) if q.is_trace() && v == from => self.clone(),
            Kind::TraceAtom { prop, trace } if trace == from => Formula::with_span(
                Kind::TraceAtom {
                    prop: prop.clone(),
                    trace: to.to_string(),
                },
                self.span,
            ),
            Kind::Knowledge {
                agents,
                trace,
                polarity,
                body,
            } => Formula::with_span(
                Kind::Knowledge {
                    agents: agents.clone(),
                    trace: if trace == from { to.to_string() } else { trace.clone() },
                    polarity: *polarity,
                    body: Box::new(body.rename_trace(from, to)),
                },
                self.span,
            ),
            _ => self.map_children(|c| c.rename_trace(from, to)),
        }
    }

    /// Replaces free occurrences of propositional variable `var` by `with`.
    pub fn substitute_prop(&self, var: &str, with: &Formula) -> Formula {
        match &self.kind {
            Kind::Quant(q, v, _) if !q.is_trace() && v == var => self.clone(),
            Kind::PropAtom(v) if v == var => with.clone(),
            _ => self.map_children(|c| c.substitute_prop(var, with)),
        }
    }

    /// Replaces every trace atom over trace variable `trace` through `f(prop)`.
    pub fn map_trace_atoms(&self, f: &mut impl FnMut(&str, &str) -> Option<Formula>) -> Formula {
        match &self.kind {
            Kind::TraceAtom { prop, trace } => f(prop, trace).unwrap_or_else(|| self.clone()),
            _ => self.map_children(|c| c.map_trace_atoms(f)),
        }
    }
}

/// Generates fresh names following the `base__k` scheme.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    taken: BTreeSet<String>,
}

impl FreshNames {
    pub fn new(taken: impl IntoIterator<Item = String>) -> Self {
        FreshNames {
            taken: taken.into_iter().collect(),
        }
    }

    pub fn for_formula(f: &Formula) -> Self {
        Self::new(f.all_names())
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.taken.insert(name.into());
    }

    /// Reserves `name` if it is still free; returns whether it was.
    pub fn try_reserve(&mut self, name: &str) -> bool {
        self.taken.insert(name.to_string())
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let mut k = 1;
        loop {
            let candidate = format!("{base}__{k}");
            if !self.taken.contains(&candidate) {
                self.taken.insert(candidate.clone());
                return candidate;
            }
            k += 1;
        }
    }
}
