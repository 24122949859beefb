use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Formula, Kind, Span};
use super::SpecDocument;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    UnboundTraceVariable(String),
    UnboundPropVariable(String),
    DuplicateVariable(String),
    /// A propositional quantifier binds a name declared as an input.
    ShadowsInput(String),
    UnknownProposition(String),
    DuplicateSignal(String),
    InputOutputOverlap(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
}

impl std::error::Error for Diagnostic {}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.span)?;
        match &self.kind {
            DiagnosticKind::UnboundTraceVariable(v) => write!(f, "unbound trace variable {v}"),
            DiagnosticKind::UnboundPropVariable(v) => {
                write!(f, "unbound propositional variable {v}")
            }
            DiagnosticKind::DuplicateVariable(v) => write!(f, "duplicate variable {v}"),
            DiagnosticKind::ShadowsInput(v) => {
                write!(f, "quantified proposition {v} shadows input")
            }
            DiagnosticKind::UnknownProposition(p) => write!(f, "unknown proposition {p}"),
            DiagnosticKind::DuplicateSignal(s) => write!(f, "signal {s} declared twice"),
            DiagnosticKind::InputOutputOverlap(s) => {
                write!(f, "signal {s} declared as both input and output")
            }
        }
    }
}

struct Checker<'a> {
    signals: Option<BTreeSet<&'a str>>,
    inputs: BTreeSet<&'a str>,
    seen: BTreeSet<String>,
    traces: Vec<String>,
    props: Vec<String>,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn signal(&mut self, name: &str, span: Span) {
        if let Some(signals) = &self.signals {
            if !signals.contains(name) {
                self.out.push(Diagnostic {
                    kind: DiagnosticKind::UnknownProposition(name.to_string()),
                    span,
                });
            }
        }
    }

    fn trace(&mut self, var: &str, span: Span) {
        if !self.traces.iter().any(|t| t == var) {
            self.out.push(Diagnostic {
                kind: DiagnosticKind::UnboundTraceVariable(var.to_string()),
                span,
            });
        }
    }

    fn visit(&mut self, f: &Formula) {
        match &f.kind {
            Kind::True | Kind::False => {}
            Kind::Quant(q, v, body) => {
                if !self.seen.insert(v.clone()) {
                    self.out.push(Diagnostic {
                        kind: DiagnosticKind::DuplicateVariable(v.clone()),
                        span: f.span,
                    });
                }
                if !q.is_trace() && self.inputs.contains(v.as_str()) {
                    self.out.push(Diagnostic {
                        kind: DiagnosticKind::ShadowsInput(v.clone()),
                        span: f.span,
                    });
                }
                let stack = if q.is_trace() {
                    &mut self.traces
                } else {
                    &mut self.props
                };
                stack.push(v.clone());
                self.visit(body);
                if q.is_trace() {
                    self.traces.pop();
                } else {
                    self.props.pop();
                }
            }
            Kind::TraceAtom { prop, trace } => {
                self.trace(trace, f.span);
                self.signal(prop, f.span);
            }
            Kind::PropAtom(v) => {
                if !self.props.iter().any(|p| p == v) {
                    self.out.push(Diagnostic {
                        kind: DiagnosticKind::UnboundPropVariable(v.clone()),
                        span: f.span,
                    });
                }
            }
            Kind::Knowledge {
                agents, trace, body, ..
            } => {
                self.trace(trace, f.span);
                for a in agents {
                    self.signal(a, f.span);
                }
                self.visit(body);
            }
            Kind::Unary(_, b) => self.visit(b),
            Kind::Binary(_, l, r) => {
                self.visit(l);
                self.visit(r);
            }
        }
    }
}

/// Scoping checks on a bare formula. With `signals = None` any proposition name
/// is accepted.
pub fn check_formula(f: &Formula, signals: Option<&[String]>, inputs: &[String]) -> Vec<Diagnostic> {
    let mut c = Checker {
        signals: signals.map(|s| s.iter().map(String::as_str).collect()),
        inputs: inputs.iter().map(String::as_str).collect(),
        seen: BTreeSet::new(),
        traces: Vec::new(),
        props: Vec::new(),
        out: Vec::new(),
    };
    c.visit(f);
    c.out
}

/// Every diagnostic of the document, in traversal order; empty means well-formed.
pub fn check_well_formed(doc: &SpecDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut declared = BTreeSet::new();
    for s in doc.inputs.iter().chain(&doc.outputs) {
        if !declared.insert(s.as_str()) {
            let kind = if doc.is_input(s) && doc.is_output(s) {
                DiagnosticKind::InputOutputOverlap(s.clone())
            } else {
                DiagnosticKind::DuplicateSignal(s.clone())
            };
            out.push(Diagnostic {
                kind,
                span: Span::default(),
            });
        }
    }
    let signals = doc.signals();
    out.extend(check_formula(&doc.formula, Some(&signals), &doc.inputs));
    out
}
