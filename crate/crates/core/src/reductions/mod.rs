//! Syntactic transformations between fragments: propositional to trace
//! quantification, collapse of universal trace quantifiers, dependency
//! constraints, knowledge elimination and the QPTL encoding of formulas
//! without universal trace quantifiers.

mod collapse;
mod knowledge;
mod qptl;
mod replace;

use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, PrefixError};

pub use collapse::{build_dep, build_dep_with, collapse};
pub use knowledge::eliminate_knowledge;
pub use qptl::{build_consistency, encode_qptl_no_universal};
pub use replace::{prop_to_trace, to_hyperltl};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("propositional variable {0} is not quantified in the formula")]
    NotQuantified(String),
    #[error("{0} is not an input signal")]
    NotAnInput(String),
    #[error("the specification has no input signal to carry propositional variables")]
    NoInputs,
    #[error("collapse needs a prefix of universal trace quantifiers followed only by propositional ones, got `{0}`")]
    CollapseShape(String),
    #[error("formula has a universal trace quantifier")]
    UniversalTrace,
    #[error("formula still contains a knowledge operator")]
    KnowledgePresent,
    #[error(transparent)]
    Prefix(#[from] PrefixError),
}

/// `⋀_{s} s[pi] <-> s[pi2]`
pub fn signals_equal(sigs: &[String], pi: &str, pi2: &str) -> Formula {
    Formula::and_all(
        sigs.iter()
            .map(|s| Formula::iff(Formula::trace_atom(s, pi), Formula::trace_atom(s, pi2))),
    )
}

/// `⋁_{s} !(s[pi] <-> s[pi2])`
pub fn signals_differ(sigs: &[String], pi: &str, pi2: &str) -> Formula {
    Formula::or_all(
        sigs.iter()
            .map(|s| Formula::xor(Formula::trace_atom(s, pi), Formula::trace_atom(s, pi2))),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: String,
    pub before: Formula,
    pub after: Formula,
}

/// Log of the transformations applied to a specification, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    pub fn push(&mut self, rule: impl Into<String>, before: &Formula, after: &Formula) {
        self.steps.push(ReductionStep {
            rule: rule.into(),
            before: before.clone(),
            after: after.clone(),
        });
    }

    pub fn rules(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.rule.as_str()).collect()
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{}. {}", i + 1, s.rule)?;
            writeln!(f, "   in:  {}", s.before)?;
            writeln!(f, "   out: {}", s.after)?;
        }
        Ok(())
    }
}
