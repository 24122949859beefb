//! Büchi automata for quantifier-free bodies and explicit-state model checking
//! of `∃*∀*` properties on Moore systems.

pub(crate) mod graph;
pub(crate) mod mc;
mod nba;

use thiserror::Error;

pub use mc::{
    mc_exists_forall, mc_universal, model_check, self_composition, self_composition_named, Counterexample, McVerdict,
    ProductGraph, ProductNode,
};
pub use nba::{body_signals, flat_name, ltl_to_nba, ltl_to_nba_over, Guard, Nba, NbaEdge};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("quantifier over {0} left in an automaton body")]
    ResidualQuantifier(String),
    #[error("knowledge operator left in an automaton body")]
    Knowledge,
    #[error("unknown signal {0}")]
    UnknownSignal(String),
    #[error("trace variable {0} is not bound to a copy")]
    UnboundTrace(String),
    #[error("{0} signals exceed the supported 64")]
    TooManySignals(usize),
    #[error("{0} eventualities exceed the supported 64")]
    TooManyEventualities(usize),
    #[error("generator signals {found:?} do not match system signals {expected:?}")]
    GeneratorSignals { expected: Vec<String>, found: Vec<String> },
    #[error("product too large: {0}")]
    TooLarge(String),
    #[error("{0}")]
    Shape(String),
}
