//! Syntax of HyperQPTL: abstract syntax, concrete grammar, scoping checks and
//! the structural normal forms used by the rest of the toolkit.

mod ast;
mod nnf;
mod parse;
mod prefix;
mod print;
mod wf;

pub use ast::{BinOp, Formula, FreshNames, Kind, Polarity, QuantKind, Span, UnOp};
pub use nnf::{is_nnf, to_nnf};
pub use parse::{parse, parse_document_unchecked, parse_formula, ParseError};
pub use prefix::{extract_prefix, prenex, PrefixEntry, PrefixError, QuantifierPrefix};
pub use print::print;
pub use wf::{check_formula, check_well_formed, Diagnostic, DiagnosticKind};

/// A specification: the input/output partition of the signals and a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecDocument {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub formula: Formula,
}

impl SpecDocument {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, formula: Formula) -> Self {
        SpecDocument {
            inputs,
            outputs,
            formula,
        }
    }

    /// Inputs followed by outputs.
    pub fn signals(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.outputs).cloned().collect()
    }

    pub fn is_input(&self, name: &str) -> bool {
        self.inputs.iter().any(|i| i == name)
    }

    pub fn is_output(&self, name: &str) -> bool {
        self.outputs.iter().any(|o| o == name)
    }

    pub fn with_formula(&self, formula: Formula) -> Self {
        SpecDocument {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            formula,
        }
    }
}
