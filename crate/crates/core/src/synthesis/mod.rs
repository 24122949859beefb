//! Bounded synthesis of `∃*∀*` HyperLTL instances: a Moore system and an
//! autonomous generator for the existential traces are encoded as a
//! propositional constraint system, solved and checked.

mod cnf;
mod encode;
mod prepare;
mod solve;

pub use cnf::{parse_dimacs_answer, parse_smtlib_answer, Cnf, DimacsError, SatAnswer};
pub use encode::{encode, Annotation, Bounds, ConstraintProblem, NodeKey};
pub use prepare::{prepare, PrepareError, PrepareOptions, SynthesisInstance};
pub use solve::{
    bound_order, run_solver, search, solve, split_command, Attempt, Backend, Outcome, SearchReport, SolverConfig,
    SolverError, SynthesisError, SOLVER_ENV,
};
