use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::{Formula, FreshNames};
use crate::machine::MooreSystem;
use crate::reductions::{build_dep_with, collapse, ReductionError};
use crate::semantics::{holds, system_traces, EvalError, EvalOptions, SystemTraceError, TraceSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinearityError {
    #[error("dependency sets of {0} and {1} are not ordered by inclusion")]
    NotAChain(String, String),
    #[error("no dependency set given for output {0}")]
    MissingOutput(String),
    #[error("{0} is not an output of the system")]
    UnknownOutput(String),
    #[error("{0} is not an input of the system")]
    UnknownInput(String),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    System(#[from] SystemTraceError),
}

/// Both sides of the linearity equivalence on one system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCheck {
    /// `φ ∧ dep(I, O)`
    pub original: bool,
    /// `collapse(φ) ∧ ⋀_i dep(J_i, {o_i})`
    pub collapsed: bool,
    pub traces: usize,
}

impl LinearCheck {
    pub fn consistent(&self) -> bool {
        self.original == self.collapsed
    }
}

fn holds_dep(
    set: &TraceSet,
    a: &[String],
    c: &[String],
    fresh: &mut FreshNames,
    opts: EvalOptions,
) -> Result<bool, EvalError> {
    let (pi, pi2) = (fresh.fresh("pi"), fresh.fresh("pi"));
    holds(&build_dep_with(a, c, &pi, &pi2), set, opts)
}

/// Evaluates both sides of the linearity equivalence for the dependency chain
/// `deps` (output to the inputs it may observe) on the traces of `m` generated
/// by input lassos within the given bounds. Disagreement shows that `φ` is not
/// linear for `deps`; agreement is only evidence.
pub fn check_linear_on_system(
    phi: &Formula,
    deps: &BTreeMap<String, BTreeSet<String>>,
    m: &MooreSystem,
    max_prefix: usize,
    max_loop: usize,
    opts: EvalOptions,
) -> Result<LinearCheck, LinearityError> {
    for (o, j) in deps {
        if !m.outputs.contains(o) {
            return Err(LinearityError::UnknownOutput(o.clone()));
        }
        if let Some(i) = j.iter().find(|i| !m.inputs.contains(i)) {
            return Err(LinearityError::UnknownInput(i.clone()));
        }
    }
    if let Some(o) = m.outputs.iter().find(|o| !deps.contains_key(*o)) {
        return Err(LinearityError::MissingOutput(o.clone()));
    }
    for (o1, j1) in deps {
        for (o2, j2) in deps {
            if !j1.is_subset(j2) && !j2.is_subset(j1) {
                return Err(LinearityError::NotAChain(o1.clone(), o2.clone()));
            }
        }
    }
    let set = system_traces(m, max_prefix, max_loop)?;
    let mut fresh = FreshNames::for_formula(phi);
    let original = holds(phi, &set, opts)? && holds_dep(&set, &m.inputs, &m.outputs, &mut fresh, opts)?;
    let mut collapsed = holds(&collapse(phi)?, &set, opts)?;
    for (o, j) in deps {
        if !collapsed {
            break;
        }
        let j: Vec<String> = j.iter().cloned().collect();
        collapsed = holds_dep(&set, &j, std::slice::from_ref(o), &mut fresh, opts)?;
    }
    Ok(LinearCheck {
        original,
        collapsed,
        traces: set.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn copy_system() -> MooreSystem {
        // o repeats the previous input
        MooreSystem::new(
            vec!["i".into()],
            vec!["o".into()],
            0,
            vec![vec![0, 1], vec![0, 1]],
            vec![0, 1],
        )
        .unwrap()
    }

    fn deps(j: &[&str]) -> BTreeMap<String, BTreeSet<String>> {
        [("o".to_string(), j.iter().map(|s| s.to_string()).collect())].into()
    }

    #[test]
    fn agreement_on_a_linear_formula() {
        let f = parse_formula("forall p1:trace. forall p2:trace. G (o[p1] <-> o[p2])").unwrap();
        let r = check_linear_on_system(&f, &deps(&[]), &copy_system(), 1, 1, EvalOptions::default()).unwrap();
        assert!(!r.original && !r.collapsed && r.consistent());
        let k = MooreSystem::constant(vec!["i".into()], vec!["o".into()], 1);
        let r = check_linear_on_system(&f, &deps(&[]), &k, 1, 1, EvalOptions::default()).unwrap();
        assert!(r.original && r.collapsed);
    }

    #[test]
    fn disagreement_exposes_non_linearity() {
        let f = parse_formula("forall p1:trace. forall p2:trace. G (i[p1] <-> i[p2])").unwrap();
        let r = check_linear_on_system(&f, &deps(&["i"]), &copy_system(), 1, 1, EvalOptions::default()).unwrap();
        assert!(!r.original && r.collapsed && !r.consistent());
    }

    #[test]
    fn chain_and_coverage_errors() {
        let m = MooreSystem::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            0,
            vec![vec![0; 4]],
            vec![0],
        )
        .unwrap();
        let f = parse_formula("forall p:trace. x[p]").unwrap();
        let mut d: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        d.insert("x".into(), ["a".to_string()].into());
        assert_eq!(
            check_linear_on_system(&f, &d, &m, 1, 1, EvalOptions::default()),
            Err(LinearityError::MissingOutput("y".into()))
        );
        d.insert("y".into(), ["b".to_string()].into());
        assert!(matches!(
            check_linear_on_system(&f, &d, &m, 1, 1, EvalOptions::default()),
            Err(LinearityError::NotAChain(..))
        ));
    }
}
