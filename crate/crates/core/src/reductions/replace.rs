use std::collections::BTreeSet;

use super::ReductionError;
use crate::formula::{Formula, FreshNames, Kind};

/// Turns the propositional quantifiers over the variables in `vars` into trace
/// quantifiers over fresh trace variables, reading each former variable off the
/// designated input `input` of its new trace.
pub fn prop_to_trace(
    f: &Formula,
    vars: &BTreeSet<String>,
    input: &str,
    inputs: &[String],
) -> Result<Formula, ReductionError> {
    if vars.is_empty() {
        return Ok(f.clone());
    }
    if inputs.is_empty() {
        return Err(ReductionError::NoInputs);
    }
    if !inputs.iter().any(|i| i == input) {
        return Err(ReductionError::NotAnInput(input.to_string()));
    }
    let mut quantified = BTreeSet::new();
    f.walk(&mut |g| {
        if let Kind::Quant(q, v, _) = &g.kind {
            if !q.is_trace() {
                quantified.insert(v.clone());
            }
        }
    });
    if let Some(v) = vars.iter().find(|v| !quantified.contains(*v)) {
        return Err(ReductionError::NotQuantified(v.clone()));
    }
    let mut fresh = FreshNames::for_formula(f);
    Ok(go(f, vars, input, &mut fresh))
}

fn go(f: &Formula, vars: &BTreeSet<String>, input: &str, fresh: &mut FreshNames) -> Formula {
    match &f.kind {
        Kind::Quant(q, v, body) if !q.is_trace() && vars.contains(v) => {
            let pi = fresh.fresh(v);
            let atom = Formula::trace_atom(input, pi.clone());
            let body = body.substitute_prop(v, &atom);
            Formula::with_span(
                Kind::Quant(q.with_trace_sort(true), pi, Box::new(go(&body, vars, input, fresh))),
                f.span,
            )
        }
        _ => f.map_children(|c| go(c, vars, input, fresh)),
    }
}

/// Replaces every propositional quantifier by a trace quantifier, yielding a
/// HyperLTL formula.
pub fn to_hyperltl(f: &Formula, input: &str, inputs: &[String]) -> Result<Formula, ReductionError> {
    let mut vars = BTreeSet::new();
    f.walk(&mut |g| {
        if let Kind::Quant(q, v, _) = &g.kind {
            if !q.is_trace() {
                vars.insert(v.clone());
            }
        }
    });
    prop_to_trace(f, &vars, input, inputs)
}
