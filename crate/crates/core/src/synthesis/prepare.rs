use thiserror::Error;

use crate::formula::{
    check_well_formed, extract_prefix, prenex, Diagnostic, Formula, FreshNames, PrefixError, QuantKind, SpecDocument,
};
use crate::fragments::{classify, FragmentClass, FragmentVerdict};
use crate::reductions::{
    build_consistency, collapse, eliminate_knowledge, to_hyperltl, ReductionError, ReductionTrace,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrepareOptions {
    /// Input carrying propositional variables; defaults to the first input.
    pub designated_input: Option<String>,
    /// Merge several universal trace quantifiers into one.
    pub collapse: bool,
    /// Proceed on prefixes outside the decidable classes.
    pub force: bool,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PrepareError {
    #[error(transparent)]
    Invalid(#[from] Diagnostic),
    #[error(transparent)]
    Prefix(#[from] PrefixError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("prefix class {0} is not decidable; use force to synthesize bound-relative")]
    Undecidable(FragmentClass),
    #[error("reduced prefix `{0}` is not of the form ∃*π ∀*π")]
    UnsupportedShape(String),
    #[error("formula has no trace quantifier to range over the strategy tree")]
    NoTraceQuantifier,
}

/// An `∃*∀*` HyperLTL realizability instance derived from a specification.
#[derive(Clone, Debug)]
pub struct SynthesisInstance {
    pub spec: SpecDocument,
    pub verdict: FragmentVerdict,
    pub trace: ReductionTrace,
    /// Closed reduced formula, before the consistency conjunct.
    pub reduced: Formula,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub existential: Vec<String>,
    pub universal: Vec<String>,
    /// Quantifier-free body of `reduced`.
    pub body: Formula,
    /// `body` with the consistency conjunct for the existential copies.
    pub constrained_body: Formula,
}

impl SynthesisInstance {
    pub fn signals(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.outputs).cloned().collect()
    }
}

/// Turns a specification into a synthesis instance: knowledge elimination,
/// optional collapse, replacement of propositional by trace quantifiers on the
/// designated input, and the consistency conjunct tying existential traces to
/// the strategy.
pub fn prepare(spec: &SpecDocument, opts: &PrepareOptions) -> Result<SynthesisInstance, PrepareError> {
    if let Some(d) = check_well_formed(spec).into_iter().next() {
        return Err(d.into());
    }
    let mut trace = ReductionTrace::default();
    let f0 = prenex(&spec.formula)?;
    if f0 != spec.formula {
        trace.push("prenex form", &spec.formula, &f0);
    }
    let (prefix, _) = extract_prefix(&f0)?;
    let verdict = classify(&prefix);
    if !verdict.class.is_decidable() && !opts.force {
        return Err(PrepareError::Undecidable(verdict.class));
    }
    let mut f = f0;
    if f.contains_knowledge() {
        let g = eliminate_knowledge(&f)?;
        trace.push("knowledge elimination", &f, &g);
        f = g;
    }
    if opts.collapse {
        let (p, _) = extract_prefix(&f)?;
        if p.kinds().iter().filter(|&&k| k == QuantKind::TraceForall).count() > 1 {
            let g = collapse(&f)?;
            trace.push("collapse", &f, &g);
            f = g;
        }
    }
    if f.has_prop_quantifier() {
        let input = match &opts.designated_input {
            Some(i) => i.clone(),
            None => spec.inputs.first().cloned().ok_or(ReductionError::NoInputs)?,
        };
        let g = to_hyperltl(&f, &input, &spec.inputs)?;
        trace.push(format!("propositional to trace quantifiers on input {input}"), &f, &g);
        f = g;
    }
    let (prefix, body) = extract_prefix(&f)?;
    let kinds = prefix.kinds();
    let split = kinds
        .iter()
        .position(|&k| k == QuantKind::TraceForall)
        .unwrap_or(kinds.len());
    if kinds[split..].contains(&QuantKind::TraceExists) {
        return Err(PrepareError::UnsupportedShape(prefix.to_string()));
    }
    let existential: Vec<String> = prefix.entries[..split].iter().map(|e| e.var.clone()).collect();
    let mut universal: Vec<String> = prefix.entries[split..].iter().map(|e| e.var.clone()).collect();
    if existential.is_empty() && universal.is_empty() {
        return Err(PrepareError::NoTraceQuantifier);
    }
    if universal.is_empty() {
        // The strategy tree still has to be ranged over to check consistency.
        universal.push(FreshNames::for_formula(&f).fresh("pi"));
    }
    let constrained_body = if existential.is_empty() {
        body.clone()
    } else {
        let c = build_consistency(&existential, &universal[0], &spec.inputs, &spec.outputs);
        let g = Formula::and(body.clone(), c);
        trace.push("strategy consistency of existential traces", &body, &g);
        g
    };
    Ok(SynthesisInstance {
        spec: spec.clone(),
        verdict,
        trace,
        reduced: f,
        inputs: spec.inputs.clone(),
        outputs: spec.outputs.clone(),
        existential,
        universal,
        body,
        constrained_body,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn promptness_instance() {
        let doc = parse("inputs: i, e\noutputs: o\nexists b:prop. forall pi:trace. F b & ((!b) U e[pi])").unwrap();
        let inst = prepare(&doc, &PrepareOptions::default()).unwrap();
        assert_eq!(inst.existential, vec!["b__1".to_string()]);
        assert_eq!(inst.universal, vec!["pi".to_string()]);
        assert_eq!(inst.verdict.class, FragmentClass::SingleUniversalDecidable);
        assert_eq!(inst.trace.steps.len(), 2);
    }

    #[test]
    fn refusals() {
        let doc = parse("inputs: i\noutputs: o\nforall p:trace. exists q:trace. G (o[p] <-> o[q])").unwrap();
        assert_eq!(
            prepare(&doc, &PrepareOptions::default()).unwrap_err(),
            PrepareError::Undecidable(FragmentClass::UndecidableTraceForallExists)
        );
        let forced = PrepareOptions {
            force: true,
            ..Default::default()
        };
        assert!(matches!(prepare(&doc, &forced), Err(PrepareError::UnsupportedShape(_))));
        let flat = parse("inputs: i\noutputs: o\ntrue").unwrap();
        assert_eq!(
            prepare(&flat, &PrepareOptions::default()).unwrap_err(),
            PrepareError::NoTraceQuantifier
        );
    }

    #[test]
    fn collapse_reduces_copies() {
        let doc = parse("inputs: i\noutputs: o\nforall p:trace. forall q:trace. G (o[p] <-> o[q])").unwrap();
        let plain = prepare(&doc, &PrepareOptions::default()).unwrap();
        assert_eq!(plain.universal.len(), 2);
        let opts = PrepareOptions {
            collapse: true,
            ..Default::default()
        };
        assert_eq!(prepare(&doc, &opts).unwrap().universal.len(), 1);
    }
}
