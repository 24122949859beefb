use std::collections::BTreeMap;

use super::{signals_differ, signals_equal, ReductionError};
use crate::formula::{extract_prefix, Formula, FreshNames, QuantKind, QuantifierPrefix};

/// `⋀_j (I_πj ≠ I_u) R (O_πj = O_u)`: every existential trace is an output
/// of the same strategy as the universal trace `u`.
pub fn build_consistency(existential: &[String], universal: &str, inputs: &[String], outputs: &[String]) -> Formula {
    Formula::and_all(existential.iter().map(|pj| {
        Formula::release(
            signals_differ(inputs, pj, universal),
            signals_equal(outputs, pj, universal),
        )
    }))
}

/// Encodes a formula without universal trace quantifiers in QPTL: each
/// existential trace becomes a block of existential propositions, one per
/// signal, and all pairs of encoded traces are required to be consistent with
/// one strategy.
pub fn encode_qptl_no_universal(f: &Formula, inputs: &[String], outputs: &[String]) -> Result<Formula, ReductionError> {
    if f.contains_knowledge() {
        return Err(ReductionError::KnowledgePresent);
    }
    let (prefix, body) = extract_prefix(f)?;
    if prefix.kinds().contains(&QuantKind::TraceForall) {
        return Err(ReductionError::UniversalTrace);
    }
    let signals: Vec<String> = inputs.iter().chain(outputs).cloned().collect();
    let mut fresh = FreshNames::for_formula(f);
    let mut names: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut out = QuantifierPrefix::default();
    let mut traces = Vec::new();
    for e in &prefix.entries {
        if e.kind != QuantKind::TraceExists {
            out.push(e.kind, e.var.clone());
            continue;
        }
        for s in &signals {
            let candidate = format!("{s}_{}", e.var);
            let name = if fresh.try_reserve(&candidate) {
                candidate
            } else {
                fresh.fresh(&candidate)
            };
            names.insert((s.clone(), e.var.clone()), name.clone());
            out.push(QuantKind::PropExists, name);
        }
        traces.push(e.var.clone());
    }
    let prop_of = |s: &str, t: &str| Formula::prop(names[&(s.to_string(), t.to_string())].clone());
    let body = body.map_trace_atoms(&mut |p, t| {
        names
            .get(&(p.to_string(), t.to_string()))
            .map(|n| Formula::prop(n.clone()))
    });
    let mut pairs = Vec::new();
    for a in &traces {
        for b in &traces {
            let differ = Formula::or_all(inputs.iter().map(|i| Formula::xor(prop_of(i, a), prop_of(i, b))));
            let same = Formula::and_all(outputs.iter().map(|o| Formula::iff(prop_of(o, a), prop_of(o, b))));
            pairs.push(Formula::release(differ, same));
        }
    }
    let body = if pairs.is_empty() {
        body
    } else {
        Formula::and(body, Formula::and_all(pairs))
    };
    Ok(out.compose(body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn single_existential_trace() {
        let f = parse_formula("exists pi:trace. F a[pi]").unwrap();
        let g = encode_qptl_no_universal(&f, &s(&["i"]), &s(&["a"])).unwrap();
        assert_eq!(
            g.to_string(),
            "exists i_pi:prop. exists a_pi:prop. (F a_pi) & ((!(i_pi <-> i_pi)) R (a_pi <-> a_pi))"
        );
    }

    #[test]
    fn two_traces_give_four_quantifiers_and_four_pairs() {
        let f = parse_formula("exists p1:trace. exists p2:trace. F (a[p1] & !a[p2])").unwrap();
        let g = encode_qptl_no_universal(&f, &s(&["i"]), &s(&["a"])).unwrap();
        let (p, body) = extract_prefix(&g).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.kinds().iter().all(|&k| k == QuantKind::PropExists));
        assert_eq!(g.to_string().matches(" R ").count(), 4);
        assert!(body.trace_propositions().is_empty());
    }

    #[test]
    fn rejects_universal_traces() {
        let f = parse_formula("forall pi:trace. a[pi]").unwrap();
        assert_eq!(
            encode_qptl_no_universal(&f, &s(&["i"]), &s(&["a"])),
            Err(ReductionError::UniversalTrace)
        );
    }

    #[test]
    fn consistency_constraint() {
        let c = build_consistency(&s(&["p1"]), "pi", &s(&["i"]), &s(&["o"]));
        assert_eq!(c.to_string(), "(!(i[p1] <-> i[pi])) R (o[p1] <-> o[pi])");
        assert_eq!(build_consistency(&[], "pi", &s(&["i"]), &s(&["o"])), Formula::tt());
    }
}
