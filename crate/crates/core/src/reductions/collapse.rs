use super::{signals_differ, signals_equal, ReductionError};
use crate::formula::{extract_prefix, Formula, QuantKind, QuantifierPrefix};

/// Merges the universal trace quantifiers of a `∀*π Q*q` formula into one,
/// identifying all of their variables with the first one.
pub fn collapse(f: &Formula) -> Result<Formula, ReductionError> {
    let (prefix, body) = extract_prefix(f)?;
    let kinds = prefix.kinds();
    let n = kinds.iter().take_while(|&&k| k == QuantKind::TraceForall).count();
    if n == 0 || kinds[n..].iter().any(|k| k.is_trace()) {
        return Err(ReductionError::CollapseShape(prefix.to_string()));
    }
    let target = prefix.entries[0].var.clone();
    let mut body = body;
    for e in &prefix.entries[1..n] {
        body = body.rename_trace(&e.var, &target);
    }
    let mut out = QuantifierPrefix::default();
    out.push(QuantKind::TraceForall, target);
    out.entries.extend(prefix.entries[n..].iter().cloned());
    Ok(out.compose(body))
}

/// `∀π∀π'. (A_π ≠ A_π') R (C_π = C_π')` over the given trace variable names:
/// the signals in `c` depend only on the signals in `a`.
pub fn build_dep_with(a: &[String], c: &[String], pi: &str, pi2: &str) -> Formula {
    let same = signals_equal(c, pi, pi2);
    let body = if a.is_empty() {
        Formula::globally(same)
    } else {
        Formula::release(signals_differ(a, pi, pi2), same)
    };
    Formula::forall_trace(pi, Formula::forall_trace(pi2, body))
}

pub fn build_dep(a: &[String], c: &[String]) -> Formula {
    build_dep_with(a, c, "pi", "pi'")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn collapse_examples() {
        let f = parse_formula("forall p1:trace. forall p2:trace. G (a[p1] <-> a[p2])").unwrap();
        assert_eq!(
            collapse(&f).unwrap().to_string(),
            "forall p1:trace. G (a[p1] <-> a[p1])"
        );
        let g = parse_formula("forall p1:trace. forall p2:trace. exists q:prop. F (q & a[p1] & b[p2])").unwrap();
        assert_eq!(
            collapse(&g).unwrap().to_string(),
            "forall p1:trace. exists q:prop. F ((q & a[p1]) & b[p1])"
        );
        let h = parse_formula("exists p:trace. forall p1:trace. a[p]").unwrap();
        assert!(matches!(collapse(&h), Err(ReductionError::CollapseShape(_))));
    }

    #[test]
    fn dep_examples() {
        let i = vec!["i".to_string()];
        let o = vec!["o".to_string()];
        assert_eq!(
            build_dep(&i, &o).to_string(),
            "forall pi:trace. forall pi':trace. (!(i[pi] <-> i[pi'])) R (o[pi] <-> o[pi'])"
        );
        assert_eq!(
            build_dep(&[], &o).to_string(),
            "forall pi:trace. forall pi':trace. G (o[pi] <-> o[pi'])"
        );
        assert_eq!(
            build_dep(&i, &[]).to_string(),
            "forall pi:trace. forall pi':trace. (!(i[pi] <-> i[pi'])) R true"
        );
    }
}
