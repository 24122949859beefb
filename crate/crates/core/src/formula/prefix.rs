use std::fmt;

use thiserror::Error;

use super::ast::{BinOp, Formula, Kind, QuantKind, Span};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrefixEntry {
    pub kind: QuantKind,
    pub var: String,
}

/// Quantifier block of a prenex formula, outermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuantifierPrefix {
    pub entries: Vec<PrefixEntry>,
}

impl QuantifierPrefix {
    pub fn new(entries: Vec<PrefixEntry>) -> Self {
        QuantifierPrefix { entries }
    }

    pub fn from_kinds(kinds: &[(QuantKind, &str)]) -> Self {
        QuantifierPrefix {
            entries: kinds
                .iter()
                .map(|(kind, var)| PrefixEntry {
                    kind: *kind,
                    var: var.to_string(),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn kinds(&self) -> Vec<QuantKind> {
        self.entries.iter().map(|e| e.kind).collect()
    }

    pub fn push(&mut self, kind: QuantKind, var: impl Into<String>) {
        self.entries.push(PrefixEntry { kind, var: var.into() });
    }

    /// Variables bound by entries of the given kind, in order.
    pub fn vars_of(&self, kind: QuantKind) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.var.clone())
            .collect()
    }

    /// Wraps `body` in the prefix.
    pub fn compose(&self, body: Formula) -> Formula {
        self.entries
            .iter()
            .rev()
            .fold(body, |acc, e| Formula::quant(e.kind, e.var.clone(), acc))
    }
}

impl fmt::Display for QuantifierPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let (q, sort) = e.kind.keyword();
            write!(f, "{q} {}:{sort}.", e.var)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PrefixError {
    #[error("{span}: formula is not in prenex form: quantifier over {var} below the prefix")]
    NotPrenex { var: String, span: Span },
}

/// Splits a prenex formula into its quantifier prefix and quantifier-free body.
pub fn extract_prefix(f: &Formula) -> Result<(QuantifierPrefix, Formula), PrefixError> {
    let mut prefix = QuantifierPrefix::default();
    let mut cur = f;
    while let Kind::Quant(q, v, body) = &cur.kind {
        prefix.push(*q, v.clone());
        cur = body;
    }
    let mut inner = None;
    cur.walk(&mut |g| {
        if let Kind::Quant(_, v, _) = &g.kind {
            inner.get_or_insert((v.clone(), g.span));
        }
    });
    if let Some((var, span)) = inner {
        return Err(PrefixError::NotPrenex { var, span });
    }
    Ok((prefix, cur.clone()))
}

/// Brings a formula into prenex form by pulling quantifiers out of conjunctions
/// and disjunctions. Relies on pairwise distinct bound names; quantifiers below
/// any other operator are reported.
pub fn prenex(f: &Formula) -> Result<Formula, PrefixError> {
    let (prefix, body) = hoist(f)?;
    Ok(prefix.compose(body))
}

fn hoist(f: &Formula) -> Result<(QuantifierPrefix, Formula), PrefixError> {
    match &f.kind {
        Kind::Quant(q, v, body) => {
            let (mut inner, b) = hoist(body)?;
            inner.entries.insert(
                0,
                PrefixEntry {
                    kind: *q,
                    var: v.clone(),
                },
            );
            Ok((inner, b))
        }
        Kind::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
            let (mut pl, bl) = hoist(l)?;
            let (pr, br) = hoist(r)?;
            pl.entries.extend(pr.entries);
            Ok((
                pl,
                Formula::with_span(Kind::Binary(*op, Box::new(bl), Box::new(br)), f.span),
            ))
        }
        // Not a quantifier, so extract_prefix only checks the subtree.
        _ => extract_prefix(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn promptness_prefix() {
        let f = parse_formula("exists b:prop. forall pi:trace. F b & ((!b) U e[pi])").unwrap();
        let (p, body) = extract_prefix(&f).unwrap();
        assert_eq!(
            p,
            QuantifierPrefix::from_kinds(&[(QuantKind::PropExists, "b"), (QuantKind::TraceForall, "pi")])
        );
        assert_eq!(body.to_string(), "(F b) & ((!b) U e[pi])");
        assert_eq!(p.compose(body), f);
    }

    #[test]
    fn bounded_waiting_prefix() {
        let f = parse_formula(
            "forall pi:trace. exists b:prop. forall pi2:trace. G ((r[pi] & r[pi2]) -> X (F b & ((!b) U g[pi]) & ((!b) U g[pi2])))",
        )
        .unwrap();
        let (p, _) = extract_prefix(&f).unwrap();
        assert_eq!(
            p.kinds(),
            vec![QuantKind::TraceForall, QuantKind::PropExists, QuantKind::TraceForall]
        );
    }

    #[test]
    fn quantifier_free() {
        let f = parse_formula("G a").unwrap();
        let (p, b) = extract_prefix(&f).unwrap();
        assert!(p.is_empty());
        assert_eq!(b, f);
    }

    #[test]
    fn non_prenex_is_rejected() {
        let f = parse_formula("forall pi:trace. G exists q:prop. q").unwrap();
        assert!(matches!(
            extract_prefix(&f),
            Err(PrefixError::NotPrenex { ref var, .. }) if var == "q"
        ));
        assert!(prenex(&f).is_err());
    }

    #[test]
    fn hoisting() {
        let f = parse_formula("(forall a:trace. x[a]) & exists q:prop. G q").unwrap();
        assert_eq!(
            prenex(&f).unwrap().to_string(),
            "forall a:trace. exists q:prop. x[a] & (G q)"
        );
    }
}
