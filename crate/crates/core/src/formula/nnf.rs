use super::ast::{BinOp, Formula, Kind, Polarity, UnOp};

/// Negation normal form. Implications and biconditionals are expanded,
/// negations end up on atoms, and every knowledge operator is tagged with the
/// polarity it occurs in (a negative one stays wrapped in a single `!`).
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    let span = f.span;
    let mk = |kind: Kind| Formula::with_span(kind, span);
    match &f.kind {
        Kind::True => mk(if neg { Kind::False } else { Kind::True }),
        Kind::False => mk(if neg { Kind::True } else { Kind::False }),
        Kind::TraceAtom { .. } | Kind::PropAtom(_) => {
            if neg {
                mk(Kind::Unary(UnOp::Not, Box::new(f.clone())))
            } else {
                f.clone()
            }
        }
        Kind::Quant(q, v, body) => {
            let q = if neg { q.dual() } else { *q };
            mk(Kind::Quant(q, v.clone(), Box::new(nnf(body, neg))))
        }
        Kind::Unary(op, b) => match (op, neg) {
            (UnOp::Not, _) => nnf(b, !neg),
            (UnOp::Next, _) => mk(Kind::Unary(UnOp::Next, Box::new(nnf(b, neg)))),
            (UnOp::Eventually, false) | (UnOp::Globally, true) => {
                mk(Kind::Unary(UnOp::Eventually, Box::new(nnf(b, neg))))
            }
            (UnOp::Globally, false) | (UnOp::Eventually, true) => {
                mk(Kind::Unary(UnOp::Globally, Box::new(nnf(b, neg))))
            }
        },
        Kind::Binary(op, l, r) => {
            let bin = |op: BinOp, l: Formula, r: Formula| mk(Kind::Binary(op, Box::new(l), Box::new(r)));
            match (op, neg) {
                (BinOp::And, false) | (BinOp::Or, true) => bin(BinOp::And, nnf(l, neg), nnf(r, neg)),
                (BinOp::Or, false) | (BinOp::And, true) => bin(BinOp::Or, nnf(l, neg), nnf(r, neg)),
                (BinOp::Implies, false) => bin(BinOp::Or, nnf(l, true), nnf(r, false)),
                (BinOp::Implies, true) => bin(BinOp::And, nnf(l, false), nnf(r, true)),
                (BinOp::Iff, false) => bin(
                    BinOp::Or,
                    bin(BinOp::And, nnf(l, false), nnf(r, false)),
                    bin(BinOp::And, nnf(l, true), nnf(r, true)),
                ),
                (BinOp::Iff, true) => bin(
                    BinOp::Or,
                    bin(BinOp::And, nnf(l, false), nnf(r, true)),
                    bin(BinOp::And, nnf(l, true), nnf(r, false)),
                ),
                (BinOp::Until, false) | (BinOp::Release, true) => bin(BinOp::Until, nnf(l, neg), nnf(r, neg)),
                (BinOp::Release, false) | (BinOp::Until, true) => bin(BinOp::Release, nnf(l, neg), nnf(r, neg)),
                (BinOp::WeakUntil, false) => bin(BinOp::WeakUntil, nnf(l, false), nnf(r, false)),
                // !(a W b) = (!b) U (!a & !b)
                (BinOp::WeakUntil, true) => {
                    bin(BinOp::Until, nnf(r, true), bin(BinOp::And, nnf(l, true), nnf(r, true)))
                }
            }
        }
        Kind::Knowledge {
            agents, trace, body, ..
        } => {
            let k = mk(Kind::Knowledge {
                agents: agents.clone(),
                trace: trace.clone(),
                polarity: Some(if neg { Polarity::Negative } else { Polarity::Positive }),
                body: Box::new(nnf(body, false)),
            });
            if neg {
                mk(Kind::Unary(UnOp::Not, Box::new(k)))
            } else {
                k
            }
        }
    }
}

/// True when negations occur only on atoms or on negatively tagged knowledge
/// operators and no implication or biconditional remains.
pub fn is_nnf(f: &Formula) -> bool {
    match &f.kind {
        Kind::Unary(UnOp::Not, b) => match &b.kind {
            Kind::TraceAtom { .. } | Kind::PropAtom(_) => true,
            Kind::Knowledge {
                polarity: Some(Polarity::Negative),
                body,
                ..
            } => is_nnf(body),
            _ => false,
        },
        Kind::Binary(BinOp::Implies | BinOp::Iff, ..) => false,
        Kind::Knowledge { polarity, body, .. } => *polarity == Some(Polarity::Positive) && is_nnf(body),
        _ => f.children().into_iter().all(is_nnf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn nnf_of(text: &str) -> String {
        to_nnf(&parse_formula(text).unwrap()).to_string()
    }

    #[test]
    fn dualities() {
        assert_eq!(nnf_of("!F a[pi]"), "G !a[pi]");
        assert_eq!(nnf_of("!(a U b)"), "(!a) R (!b)");
        assert_eq!(nnf_of("!exists q:prop. G q"), "forall q:prop. F !q");
        assert_eq!(nnf_of("!X a"), "X !a");
        assert_eq!(nnf_of("!(a W b)"), "(!b) U ((!a) & (!b))");
    }

    #[test]
    fn knowledge_polarity() {
        let f = to_nnf(&parse_formula("!K{a}[pi] !b[pi] & K{a}[pi] c[pi]").unwrap());
        assert!(is_nnf(&f));
        let mut tags = Vec::new();
        f.walk(&mut |g| {
            if let Kind::Knowledge { polarity, .. } = &g.kind {
                tags.push(*polarity)
            }
        });
        assert_eq!(tags, vec![Some(Polarity::Negative), Some(Polarity::Positive)]);
        assert_eq!(f.to_string(), "(!K{a}[pi] !b[pi]) & (K{a}[pi] c[pi])");
    }
}
