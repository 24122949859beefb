use super::{signals_equal, ReductionError};
use crate::formula::{extract_prefix, prenex, to_nnf, Formula, FreshNames, Kind, Polarity, QuantKind, UnOp};

struct Occurrence {
    agents: Vec<String>,
    trace: String,
    body: Formula,
    positive: bool,
}

/// Replaces the first knowledge occurrence in pre-order by `u`.
fn replace_first(f: &Formula, u: &str, found: &mut Option<Occurrence>) -> Formula {
    if found.is_some() {
        return f.clone();
    }
    let occurrence = |k: &Formula, positive: bool| match &k.kind {
        Kind::Knowledge {
            agents, trace, body, ..
        } => Some(Occurrence {
            agents: agents.clone(),
            trace: trace.clone(),
            body: (**body).clone(),
            positive,
        }),
        _ => None,
    };
    match &f.kind {
        Kind::Unary(UnOp::Not, inner)
            if matches!(
                inner.kind,
                Kind::Knowledge {
                    polarity: Some(Polarity::Negative),
                    ..
                }
            ) =>
        {
            *found = occurrence(inner, false);
            Formula::prop(u)
        }
        Kind::Knowledge { .. } => {
            *found = occurrence(f, true);
            Formula::prop(u)
        }
        _ => f.map_children(|c| replace_first(c, u, found)),
    }
}

/// Removes every knowledge operator, outermost first. Each occurrence
/// `K_{A,π} ψ` becomes a fresh propositional variable `u` constrained, for every
/// marker `r` of an observation prefix ending in a `u` position, by a fresh
/// trace `π'` that agrees with `π` on `A` along the marked prefix. The new
/// quantifiers `∃u ∀r Qπ'` are appended to the prefix. The result is prenex,
/// in negation normal form and knowledge-free; formulas without knowledge are
/// returned unchanged.
pub fn eliminate_knowledge(f: &Formula) -> Result<Formula, ReductionError> {
    if !f.contains_knowledge() {
        return Ok(f.clone());
    }
    let mut cur = prenex(&to_nnf(f))?;
    loop {
        let (mut prefix, body) = extract_prefix(&cur)?;
        let mut fresh = FreshNames::for_formula(&cur);
        let u = fresh.fresh("u");
        let mut found = None;
        let replaced = replace_first(&body, &u, &mut found);
        let Some(k) = found else {
            return Ok(cur);
        };
        let r = fresh.fresh("r");
        let pi2 = fresh.fresh(&k.trace);
        let rp = || Formula::prop(r.clone());
        // r holds exactly on an initial segment whose last position satisfies u
        let marker = Formula::until(
            rp(),
            Formula::and_all([
                Formula::prop(u.clone()),
                rp(),
                Formula::next(Formula::globally(Formula::not(rp()))),
            ]),
        );
        let agree = Formula::globally(Formula::implies(rp(), signals_equal(&k.agents, &k.trace, &pi2)));
        let last = Formula::and(rp(), Formula::next(Formula::not(rp())));
        let psi = k.body.rename_trace(&k.trace, &pi2);
        let (template, q) = if k.positive {
            (
                Formula::implies(
                    Formula::and(marker, agree),
                    Formula::globally(Formula::implies(last, psi)),
                ),
                QuantKind::TraceForall,
            )
        } else {
            (
                Formula::implies(
                    marker,
                    Formula::and(agree, Formula::globally(Formula::implies(last, Formula::not(psi)))),
                ),
                QuantKind::TraceExists,
            )
        };
        prefix.push(QuantKind::PropExists, u);
        prefix.push(QuantKind::PropForall, r);
        prefix.push(q, pi2);
        let body = to_nnf(&Formula::and(replaced, template));
        cur = prenex(&prefix.compose(body))?;
    }
}
