mod common;

use std::collections::BTreeSet;

use common::{all_lassos, random_body, random_system, strings, trace_set};
use hyperqptl::formula::{extract_prefix, Formula, QuantKind, QuantifierPrefix};
use hyperqptl::fragments::classify;
use hyperqptl::reductions::{build_dep, collapse, prop_to_trace};
use hyperqptl::semantics::{eval, system_traces, Assignment, EvalOptions, Lasso, LassoTrace, TraceSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(rng: &mut ChaCha8Rng, max: usize) -> TraceSet {
    let size = rng.gen_range(1..=max);
    let words = all_lassos(2, 1, 2);
    let pick: Vec<_> = words.choose_multiple(rng, size).cloned().collect();
    trace_set(&["i", "o"], &pick)
}

fn projection(t: &LassoTrace, signal: &str) -> Lasso<bool> {
    t.map(|v| v.contains(signal)).canonical()
}

#[test]
fn replaced_quantifier_ranges_over_input_projections() {
    // With `q` ranging over the values the designated input takes on the set,
    // `Q q. ∀π. φ` and its trace-quantified replacement agree.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let opts = EvalOptions::default();
    let atoms = [
        Formula::prop("q"),
        Formula::trace_atom("i", "pi"),
        Formula::trace_atom("o", "pi"),
    ];
    let vars: BTreeSet<String> = ["q".to_string()].into();
    for round in 0..200 {
        let set = random_set(&mut rng, 4);
        let body = Formula::forall_trace("pi", random_body(&mut rng, &atoms, 4));
        let exists = rng.gen_bool(0.5);
        let kind = if exists {
            QuantKind::PropExists
        } else {
            QuantKind::PropForall
        };
        let f = Formula::quant(kind, "q", body.clone());
        let g = prop_to_trace(&f, &vars, "i", &strings(&["i"])).unwrap();
        assert!(!g.has_prop_quantifier());
        let values: BTreeSet<Lasso<bool>> = set.traces.iter().map(|t| projection(t, "i")).collect();
        let at = |w: &Lasso<bool>| {
            let mut a = Assignment::new();
            a.props.insert("q".into(), w.clone());
            eval(&body, &set, &a, 0, opts).unwrap().holds
        };
        let want = if exists {
            values.iter().any(at)
        } else {
            values.iter().all(at)
        };
        let got = eval(&g, &set, &Assignment::new(), 0, opts).unwrap().holds;
        assert_eq!(want, got, "round {round}: {f} became {g} on\n{set}");
    }
}

#[test]
fn collapsed_formulas_are_implied() {
    // Instantiating every universal copy with the same trace is sound.
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let opts = EvalOptions::default();
    let atoms = [
        Formula::trace_atom("i", "pi"),
        Formula::trace_atom("o", "pi"),
        Formula::trace_atom("i", "rho"),
        Formula::trace_atom("o", "rho"),
    ];
    let mut held = 0;
    for round in 0..200 {
        let set = random_set(&mut rng, 3);
        let f = Formula::forall_trace("pi", Formula::forall_trace("rho", random_body(&mut rng, &atoms, 4)));
        let g = collapse(&f).unwrap();
        assert!(g.free_trace_vars().is_empty());
        if eval(&f, &set, &Assignment::new(), 0, opts).unwrap().holds {
            held += 1;
            assert!(
                eval(&g, &set, &Assignment::new(), 0, opts).unwrap().holds,
                "round {round}: {f} on\n{set}"
            );
        }
    }
    assert!(held > 10, "only {held} formulas held");
}

#[test]
fn collapse_never_makes_a_prefix_less_decidable() {
    use QuantKind::*;
    let kinds = [TraceForall, PropForall, PropExists];
    let mut checked = 0;
    for len in 2..=5 {
        for code in 0..3usize.pow(len) {
            let mut c = code;
            let mut prefix = QuantifierPrefix::default();
            let mut head = true;
            let mut stop = false;
            for j in 0..len {
                let k = kinds[c % 3];
                c /= 3;
                // collapse accepts universal traces followed by propositional quantifiers
                if k == TraceForall && !head {
                    stop = true;
                }
                head &= k == TraceForall;
                prefix.push(k, format!("x{j}"));
            }
            if stop || prefix.kinds()[0] != TraceForall {
                continue;
            }
            let f = prefix.compose(Formula::tt());
            let g = collapse(&f).unwrap();
            let (after, _) = extract_prefix(&g).unwrap();
            let (before, after) = (classify(&prefix).class, classify(&after).class);
            assert!(after.rank() <= before.rank(), "{prefix}: {before} became {after}");
            assert_eq!(after.rank(), 0, "{prefix} collapsed to {after}");
            checked += 1;
        }
    }
    assert!(checked > 20);
}

/// Direct check that `c` is determined by what `a` showed so far: for every
/// pair, `c` agrees up to and including the first position where `a` differs.
fn depends(set: &TraceSet, a: &[&str], c: &[&str]) -> bool {
    let horizon = set.traces.iter().map(|t| t.prefix_len()).max().unwrap_or(0)
        + set
            .traces
            .iter()
            .map(|t| t.cycle_len())
            .fold(1, |x, y| x * y / gcd(x, y));
    let same = |t: &LassoTrace, u: &LassoTrace, sigs: &[&str], j: usize| {
        sigs.iter().all(|s| t.at(j).contains(*s) == u.at(j).contains(*s))
    };
    set.traces.iter().all(|t| {
        set.traces.iter().all(|u| {
            for j in 0..horizon {
                if !same(t, u, c, j) {
                    return false;
                }
                if !same(t, u, a, j) {
                    return true;
                }
            }
            true
        })
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn dependency_formula_matches_a_direct_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let opts = EvalOptions::default();
    let (i, o) = (strings(&["i"]), strings(&["o"]));
    let (mut yes, mut no) = (0, 0);
    for _ in 0..200 {
        let set = random_set(&mut rng, 4);
        for (a, c) in [(&i, &o), (&o, &i), (&vec![], &o)] {
            let want = depends(
                &set,
                &a.iter().map(String::as_str).collect::<Vec<_>>(),
                &c.iter().map(String::as_str).collect::<Vec<_>>(),
            );
            let got = eval(&build_dep(a, c), &set, &Assignment::new(), 0, opts).unwrap().holds;
            assert_eq!(want, got, "dep({a:?}, {c:?}) on\n{set}");
            if want {
                yes += 1;
            } else {
                no += 1;
            }
        }
    }
    assert!(yes > 20 && no > 20, "{yes} dependent, {no} not");
}

#[test]
fn moore_outputs_depend_on_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let dep = build_dep(&strings(&["i"]), &strings(&["o"]));
    for _ in 0..20 {
        let states = rng.gen_range(1..=3);
        let m = random_system(&mut rng, &["i"], &["o"], states);
        let set = system_traces(&m, 1, 2).unwrap();
        assert!(
            eval(&dep, &set, &Assignment::new(), 0, EvalOptions::default())
                .unwrap()
                .holds
        );
    }
}
