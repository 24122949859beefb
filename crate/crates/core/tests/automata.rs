mod common;

use common::{all_bodies, all_lassos, random_body, random_system, strings};
use hyperqptl::automata::{ltl_to_nba_over, mc_exists_forall, mc_universal};
use hyperqptl::formula::{parse_formula, Formula};
use hyperqptl::machine::{ExistGenerator, MooreSystem};
use hyperqptl::semantics::{holds, system_traces, CompiledFormula, EvalOptions, TraceSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn automata_match_the_oracle_with_constants() {
    let atoms = [
        Formula::tt(),
        Formula::ff(),
        Formula::trace_atom("a", "pi"),
        Formula::trace_atom("b", "pi"),
    ];
    let signals = strings(&["a@pi", "b@pi"]);
    let words = all_lassos(2, 2, 2);
    for body in all_bodies(&atoms, 2) {
        let nba = ltl_to_nba_over(&body, &signals).unwrap();
        let oracle = CompiledFormula::new(&body, &strings(&["a", "b"]), &["pi"], &[]).unwrap();
        for w in &words {
            let want = oracle.eval_bits(&[w], &[0], &[], 0, EvalOptions::default()).unwrap();
            assert_eq!(nba.accepts(w), want, "{body} on {w:?}");
        }
    }
}

#[test]
fn trimmed_automata_of_unsatisfiable_bodies_are_empty() {
    for text in ["a & !a", "G a & F !a", "F G a & G F !a"] {
        let body = parse_formula(text).unwrap();
        assert!(
            hyperqptl::automata::ltl_to_nba(&body).unwrap().trim().is_empty(),
            "{text}"
        );
    }
}

/// `∀π ∀ρ. body`, with `ρ` present only if the body mentions it.
fn universal(body: &Formula, copies: &[&str]) -> Formula {
    copies
        .iter()
        .rev()
        .fold(body.clone(), |f, c| Formula::forall_trace(*c, f))
}

#[test]
fn model_checking_matches_the_oracle_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let opts = EvalOptions::default();
    let mut violated = 0;
    for round in 0..50 {
        let states = rng.gen_range(1..=3);
        let m = random_system(&mut rng, &["i"], &["o"], states);
        let two = round % 2 == 1;
        let copies: &[&str] = if two { &["pi", "rho"] } else { &["pi"] };
        let atoms: Vec<Formula> = copies
            .iter()
            .flat_map(|c| [Formula::trace_atom("i", *c), Formula::trace_atom("o", *c)])
            .collect();
        let body = random_body(&mut rng, &atoms, 4);
        let f = universal(&body, copies);
        let v = mc_universal(&m, &strings(copies), &body).unwrap();
        let sample = system_traces(&m, 2, 2).unwrap();
        let on_sample = holds(&f, &sample, opts).unwrap();
        if v.holds {
            assert!(
                on_sample,
                "round {round}: {f} holds on the system but fails on sampled traces"
            );
        } else {
            violated += 1;
            let cx = v.counterexample.expect("violations come with a counterexample");
            assert!(
                !holds(&f, &cx.traces, opts).unwrap(),
                "round {round}: counterexample does not refute {f}"
            );
            // one trace per copy, in copy order
            for (j, input) in cx.inputs.iter().enumerate() {
                let named = hyperqptl::semantics::bits_to_trace(&m.run(input), &m.signals());
                assert!(
                    named.same_word(&cx.traces.traces[j]),
                    "round {round}: copy {j} is not a run of the system"
                );
            }
        }
    }
    assert!(
        violated > 5 && violated < 45,
        "{violated} violations: the sample is lopsided"
    );
}

fn toggle() -> MooreSystem {
    // o alternates regardless of the input
    MooreSystem::new(
        strings(&["i"]),
        strings(&["o"]),
        0,
        vec![vec![1, 1], vec![0, 0]],
        vec![0, 1],
    )
    .unwrap()
}

#[test]
fn existential_witness_is_checked_against_the_system() {
    // a witness trace with input always off; its outputs must toggle
    let signals = strings(&["i", "o"]);
    let good = ExistGenerator::new(strings(&["w"]), signals.clone(), 0, vec![vec![0], vec![2]]).unwrap();
    let bad = ExistGenerator::new(strings(&["w"]), signals, 0, vec![vec![0]]).unwrap();
    let body = parse_formula("G (o[w] <-> X !o[w]) & G (o[pi] <-> o[w])").unwrap();
    assert!(
        mc_exists_forall(&toggle(), &good, &strings(&["pi"]), &body)
            .unwrap()
            .holds
    );
    assert!(
        !mc_exists_forall(&toggle(), &bad, &strings(&["pi"]), &body)
            .unwrap()
            .holds
    );
}

#[test]
fn observational_determinism_of_a_copy_system() {
    let copy = MooreSystem::new(
        strings(&["i"]),
        strings(&["o"]),
        0,
        vec![vec![0, 1], vec![0, 1]],
        vec![0, 1],
    )
    .unwrap();
    let od = parse_formula("G (i[pi] <-> i[rho]) -> G (o[pi] <-> o[rho])").unwrap();
    assert!(mc_universal(&copy, &strings(&["pi", "rho"]), &od).unwrap().holds);
    let leak = parse_formula("G (o[pi] <-> o[rho])").unwrap();
    let v = mc_universal(&copy, &strings(&["pi", "rho"]), &leak).unwrap();
    assert!(!v.holds);
    let set: TraceSet = v.counterexample.unwrap().traces;
    assert_eq!(set.len(), 2);
}
