mod common;

use common::{random_body, strings};
use hyperqptl::automata::{mc_exists_forall, mc_universal};
use hyperqptl::formula::{parse, print, Formula};
use hyperqptl::machine::{ExistGenerator, MooreSystem};
use hyperqptl::synthesis::{
    bound_order, encode, parse_smtlib_answer, prepare, run_solver, solve, Bounds, Cnf, PrepareOptions, SatAnswer,
    SolverConfig, SynthesisInstance,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every complete machine with one input and one output and exactly `n` states.
fn all_systems(n: usize) -> Vec<MooreSystem> {
    let mut out = Vec::new();
    for code in 0..n.pow(2 * n as u32) {
        for labels in 0..1u64 << n {
            let mut c = code;
            let next = (0..n)
                .map(|_| {
                    (0..2)
                        .map(|_| {
                            let s = c % n;
                            c /= n;
                            s
                        })
                        .collect()
                })
                .collect();
            let labels = (0..n).map(|s| labels >> s & 1).collect();
            out.push(MooreSystem::new(strings(&["i"]), strings(&["o"]), 0, next, labels).unwrap());
        }
    }
    out
}

/// Every generator with exactly `m` states for one copy over `{i, o}`.
fn all_generators(copy: &str, m: usize) -> Vec<ExistGenerator> {
    let mut out = Vec::new();
    for target in 0..m {
        for code in 0..4u64.pow(m as u32) {
            let labels = (0..m).map(|e| vec![code >> (2 * e) & 3]).collect();
            out.push(ExistGenerator::new(strings(&[copy]), strings(&["i", "o"]), target, labels).unwrap());
        }
    }
    out
}

fn instance(prefix: &str, body: &Formula) -> SynthesisInstance {
    let doc = parse(&format!("inputs: i\noutputs: o\n{prefix} {}", print(body))).unwrap();
    prepare(&doc, &PrepareOptions::default()).unwrap()
}

fn brute_force(inst: &SynthesisInstance, n: usize, m: usize) -> bool {
    all_systems(n).iter().any(|s| {
        if inst.existential.is_empty() {
            mc_universal(s, &inst.universal, &inst.body).unwrap().holds
        } else {
            all_generators(&inst.existential[0], m)
                .iter()
                .any(|g| mc_exists_forall(s, g, &inst.universal, &inst.body).unwrap().holds)
        }
    })
}

#[test]
fn bounded_realizability_matches_enumeration_for_universal_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let atoms = [Formula::trace_atom("i", "pi"), Formula::trace_atom("o", "pi")];
    let config = SolverConfig::default();
    let (mut sat, mut unsat) = (0, 0);
    for round in 0..40 {
        let body = random_body(&mut rng, &atoms, 4);
        let inst = instance("forall pi:trace.", &body);
        for n in 1..=2 {
            let (outcome, _) = solve(&inst, Bounds::new(n, 1), &config).unwrap();
            let want = brute_force(&inst, n, 1);
            assert_eq!(outcome.is_sat(), want, "round {round}, n = {n}: {body}");
            if want {
                sat += 1;
            } else {
                unsat += 1;
            }
        }
    }
    assert!(sat > 5 && unsat > 5, "{sat} sat, {unsat} unsat");
}

#[test]
fn bounded_realizability_matches_enumeration_with_an_existential_copy() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let atoms = [
        Formula::trace_atom("i", "pi"),
        Formula::trace_atom("o", "pi"),
        Formula::trace_atom("i", "w"),
        Formula::trace_atom("o", "w"),
    ];
    let config = SolverConfig::default();
    let (mut sat, mut unsat) = (0, 0);
    for round in 0..25 {
        let body = random_body(&mut rng, &atoms, 4);
        let inst = instance("exists w:trace. forall pi:trace.", &body);
        for (n, m) in bound_order(2, 2) {
            let (outcome, _) = solve(&inst, Bounds::new(n, m), &config).unwrap();
            let want = brute_force(&inst, n, m);
            assert_eq!(outcome.is_sat(), want, "round {round}, ({n}, {m}): {body}");
            if want {
                sat += 1;
            } else {
                unsat += 1;
            }
        }
    }
    assert!(sat > 5 && unsat > 5, "{sat} sat, {unsat} unsat");
}

#[test]
fn larger_rank_bounds_do_not_change_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let atoms = [Formula::trace_atom("i", "pi"), Formula::trace_atom("o", "pi")];
    let config = SolverConfig::default();
    for round in 0..30 {
        let body = random_body(&mut rng, &atoms, 4);
        let inst = instance("forall pi:trace.", &body);
        for n in 1..=2 {
            let (default, _) = solve(&inst, Bounds::new(n, 1), &config).unwrap();
            let wide = Bounds {
                lambda_max: Some(12),
                ..Bounds::new(n, 1)
            };
            let (larger, _) = solve(&inst, wide, &config).unwrap();
            assert_eq!(default.is_sat(), larger.is_sat(), "round {round}, n = {n}: {body}");
        }
    }
}

fn response() -> SynthesisInstance {
    instance(
        "forall pi:trace.",
        &hyperqptl::formula::parse_formula("G (i[pi] -> X o[pi])").unwrap(),
    )
}

#[test]
fn dimacs_and_smtlib_texts_describe_the_same_problem() {
    let problem = encode(&response(), Bounds::new(2, 1)).unwrap();
    let text = problem.cnf.to_dimacs();
    let back = Cnf::from_dimacs(&text).unwrap();
    assert_eq!(back.vars(), problem.cnf.vars());
    assert!(back.clauses().eq(problem.cnf.clauses()));
    let smt = problem.cnf.to_smtlib();
    assert_eq!(smt.matches("(declare-const").count(), problem.cnf.vars() as usize);
    assert_eq!(smt.matches("(assert").count(), problem.cnf.clause_count());
    assert!(smt.contains("(check-sat)"));
}

#[test]
fn solver_models_satisfy_the_clauses_and_carry_over_through_text() {
    let problem = encode(&response(), Bounds::new(2, 1)).unwrap();
    let SatAnswer::Sat(model) = run_solver(&problem.cnf, &SolverConfig::default()).unwrap() else {
        panic!("response is realizable with two states");
    };
    assert!(problem.cnf.satisfied_by(&model));
    // a model as an SMT solver would print it
    let mut smt = String::from("sat\n(\n");
    for v in 1..=problem.cnf.vars() {
        smt.push_str(&format!("  (define-fun b{v} () Bool {})\n", model[v as usize]));
    }
    smt.push_str(")\n");
    assert_eq!(
        parse_smtlib_answer(&smt, problem.cnf.vars()),
        Some(SatAnswer::Sat(model.clone()))
    );
    let (system, generator) = problem.decode(&model);
    assert_eq!(system.states(), 2);
    assert!(
        mc_exists_forall(&system, &generator, &response().universal, &response().body)
            .unwrap()
            .holds
    );
}

#[test]
fn annotations_respect_the_rank_bound() {
    let inst = instance(
        "forall pi:trace.",
        &hyperqptl::formula::parse_formula("G (i[pi] -> F o[pi]) & G F !o[pi]").unwrap(),
    );
    let bounds = Bounds {
        lambda_max: Some(5),
        ..Bounds::new(2, 1)
    };
    let problem = encode(&inst, bounds).unwrap();
    let SatAnswer::Sat(model) = run_solver(&problem.cnf, &SolverConfig::default()).unwrap() else {
        panic!("realizable with two states");
    };
    let annotation = problem.annotation(&model);
    assert!(!annotation.entries.is_empty());
    assert!(annotation.entries.iter().any(|(_, r)| r.is_some()));
    for ((systems, generator, q), rank) in &annotation.entries {
        assert!(systems.iter().all(|&s| s < 2) && *generator == 0 && *q < problem.automaton_states);
        assert!(rank.is_none_or(|r| r <= 5), "rank {rank:?} above the bound");
    }
}
