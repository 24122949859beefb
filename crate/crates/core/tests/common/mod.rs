//! Generators shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hyperqptl::formula::{BinOp, Formula, UnOp};
use hyperqptl::machine::MooreSystem;
use hyperqptl::semantics::{Lasso, LassoTrace, TraceSet};
use rand::seq::SliceRandom;
use rand::Rng;

pub const UNARY: [UnOp; 4] = [UnOp::Not, UnOp::Next, UnOp::Eventually, UnOp::Globally];
pub const BINARY: [BinOp; 7] = [
    BinOp::And,
    BinOp::Or,
    BinOp::Implies,
    BinOp::Iff,
    BinOp::Until,
    BinOp::WeakUntil,
    BinOp::Release,
];

/// Every formula of depth at most `depth` built from `atoms` with all unary and
/// binary operators.
pub fn all_bodies(atoms: &[Formula], depth: usize) -> Vec<Formula> {
    let mut layers: Vec<Formula> = atoms.to_vec();
    for _ in 1..depth {
        let mut next = atoms.to_vec();
        for f in &layers {
            for op in UNARY {
                next.push(Formula::unary(op, f.clone()));
            }
        }
        for l in &layers {
            for r in &layers {
                for op in BINARY {
                    next.push(Formula::binary(op, l.clone(), r.clone()));
                }
            }
        }
        layers = next;
    }
    layers
}

/// All distinct words given by lassos over `bits` signals with prefix at most
/// `max_prefix` and loop at most `max_loop`.
pub fn all_lassos(bits: usize, max_prefix: usize, max_loop: usize) -> Vec<Lasso<u64>> {
    let letters = 1u64 << bits;
    let words = |len: usize| -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..letters).map(move |l| {
                        let mut w = w.clone();
                        w.push(l);
                        w
                    })
                })
                .collect();
        }
        out
    };
    let mut out = BTreeSet::new();
    for p in 0..=max_prefix {
        for l in 1..=max_loop {
            for pre in words(p) {
                for cyc in words(l) {
                    out.insert(Lasso::new(pre.clone(), cyc).unwrap().canonical());
                }
            }
        }
    }
    out.into_iter().collect()
}

/// A random formula of depth at most `depth` over `atoms`.
pub fn random_body(rng: &mut impl Rng, atoms: &[Formula], depth: usize) -> Formula {
    if depth <= 1 || rng.gen_bool(0.25) {
        return atoms.choose(rng).unwrap().clone();
    }
    if rng.gen_bool(0.4) {
        Formula::unary(*UNARY.choose(rng).unwrap(), random_body(rng, atoms, depth - 1))
    } else {
        Formula::binary(
            *BINARY.choose(rng).unwrap(),
            random_body(rng, atoms, depth - 1),
            random_body(rng, atoms, depth - 1),
        )
    }
}

/// A complete random Moore machine.
pub fn random_system(rng: &mut impl Rng, inputs: &[&str], outputs: &[&str], states: usize) -> MooreSystem {
    let valuations = 1usize << inputs.len();
    let next = (0..states)
        .map(|_| (0..valuations).map(|_| rng.gen_range(0..states)).collect())
        .collect();
    let labels = (0..states).map(|_| rng.gen_range(0..1u64 << outputs.len())).collect();
    MooreSystem::new(
        inputs.iter().map(|s| s.to_string()).collect(),
        outputs.iter().map(|s| s.to_string()).collect(),
        0,
        next,
        labels,
    )
    .unwrap()
}

/// Converts a bit lasso to named valuations.
pub fn named(t: &Lasso<u64>, signals: &[&str]) -> LassoTrace {
    t.map(|&v| {
        signals
            .iter()
            .enumerate()
            .filter(|(k, _)| v >> k & 1 == 1)
            .map(|(_, s)| s.to_string())
            .collect()
    })
}

pub fn trace_set(signals: &[&str], traces: &[Lasso<u64>]) -> TraceSet {
    TraceSet::with_signals(
        signals.iter().map(|s| s.to_string()).collect(),
        traces.iter().map(|t| named(t, signals)).collect(),
    )
}

pub fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}
