//! HyperQPTL specifications: parsing, fragment classification, reductions to
//! an ∃*∀* HyperLTL core, model checking and bounded synthesis.

pub mod automata;
pub mod bench;
pub mod formula;
pub mod fragments;
pub mod machine;
pub mod reductions;
pub mod semantics;
pub mod synthesis;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/fragments.md")]
    mod fragments {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/automata.md")]
    mod automata {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
