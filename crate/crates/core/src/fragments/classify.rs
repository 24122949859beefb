use std::fmt;

use crate::formula::{QuantKind, QuantifierPrefix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum FragmentClass {
    NoUniversalTrace,
    SingleUniversalDecidable,
    LinearMultiUniversalCandidate,
    UndecidableTraceForallExists,
    UndecidablePropAlternationBeforeUniversal,
    UndecidableNonLinearMultiUniversal,
    OutsideCatalog,
}

impl FragmentClass {
    /// Classes the synthesis pipeline accepts without forcing.
    pub fn is_decidable(self) -> bool {
        matches!(
            self,
            FragmentClass::NoUniversalTrace
                | FragmentClass::SingleUniversalDecidable
                | FragmentClass::LinearMultiUniversalCandidate
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            FragmentClass::NoUniversalTrace => "NoUniversalTrace",
            FragmentClass::SingleUniversalDecidable => "SingleUniversalDecidable",
            FragmentClass::LinearMultiUniversalCandidate => "LinearMultiUniversalCandidate",
            FragmentClass::UndecidableTraceForallExists => "Undecidable_TraceForallExists",
            FragmentClass::UndecidablePropAlternationBeforeUniversal => "Undecidable_PropAlternationBeforeUniversal",
            FragmentClass::UndecidableNonLinearMultiUniversal => "Undecidable_NonLinearMultiUniversal",
            FragmentClass::OutsideCatalog => "OutsideCatalog",
        }
    }

    /// Decidability rank used to compare classes: lower is better understood.
    pub fn rank(self) -> u8 {
        match self {
            FragmentClass::NoUniversalTrace | FragmentClass::SingleUniversalDecidable => 0,
            FragmentClass::LinearMultiUniversalCandidate => 1,
            FragmentClass::OutsideCatalog => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentVerdict {
    pub class: FragmentClass,
    pub justification: String,
}

impl fmt::Display for FragmentVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.class, self.justification)
    }
}

/// Matches `(∃π|∃q)* (∀q)* ∀π (∀q|∃q)*`.
fn single_universal_shape(kinds: &[QuantKind]) -> bool {
    let Some(u) = kinds.iter().position(|&k| k == QuantKind::TraceForall) else {
        return false;
    };
    let (before, after) = (&kinds[..u], &kinds[u + 1..]);
    let first_forall = before
        .iter()
        .position(|&k| k == QuantKind::PropForall)
        .unwrap_or(before.len());
    before[..first_forall]
        .iter()
        .all(|&k| matches!(k, QuantKind::TraceExists | QuantKind::PropExists))
        && before[first_forall..].iter().all(|&k| k == QuantKind::PropForall)
        && after.iter().all(|k| !k.is_trace())
}

/// Places a quantifier prefix in the decidability landscape. Patterns are
/// tried in a fixed priority order, so every prefix gets exactly one class.
pub fn classify(p: &QuantifierPrefix) -> FragmentVerdict {
    let kinds = p.kinds();
    let universals: Vec<usize> = kinds
        .iter()
        .enumerate()
        .filter(|(_, &k)| k == QuantKind::TraceForall)
        .map(|(i, _)| i)
        .collect();
    let verdict = |class, justification: &str| FragmentVerdict {
        class,
        justification: justification.to_string(),
    };
    if universals.is_empty() {
        return verdict(
            FragmentClass::NoUniversalTrace,
            "no universal trace quantifier: (∃*π Q*q)* region, decidable",
        );
    }
    if universals.len() == 1 && single_universal_shape(&kinds) {
        return verdict(
            FragmentClass::SingleUniversalDecidable,
            "one universal trace quantifier in ∃*q/π ∀*q ∀π Q*q: decidable",
        );
    }
    let first_universal = universals[0];
    if kinds[first_universal..].contains(&QuantKind::TraceExists) {
        return verdict(
            FragmentClass::UndecidableTraceForallExists,
            "∀π followed by ∃π: undecidable",
        );
    }
    if universals.len() == 1 {
        let before = &kinds[..first_universal];
        let alternation = before
            .iter()
            .position(|&k| k == QuantKind::PropForall)
            .is_some_and(|i| before[i..].contains(&QuantKind::PropExists));
        if alternation {
            return verdict(
                FragmentClass::UndecidablePropAlternationBeforeUniversal,
                "∀q … ∃q alternation before the single ∀π: undecidable in general",
            );
        }
    }
    if universals.len() >= 2 {
        return verdict(
            FragmentClass::LinearMultiUniversalCandidate,
            "several ∀π without later ∃π: decidable if the formula is linear",
        );
    }
    verdict(
        FragmentClass::OutsideCatalog,
        "prefix matches none of the catalogued regions",
    )
}

/// Class of a prefix known to describe a non-linear formula with several
/// universal trace quantifiers.
pub fn classify_nonlinear(p: &QuantifierPrefix) -> FragmentVerdict {
    let v = classify(p);
    if v.class == FragmentClass::LinearMultiUniversalCandidate {
        FragmentVerdict {
            class: FragmentClass::UndecidableNonLinearMultiUniversal,
            justification: "several ∀π and the formula is not linear: undecidable".into(),
        }
    } else {
        v
    }
}
