use hyperqptl::formula::{
    check_well_formed, extract_prefix, is_nnf, parse, parse_formula, prenex, print, to_nnf, BinOp, Formula, QuantKind,
    UnOp,
};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::tt()),
        Just(Formula::ff()),
        prop::sample::select(vec!["a", "b"]).prop_map(Formula::prop),
        (
            prop::sample::select(vec!["x", "y"]),
            prop::sample::select(vec!["pi", "rho"])
        )
            .prop_map(|(p, t)| Formula::trace_atom(p, t)),
    ]
}

fn unop() -> impl Strategy<Value = UnOp> {
    prop::sample::select(vec![UnOp::Not, UnOp::Next, UnOp::Eventually, UnOp::Globally])
}

fn binop() -> impl Strategy<Value = BinOp> {
    prop::sample::select(vec![
        BinOp::And,
        BinOp::Or,
        BinOp::Implies,
        BinOp::Iff,
        BinOp::Until,
        BinOp::WeakUntil,
        BinOp::Release,
    ])
}

fn kind() -> impl Strategy<Value = QuantKind> {
    prop::sample::select(vec![
        QuantKind::TraceForall,
        QuantKind::TraceExists,
        QuantKind::PropForall,
        QuantKind::PropExists,
    ])
}

/// Syntax trees of depth at most 6, quantifiers and knowledge included.
fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(5, 64, 2, |inner| {
        prop_oneof![
            (unop(), inner.clone()).prop_map(|(op, f)| Formula::unary(op, f)),
            (binop(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Formula::binary(op, l, r)),
            (kind(), prop::sample::select(vec!["pi", "rho", "a"]), inner.clone()).prop_map(|(k, v, f)| {
                let v = if k.is_trace() && v == "a" { "pi" } else { v };
                let v = if !k.is_trace() && v != "a" { "b" } else { v };
                Formula::quant(k, v, f)
            }),
            (prop::sample::select(vec![vec!["x"], vec!["x", "y"]]), inner)
                .prop_map(|(a, f)| Formula::knowledge(a, "pi", f)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(f in formula()) {
        prop_assume!(f.depth() <= 6);
        let text = print(&f);
        let back = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &f, "{}", text);
    }

    #[test]
    fn nnf_is_idempotent(f in formula()) {
        let g = to_nnf(&f);
        prop_assert!(is_nnf(&g));
        prop_assert_eq!(to_nnf(&g), g);
    }
}

#[test]
fn prenex_keeps_quantifier_order() {
    let doc = parse("inputs: i\noutputs: o\n(exists q:prop. G q) & forall pi:trace. F o[pi]").unwrap();
    let g = prenex(&doc.formula).unwrap();
    let (p, body) = extract_prefix(&g).unwrap();
    assert_eq!(p.kinds(), vec![QuantKind::PropExists, QuantKind::TraceForall]);
    assert!(body.is_quantifier_free());
}

#[test]
fn spec_documents_are_checked() {
    assert!(parse("inputs: i\noutputs: o\nforall pi:trace. G (i[pi] -> F o[pi])").is_ok());
    assert!(parse("inputs: i\noutputs: o\nforall pi:trace. G z[pi]").is_err());
    let doc = parse("forall pi:trace. G a[pi]").unwrap();
    assert!(check_well_formed(&doc).is_empty());
}
