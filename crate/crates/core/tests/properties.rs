//! Property tests: the printer and parser are exact inverses on random
//! syntax trees, and size bookkeeping stays consistent under construction.

use epdl_core::syntax::{parse_formula, parse_program, Formula, Program};
use proptest::prelude::*;

fn prop_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,4}"
}

fn formula_strategy() -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        Just(Formula::top()),
        Just(Formula::bot()),
        prop_name().prop_map(Formula::prop),
    ];
    leaf.prop_recursive(4, 48, 3, |inner| {
        let program = program_strategy(inner.clone());
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            inner.clone().prop_map(Formula::know),
            inner.clone().prop_map(Formula::khat),
            (program.clone(), inner.clone()).prop_map(|(p, f)| Formula::boxp(p, f)),
            (program.clone(), inner.clone()).prop_map(|(p, f)| Formula::diamond(p, f)),
            (program, inner).prop_map(|(p, f)| Formula::box_diamond(p, f)),
        ]
    })
    .boxed()
}

fn program_strategy(formula: BoxedStrategy<Formula>) -> BoxedStrategy<Program> {
    let leaf = prop_oneof![
        prop_name().prop_map(Program::atom),
        formula.prop_map(Program::test),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Program::seq(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Program::choice(a, b)),
            inner.prop_map(Program::star),
        ]
    })
    .boxed()
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(f in formula_strategy()) {
        let text = f.to_string();
        let reparsed = parse_formula(&text)
            .unwrap_or_else(|e| panic!("`{text}` failed to parse: {e}"));
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn program_printing_then_parsing_is_identity(
        p in program_strategy(formula_strategy())
    ) {
        let text = p.to_string();
        let reparsed = parse_program(&text)
            .unwrap_or_else(|e| panic!("`{text}` failed to parse: {e}"));
        prop_assert_eq!(reparsed, p);
    }

    #[test]
    fn sizes_are_positive_and_cover_subterms(f in formula_strategy()) {
        prop_assert!(f.size() >= 1);
        for sub in f.subformulas() {
            prop_assert!(sub.size() <= f.size());
        }
    }
}
