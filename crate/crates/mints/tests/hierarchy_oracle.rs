mod common;

use common::formula;
use common::oracles::{grammar_members, least_level};
use mints::hierarchy::{classify, in_class, Side};
use mints::syntax::parse_formula;
use proptest::prelude::*;

fn levels(text: &str) -> (usize, usize) {
    let c = classify(&parse_formula(text).unwrap());
    (c.pi_level, c.sigma_level)
}

#[test]
fn textbook_examples() {
    assert_eq!(levels("((forall x. P(x)) -> Q) -> Q"), (1, 2));
    assert_eq!(levels("(forall x. ((forall y. R(y)) -> P(x))) -> Q"), (3, 2));
    assert_eq!(levels("(forall x. P(x)) -> ((forall y. R(y)) -> Q) -> Q"), (2, 2));
    assert_eq!(levels("P(x)"), (0, 0));
}

#[test]
fn wide_forall_scope_changes_the_level() {
    // `forall` extends right, so this is forall x.((P(x) -> Q) -> Q).
    assert_eq!(levels("(forall x. P(x) -> Q) -> Q"), (2, 1));
    assert_eq!(levels("forall x. ((forall y. R(y)) -> P(x)) -> Q"), (1, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn classify_matches_grammar(f in formula(6)) {
        let max_n = f.depth() + 1;
        let members = grammar_members(&f, max_n);
        let c = classify(&f);
        prop_assert_eq!(least_level(&members, Side::Sigma), Some(c.sigma_level));
        prop_assert_eq!(least_level(&members, Side::Pi), Some(c.pi_level));
        for n in 0..=max_n {
            for side in [Side::Sigma, Side::Pi] {
                prop_assert_eq!(in_class(&f, n, side), members.contains(&(n, side)), "n={} {:?} {}", n, side, f);
            }
        }
    }

    #[test]
    fn levels_are_cumulative_and_close(f in formula(6)) {
        let c = classify(&f);
        prop_assert!(c.sigma_level.abs_diff(c.pi_level) <= 1);
        for n in 0..=f.depth() + 1 {
            for side in [Side::Sigma, Side::Pi] {
                if in_class(&f, n, side) {
                    prop_assert!(in_class(&f, n + 1, side));
                }
            }
        }
    }
}
