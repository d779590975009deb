//! Generators, independent oracles and property checks shared by the
//! integration tests and the acceptance target.
#![allow(dead_code)]

pub mod oracles;
pub mod props;
pub mod tm;
pub mod worked;

use proptest::prelude::*;

use mints::prover::Sigma1Judgment;
use mints::syntax::{parse_formula, Environment, Formula};

/// Random formula over `P/1`, `R/2`, `q/0` and the variables `x, y, z`.
pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(vec!["x", "y", "z"]);
    let leaf = prop_oneof![
        var.clone().prop_map(|v| Formula::atom("P", &[v])),
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::atom("R", &[a, b])),
        Just(Formula::atom("q", &[])),
    ];
    leaf.prop_recursive(depth, 64, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (var.clone(), inner).prop_map(|(v, b)| Formula::forall(v, b)),
        ]
    })
}

fn atom_text(vars: &'static [&'static str]) -> impl Strategy<Value = String> {
    let v = prop::sample::select(vars);
    prop_oneof![
        3 => v.clone().prop_map(|a| format!("P({a})")),
        3 => v.clone().prop_map(|a| format!("Q({a})")),
        2 => (v.clone(), v).prop_map(|(a, b)| format!("R({a},{b})")),
        1 => Just("a".to_string()),
        1 => Just("b".to_string()),
    ]
}

const FREE: &[&str] = &["x", "y"];
const IN_DECL: &[&str] = &["u", "v", "x", "y"];

/// A premise of a Pi_1 declaration: an atom or a Sigma_1 implication.
fn premise_text() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => atom_text(IN_DECL),
        1 => (atom_text(IN_DECL), atom_text(IN_DECL)).prop_map(|(a, b)| format!("({a} -> {b})")),
        1 => (atom_text(&["w", "u"]), atom_text(IN_DECL)).prop_map(|(a, b)| format!("((forall w. {a}) -> {b})")),
    ]
}

fn decl_text() -> impl Strategy<Value = String> {
    let binders = prop::sample::select(vec!["", "forall u. ", "forall u v. ", "forall v. "]);
    (binders, prop::collection::vec(premise_text(), 0..3), atom_text(IN_DECL)).prop_map(|(b, ps, h)| {
        let mut s = String::from(b);
        for p in ps {
            s.push_str(&p);
            s.push_str(" -> ");
        }
        s.push_str(&h);
        s
    })
}

fn goal_text() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => atom_text(FREE),
        1 => (atom_text(FREE), atom_text(FREE)).prop_map(|(a, b)| format!("{a} -> {b}")),
        1 => (atom_text(&["w", "x"]), atom_text(FREE)).prop_map(|(a, b)| format!("(forall w. {a}) -> {b}")),
    ]
}

/// Random Sigma_1 judgment with a few Pi_1 rules and ground facts.
pub fn sigma1_judgment() -> impl Strategy<Value = Sigma1Judgment> {
    (prop::collection::vec(decl_text(), 1..4), prop::collection::vec(atom_text(FREE), 0..4), goal_text()).prop_filter_map(
        "declarations must agree on arities",
        |(decls, facts, goal)| {
            let mut text = String::new();
            for (i, d) in decls.iter().enumerate() {
                text.push_str(&format!("D{i} : {d}\n"));
            }
            for (i, f) in facts.iter().enumerate() {
                text.push_str(&format!("F{i} : {f}\n"));
            }
            let env = Environment::parse(&text).ok()?;
            Sigma1Judgment::new(env, parse_formula(&goal).ok()?).ok()
        },
    )
}
