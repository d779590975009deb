use mints::encodings::{encode_bus_sigma1, switch_set_predicates};
use mints::kernel::typecheck;
use mints::models::{accepting_run, bus_accepts, bus_step, explore, Acceptance, BusConfiguration, BusMachine, BusMove, InstrRef, LocalInstruction};
use mints::prover::{prove_sigma1, Sigma1Judgment};
use mints::syntax::{parse_formula, Formula};

fn machine() -> BusMachine {
    BusMachine::from_json(include_str!("fixtures/ex51.json")).unwrap()
}

fn word(m: &BusMachine, s: &str) -> Vec<usize> {
    s.chars().map(|c| m.alphabet.iter().position(|a| a.starts_with(c)).unwrap()).collect()
}

#[test]
fn first_step_creates_local_instruction() {
    let m = machine();
    let moves = bus_step(&m.initial(), &m.instructions[0]);
    let i0 = LocalInstruction { from: word(&m, "cccc"), to: word(&m, "cccd") };
    let expected = BusConfiguration { word: word(&m, "aaab"), locals: [i0].into() };
    assert_eq!(moves, vec![BusMove::One(expected)]);
    for ins in &m.instructions[1..] {
        assert!(bus_step(&m.initial(), ins).is_empty());
    }
}

#[test]
fn run_has_31_steps_and_15_locals() {
    let m = machine();
    assert_eq!(bus_accepts(&m, 10_000), Acceptance::Accepts);
    let run = accepting_run(&m, 10_000).unwrap();
    assert_eq!(run.steps(), 2 * 16 - 1);
    let mut at_star = Vec::new();
    run.walk(&mut |node| {
        if let Some((InstrRef::Global(4), _)) = &node.step {
            at_star.push(node.config.locals.len());
        }
    });
    assert_eq!(at_star, vec![15]);
    // Deterministic: no reachable configuration has two ways forward.
    let g = explore(&m, 10_000);
    assert!(g.complete);
    assert!(g.edges.iter().all(|e| e.len() <= 1));
    assert_eq!(g.configs.len(), 32);
}

#[test]
fn encoding_atoms_and_star_formula() {
    let m = machine();
    let p = encode_bus_sigma1(&m);
    let preds = switch_set_predicates(&m);
    let i = &preds[0][0];
    let atoms: Vec<&Formula> = p.env.formulas().filter(|f| f.as_atom().is_some_and(|a| &a.pred == i)).collect();
    assert_eq!(atoms, vec![&Formula::atom(i, &["a", "a", "c", "c"]), &Formula::atom(i, &["b", "b", "d", "d"])]);
    let star = &preds[4][0];
    let want = format!(
        "forall x1 x2 x3 x4 y1 y2 y3 y4. {s}(x1,y1) -> {s}(x2,y2) -> {s}(x3,y3) -> {s}(x4,y4) -> Bus(y1,y2,y3,y4) -> Bus(x1,x2,x3,x4)",
        s = star
    );
    assert_eq!(p.env.get("Psi5").unwrap(), &parse_formula(&want).unwrap());
    assert_eq!(p.goal, parse_formula("Bus(a,a,a,a)").unwrap());
}

#[test]
fn encoding_is_provable_and_proof_checks() {
    let m = machine();
    let p = encode_bus_sigma1(&m);
    let j = Sigma1Judgment::new(p.env.clone(), p.goal.clone()).unwrap();
    let r = prove_sigma1(&j);
    let proof = r.proof().expect("Bus(aaaa) is provable");
    typecheck(&p.env, proof, Some(&p.goal)).unwrap();
}
