//! The eight-strings proof of the worked example.

use mints::syntax::{parse_formula, Environment, Formula};

pub const ALPHA0: &str = "(forall x. F(zero,x) -> S(zero,x) -> T(zero,x) -> G(x)) -> C";
pub const ALPHA1: &str = "forall x. F(zero,x) -> (forall y. F(one,y) -> (forall z. S(z,x) -> S(z,y)) -> (forall z. T(z,x) -> T(z,y)) -> G(y)) -> G(x)";
pub const ALPHA2: &str = "forall x. F(one,x) -> S(zero,x) -> (forall y. F(zero,y) -> S(one,y) -> (forall z. T(z,x) -> T(z,y)) -> G(y)) -> G(x)";
pub const ALPHA3: &str = "forall x. F(one,x) -> S(one,x) -> T(zero,x) -> (forall y. F(zero,y) -> S(zero,y) -> T(one,y) -> G(y)) -> G(x)";
pub const BETA: &str = "forall x. F(one,x) -> S(one,x) -> T(one,x) -> G(x)";

pub const PRINTED: &str = "\\X0 X1 X2 X3 Y. X0 (\\x1. \\Z11 Z12 Z13. X1 x1 Z11 (\\x2. \\Z21 Z22 Z23. X2 x2 Z21 (Z22 zero Z12) \
(\\x3. \\Z31 Z32 Z33. X1 x3 Z31 (\\x4. \\Z41 Z42 Z43. X3 x4 Z41 (Z42 one Z32) (Z43 zero (Z33 zero (Z23 zero Z13))) \
(\\x5. \\Z51 Z52 Z53. X1 x5 Z51 (\\x6. \\Z61 Z62 Z63. X2 x6 Z61 (Z62 zero Z52) \
(\\x7. \\Z71 Z72 Z73. X1 x7 Z71 (\\x8. \\Z81 Z82 Z83. Y x8 Z81 (Z82 one Z72) (Z83 one (Z73 one (Z63 one Z53)))))))))))";

pub fn parts() -> Vec<Formula> {
    [ALPHA0, ALPHA1, ALPHA2, ALPHA3, BETA].iter().map(|s| parse_formula(s).unwrap()).collect()
}

pub fn whole() -> Formula {
    Formula::imps(parts(), Formula::atom("C", &[]))
}

/// The premises as the environment `X0..X3, Y`.
pub fn env() -> Environment {
    Environment::from_decls(["X0", "X1", "X2", "X3", "Y"].into_iter().zip(parts()).collect()).unwrap()
}
