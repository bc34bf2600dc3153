//! Built-in scenarios, inequalities and behaviors.

use crate::behavior::Behavior;
use crate::functional::{BellFunctional, Form, TermKey};
use crate::rational::{int, inv_sqrt2, ratio, Rational};
use crate::scenario::Scenario;

pub fn chsh_scenario() -> Scenario {
    Scenario::uniform(2, 2, 2).expect("valid")
}

pub fn chained3_scenario() -> Scenario {
    Scenario::uniform(2, 3, 2).expect("valid")
}

pub fn mermin_scenario() -> Scenario {
    Scenario::uniform(3, 2, 2).expect("valid")
}

/// Sum of `P(a = b | x, y)` over `agree` pairs and `P(a != b | x, y)` over
/// `disagree` pairs.
fn agreement_functional(scenario: Scenario, agree: &[[usize; 2]], disagree: &[[usize; 2]], bound: i64) -> BellFunctional {
    let mut terms = Vec::new();
    for (pairs, same) in [(agree, true), (disagree, false)] {
        for &[x, y] in pairs {
            for a in 0..2 {
                let b = if same { a } else { 1 - a };
                terms.push((TermKey::new(vec![x, y], vec![a, b]), int(1)));
            }
        }
    }
    BellFunctional::new(scenario, Form::Probability, int(bound), terms).expect("valid")
}

fn correlator_functional(scenario: Scenario, terms: &[(&[usize], i64)], bound: i64) -> BellFunctional {
    let terms = terms
        .iter()
        .map(|&(s, c)| (TermKey::correlator(s.to_vec()), int(c)));
    BellFunctional::new(scenario, Form::Correlator, int(bound), terms).expect("valid")
}

/// `P(a=b|0,0) + P(a=b|0,1) + P(a=b|1,0) + P(a!=b|1,1) <= 3`.
pub fn chsh_prob() -> BellFunctional {
    agreement_functional(chsh_scenario(), &[[0, 0], [0, 1], [1, 0]], &[[1, 1]], 3)
}

/// `E00 + E01 + E10 - E11 <= 2`.
pub fn chsh_corr() -> BellFunctional {
    correlator_functional(
        chsh_scenario(),
        &[(&[0, 0], 1), (&[0, 1], 1), (&[1, 0], 1), (&[1, 1], -1)],
        2,
    )
}

/// Chained inequality with three settings per side, counting settings from
/// one: `E11 + E21 + E22 + E32 + E33 - E13 <= 4`.
pub fn chained3_corr() -> BellFunctional {
    correlator_functional(
        chained3_scenario(),
        &[
            (&[0, 0], 1),
            (&[1, 0], 1),
            (&[1, 1], 1),
            (&[2, 1], 1),
            (&[2, 2], 1),
            (&[0, 2], -1),
        ],
        4,
    )
}

/// Probability form of [`chained3_corr`]: `(E + 6) / 2 <= 5`.
pub fn chained3_prob() -> BellFunctional {
    agreement_functional(
        chained3_scenario(),
        &[[0, 0], [1, 0], [1, 1], [2, 1], [2, 2]],
        &[[0, 2]],
        5,
    )
}

/// Mermin: `E001 + E010 + E100 - E111 <= 2`.
pub fn mermin() -> BellFunctional {
    correlator_functional(
        mermin_scenario(),
        &[(&[0, 0, 1], 1), (&[0, 1, 0], 1), (&[1, 0, 0], 1), (&[1, 1, 1], -1)],
        2,
    )
}

/// `P(a,b|x,y) = 1/2` iff `a xor b = x y`.
pub fn pr_box() -> Behavior {
    Behavior::from_fn(chsh_scenario(), |s, o| {
        if (o[0] ^ o[1]) == (s[0] & s[1]) {
            ratio(1, 2)
        } else {
            int(0)
        }
    })
}

pub fn uniform_chsh() -> Behavior {
    Behavior::uniform(chsh_scenario())
}

pub fn deterministic(scenario: Scenario, strategy: &[Vec<usize>]) -> crate::Result<Behavior> {
    Behavior::deterministic(scenario, strategy)
}

/// Both parties always output 0.
pub fn deterministic_zero() -> Behavior {
    Behavior::deterministic(chsh_scenario(), &[vec![0, 0], vec![0, 0]]).expect("valid")
}

/// `P(a,b|x,y) = (1 + (-1)^(a xor b xor xy) r) / 4` with `r` the rational
/// stand-in for `1/sqrt(2)` from [`inv_sqrt2`].
pub fn tsirelson() -> Behavior {
    let r = inv_sqrt2();
    let plus: Rational = (int(1) + r) / int(4);
    let minus: Rational = (int(1) - r) / int(4);
    Behavior::from_fn(chsh_scenario(), |s, o| {
        if (o[0] ^ o[1] ^ (s[0] & s[1])) == 0 {
            plus.clone()
        } else {
            minus.clone()
        }
    })
}

/// A named built-in object.
#[derive(Clone, Debug)]
pub enum Fixture {
    Scenario(Scenario),
    Functional(BellFunctional),
    Behavior(Behavior),
}

pub const NAMES: &[&str] = &[
    "chsh-scenario",
    "chained3-scenario",
    "mermin-scenario",
    "chsh-prob",
    "chsh-corr",
    "chained3-corr",
    "chained3-prob",
    "mermin",
    "pr-box",
    "uniform",
    "deterministic-zero",
    "tsirelson",
];

pub fn by_name(name: &str) -> Option<Fixture> {
    Some(match name {
        "chsh-scenario" => Fixture::Scenario(chsh_scenario()),
        "chained3-scenario" => Fixture::Scenario(chained3_scenario()),
        "mermin-scenario" => Fixture::Scenario(mermin_scenario()),
        "chsh-prob" => Fixture::Functional(chsh_prob()),
        "chsh-corr" => Fixture::Functional(chsh_corr()),
        "chained3-corr" => Fixture::Functional(chained3_corr()),
        "chained3-prob" => Fixture::Functional(chained3_prob()),
        "mermin" => Fixture::Functional(mermin()),
        "pr-box" => Fixture::Behavior(pr_box()),
        "uniform" => Fixture::Behavior(uniform_chsh()),
        "deterministic-zero" => Fixture::Behavior(deterministic_zero()),
        "tsirelson" => Fixture::Behavior(tsirelson()),
        _ => return None,
    })
}
