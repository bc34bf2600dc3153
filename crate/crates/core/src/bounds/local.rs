//! Local-realistic bounds by enumerating deterministic strategies.

use num_traits::Zero;

use crate::behavior::Behavior;
use crate::functional::BellFunctional;
use crate::rational::Rational;
use crate::scenario::{MixedRadix, Scenario};
use crate::{Error, Result};

pub const DEFAULT_STRATEGY_CAP: u64 = 10_000_000;

/// For each party, the outcome it returns for each of its settings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub outcomes: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn behavior(&self, scenario: &Scenario) -> Result<Behavior> {
        Behavior::deterministic(scenario.clone(), &self.outcomes)
    }
}

#[derive(Clone, Debug)]
pub struct LocalBound {
    pub value: Rational,
    pub witness: DeterministicStrategy,
}

/// `prod_i outcomes_i ^ settings_i`, or `None` on overflow.
pub fn strategy_count(scenario: &Scenario) -> Option<u64> {
    scenario.parties().iter().try_fold(1u64, |acc, p| {
        (p.outcomes as u64)
            .checked_pow(p.settings as u32)
            .and_then(|k| acc.checked_mul(k))
    })
}

pub fn local_bound(f: &BellFunctional) -> Result<LocalBound> {
    local_bound_with_cap(f, DEFAULT_STRATEGY_CAP)
}

/// Exact maximum of `f` over deterministic strategies, enumerated with a
/// mixed-radix counter (party 0, setting 0 most significant). The witness is
/// the first maximizer in that order.
pub fn local_bound_with_cap(f: &BellFunctional, cap: u64) -> Result<LocalBound> {
    let f = f.to_probability_form()?;
    let scenario = f.scenario();
    let count = strategy_count(scenario);
    match count {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "{} deterministic strategies exceed the enumeration cap {cap}",
                count.map_or("more than 2^64".to_string(), |c| c.to_string())
            )))
        }
    }

    // Flat slot layout: party i, setting x -> slot offset[i] + x.
    let mut offset = Vec::with_capacity(scenario.num_parties());
    let mut radices = Vec::new();
    for p in scenario.parties() {
        offset.push(radices.len());
        radices.extend(std::iter::repeat_n(p.outcomes, p.settings));
    }
    let counter = MixedRadix::new(radices)?;

    let terms: Vec<(Vec<usize>, &[usize], &Rational)> = f
        .terms()
        .iter()
        .map(|(k, c)| {
            let slots = k.settings.iter().enumerate().map(|(i, &x)| offset[i] + x).collect();
            (slots, k.outcomes.as_slice(), c)
        })
        .collect();

    let mut digits = vec![0usize; counter.radices().len()];
    let mut best: Option<(Rational, Vec<usize>)> = None;
    loop {
        let mut value = Rational::zero();
        for (slots, outcomes, c) in &terms {
            if slots.iter().zip(*outcomes).all(|(&s, &o)| digits[s] == o) {
                value += *c;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, digits.clone()));
        }
        if !increment(&mut digits, counter.radices()) {
            break;
        }
    }

    let (value, digits) = best.expect("at least one strategy");
    let outcomes = scenario
        .parties()
        .iter()
        .zip(&offset)
        .map(|(p, &o)| digits[o..o + p.settings].to_vec())
        .collect();
    Ok(LocalBound {
        value,
        witness: DeterministicStrategy { outcomes },
    })
}

/// Advance a most-significant-first counter; false once it wraps.
fn increment(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

