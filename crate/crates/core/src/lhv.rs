//! Local hidden-variable models for one freely choosing party against
//! parties with fixed settings.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::behavior::Behavior;
use crate::rational::{format_rational, Rational};
use crate::scenario::{PartySpec, Scenario};
use crate::{Error, Result};

/// A source emits the outcome list `b` of the fixed-setting parties with
/// probability `hidden[b]`; the free party, given `b` and its setting `x`,
/// answers with the distribution `responses[(b, x)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LhvModel {
    /// Scenario of the reproduced slice: the free party first, then every
    /// fixed-setting party with a single setting.
    pub scenario: Scenario,
    pub hidden: BTreeMap<Vec<usize>, Rational>,
    pub responses: BTreeMap<(Vec<usize>, usize), Vec<Rational>>,
}

impl LhvModel {
    /// Scenario with `free` first and one single-setting party per entry of
    /// `fixed_outcomes`.
    pub fn slice_scenario(free: PartySpec, fixed_outcomes: &[usize]) -> Result<Scenario> {
        let mut parties = vec![free];
        parties.extend(fixed_outcomes.iter().map(|&d| PartySpec::new(1, d)));
        Scenario::new(parties)
    }

    pub fn free_party(&self) -> PartySpec {
        self.scenario.party(0)
    }

    pub fn validate(&self) -> Result<()> {
        let free = self.free_party();
        let total: Rational = self.hidden.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidBehavior(format!(
                "hidden weights sum to {}",
                format_rational(&total)
            )));
        }
        for (b, w) in &self.hidden {
            if w.is_negative() {
                return Err(Error::InvalidBehavior(format!("hidden weight of {b:?} is negative")));
            }
            if w.is_zero() {
                continue;
            }
            for x in 0..free.settings {
                let dist = self.responses.get(&(b.clone(), x)).ok_or_else(|| {
                    Error::InvalidBehavior(format!("no response for hidden {b:?}, setting {x}"))
                })?;
                if dist.len() != free.outcomes
                    || dist.iter().any(|v| v.is_negative())
                    || !dist.iter().sum::<Rational>().is_one()
                {
                    return Err(Error::InvalidBehavior(format!(
                        "response for hidden {b:?}, setting {x} is not a distribution"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `P(a, b | x) = hidden[b] * responses[(b, x)][a]`.
    pub fn probability(&self, x: usize, a: usize, b: &[usize]) -> Rational {
        match self.hidden.get(b) {
            Some(w) if !w.is_zero() => w * &self.responses[&(b.to_vec(), x)][a],
            _ => Rational::zero(),
        }
    }

    /// The behavior the model generates on [`LhvModel::scenario`].
    pub fn to_behavior(&self) -> Behavior {
        Behavior::from_fn(self.scenario.clone(), |s, o| self.probability(s[0], o[0], &o[1..]))
    }
}
