//! Dense conditional probability tables `P(outcomes | settings)`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Conditional probabilities over a scenario, stored settings-major: entry
/// `s * num_joint_outcomes + o` holds `P(o | s)` with both tuples encoded in
/// mixed radix (party 0 most significant).
///
/// Construction only checks the table length; [`Behavior::validate`] checks
/// positivity and normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<Rational>,
}

/// Evidence that some party's choice of setting changes the statistics of
/// the others.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalingWitness {
    /// The party whose setting leaks.
    pub party: usize,
    /// The two settings of `party` being compared.
    pub setting_pair: (usize, usize),
    /// Full settings tuple used for the first setting of the pair.
    pub settings: Vec<usize>,
    /// Outcomes of the other parties (in party order, `party` omitted).
    pub other_outcomes: Vec<usize>,
    /// Marginal under the first setting minus marginal under the second.
    pub difference: Rational,
}

impl fmt::Display for SignalingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "party {} settings {} vs {} (joint settings {:?}) changes the others' marginal at outcomes {:?} by {}",
            self.party,
            self.setting_pair.0,
            self.setting_pair.1,
            self.settings,
            self.other_outcomes,
            format_rational(&self.difference)
        )
    }
}

impl Behavior {
    pub fn from_table(scenario: Scenario, table: Vec<Rational>) -> Result<Self> {
        if table.len() != scenario.table_len() {
            return Err(Error::InvalidBehavior(format!(
                "table has {} entries, scenario needs {}",
                table.len(),
                scenario.table_len()
            )));
        }
        Ok(Self { scenario, table })
    }

    /// Table filled from `f(settings, outcomes)`.
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(&[usize], &[usize]) -> Rational) -> Self {
        let mut table = Vec::with_capacity(scenario.table_len());
        for s in scenario.settings_index().iter() {
            for o in scenario.outcomes_index().iter() {
                table.push(f(&s, &o));
            }
        }
        Self { scenario, table }
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let p = Rational::new(1.into(), scenario.num_joint_outcomes().into());
        Self::from_fn(scenario, |_, _| p.clone())
    }

    /// Each party answers setting `x` with `strategy[party][x]`.
    pub fn deterministic(scenario: Scenario, strategy: &[Vec<usize>]) -> Result<Self> {
        if strategy.len() != scenario.num_parties() {
            return Err(Error::InvalidBehavior(format!(
                "strategy covers {} parties, scenario has {}",
                strategy.len(),
                scenario.num_parties()
            )));
        }
        for (i, (s, p)) in strategy.iter().zip(scenario.parties()).enumerate() {
            if s.len() != p.settings || s.iter().any(|&o| o >= p.outcomes) {
                return Err(Error::InvalidBehavior(format!(
                    "strategy for party {i} does not match settings {} / outcomes {}",
                    p.settings, p.outcomes
                )));
            }
        }
        Ok(Self::from_fn(scenario, |s, o| {
            let hit = s.iter().zip(o).zip(strategy).all(|((&x, &a), st)| st[x] == a);
            if hit {
                Rational::one()
            } else {
                Rational::zero()
            }
        }))
    }

    /// `lambda p + (1 - lambda) q`.
    pub fn mix(lambda: &Rational, p: &Behavior, q: &Behavior) -> Result<Self> {
        if p.scenario != q.scenario {
            return Err(Error::ScenarioMismatch("cannot mix behaviors on different scenarios".into()));
        }
        let mu = Rational::one() - lambda;
        let table = p
            .table
            .iter()
            .zip(&q.table)
            .map(|(a, b)| lambda * a + &mu * b)
            .collect();
        Ok(Self {
            scenario: p.scenario.clone(),
            table,
        })
    }

    /// `sum_i w_i p_i`; the weights are not required to sum to one.
    pub fn weighted_sum(parts: &[(Rational, Behavior)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidBehavior("empty mixture".into()))?;
        let mut table = vec![Rational::zero(); first.table.len()];
        for (w, p) in parts {
            if p.scenario != first.scenario {
                return Err(Error::ScenarioMismatch("mixture components differ in scenario".into()));
            }
            for (t, v) in table.iter_mut().zip(&p.table) {
                if !v.is_zero() {
                    *t += w * v;
                }
            }
        }
        Ok(Self {
            scenario: first.scenario.clone(),
            table,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn into_table(self) -> Vec<Rational> {
        self.table
    }

    pub fn prob(&self, settings: &[usize], outcomes: &[usize]) -> &Rational {
        &self.table[self.scenario.table_index(settings, outcomes)]
    }

    /// The slice `P(. | settings)`.
    pub fn slice(&self, settings: &[usize]) -> &[Rational] {
        let w = self.scenario.num_joint_outcomes();
        let s = self.scenario.settings_index().encode(settings);
        &self.table[s * w..(s + 1) * w]
    }

    /// Full correlator `sum_o (-1)^(sum o) P(o|s)`. Meaningful for binary
    /// outcomes; for larger alphabets it is the parity of the outcome sum.
    pub fn correlator(&self, settings: &[usize]) -> Rational {
        let mut acc = Rational::zero();
        for (o, p) in self.scenario.outcomes_index().iter().zip(self.slice(settings)) {
            if o.iter().sum::<usize>() % 2 == 0 {
                acc += p;
            } else {
                acc -= p;
            }
        }
        acc
    }

    /// Checks that entries are non-negative and every settings slice sums to
    /// exactly one.
    pub fn validate(&self) -> Result<()> {
        let w = self.scenario.num_joint_outcomes();
        for (i, v) in self.table.iter().enumerate() {
            if v.is_negative() {
                let s = self.scenario.settings_index().decode(i / w);
                let o = self.scenario.outcomes_index().decode(i % w);
                return Err(Error::InvalidBehavior(format!(
                    "entry {i} (settings {s:?}, outcomes {o:?}) is negative: {}",
                    format_rational(v)
                )));
            }
        }
        for (si, chunk) in self.table.chunks(w).enumerate() {
            let total: Rational = chunk.iter().sum();
            if !total.is_one() {
                let s = self.scenario.settings_index().decode(si);
                return Err(Error::InvalidBehavior(format!(
                    "probabilities at settings {s:?} (slice {si}) sum to {}",
                    format_rational(&total)
                )));
            }
        }
        Ok(())
    }

    /// Distribution of the parties in `keep` (in that order) with every other
    /// party's setting pinned by `settings` (entries of kept parties are
    /// ignored) and its outcome summed out.
    pub fn marginal_table(&self, keep: &[usize], settings: &[usize]) -> Result<Behavior> {
        let sub = self.scenario.restrict(keep)?;
        let mut full_s = settings.to_vec();
        let mut table = Vec::with_capacity(sub.table_len());
        for ks in sub.settings_index().iter() {
            for (&party, &x) in keep.iter().zip(&ks) {
                full_s[party] = x;
            }
            let mut acc = vec![Rational::zero(); sub.num_joint_outcomes()];
            for (o, p) in self.scenario.outcomes_index().iter().zip(self.slice(&full_s)) {
                if p.is_zero() {
                    continue;
                }
                let ko: Vec<usize> = keep.iter().map(|&party| o[party]).collect();
                acc[sub.outcomes_index().encode(&ko)] += p;
            }
            table.extend(acc);
        }
        Ok(Behavior { scenario: sub, table })
    }

    /// First violation of the no-signaling conditions, if any: for each
    /// party, each choice of the others' settings and each setting of that
    /// party, the marginal over everyone else must equal the one at the
    /// party's setting 0.
    pub fn signaling_witness(&self) -> Option<SignalingWitness> {
        let n = self.scenario.num_parties();
        for party in 0..n {
            let shape = self.scenario.party(party);
            if shape.settings < 2 {
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&j| j != party).collect();
            let other_outcomes = crate::scenario::MixedRadix::new(
                others.iter().map(|&j| self.scenario.party(j).outcomes).collect(),
            )
            .expect("sub-radix of a valid scenario");

            for s in self.scenario.settings_index().iter() {
                if s[party] != 0 {
                    continue;
                }
                let reference = self.others_marginal(&s, &others, &other_outcomes);
                for x in 1..shape.settings {
                    let mut t = s.clone();
                    t[party] = x;
                    let m = self.others_marginal(&t, &others, &other_outcomes);
                    if let Some(k) = (0..m.len()).find(|&k| m[k] != reference[k]) {
                        return Some(SignalingWitness {
                            party,
                            setting_pair: (0, x),
                            settings: s,
                            other_outcomes: other_outcomes.decode(k),
                            difference: &reference[k] - &m[k],
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_nonsignaling(&self) -> bool {
        self.signaling_witness().is_none()
    }

    /// Fails with [`Error::Signaling`] when the behavior signals.
    pub fn require_nonsignaling(&self) -> Result<()> {
        match self.signaling_witness() {
            None => Ok(()),
            Some(w) => Err(Error::Signaling(Box::new(w))),
        }
    }

    fn others_marginal(
        &self,
        settings: &[usize],
        others: &[usize],
        radix: &crate::scenario::MixedRadix,
    ) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); radix.len()];
        for (o, p) in self.scenario.outcomes_index().iter().zip(self.slice(settings)) {
            if p.is_zero() {
                continue;
            }
            let idx = others.iter().fold(0, |a, &j| a * self.scenario.party(j).outcomes + o[j]);
            acc[idx] += p;
        }
        acc
    }
}
