//! Linear Bell functionals `sum coeff * P(outcomes | settings) <= bound`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::rational::{format_rational, Rational};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// How the coefficients of a functional are to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Coefficients multiply joint probabilities `P(o|s)`.
    Probability,
    /// Coefficients multiply full correlators
    /// `E(s) = sum_o (-1)^(o_1 + ... + o_N) P(o|s)`; binary outcomes only,
    /// keys carry no outcomes.
    Correlator,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub settings: Vec<usize>,
    pub outcomes: Vec<usize>,
}

impl TermKey {
    pub fn new(settings: Vec<usize>, outcomes: Vec<usize>) -> Self {
        Self { settings, outcomes }
    }

    pub fn correlator(settings: Vec<usize>) -> Self {
        Self {
            settings,
            outcomes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    form: Form,
    terms: BTreeMap<TermKey, Rational>,
    bound: Rational,
}

impl BellFunctional {
    /// Builds a functional, summing repeated keys and dropping zero
    /// coefficients.
    pub fn new(
        scenario: Scenario,
        form: Form,
        bound: Rational,
        terms: impl IntoIterator<Item = (TermKey, Rational)>,
    ) -> Result<Self> {
        if form == Form::Correlator && !scenario.is_binary() {
            return Err(Error::InvalidFunctional(
                "correlator form requires every party to have two outcomes".into(),
            ));
        }
        let mut map: BTreeMap<TermKey, Rational> = BTreeMap::new();
        for (key, coeff) in terms {
            check_key(&scenario, form, &key)?;
            *map.entry(key).or_insert_with(Rational::zero) += coeff;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self {
            scenario,
            form,
            terms: map,
            bound,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn with_bound(mut self, bound: Rational) -> Self {
        self.bound = bound;
        self
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, Rational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether every coefficient is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// First negative term, if any.
    pub fn first_negative(&self) -> Option<(&TermKey, &Rational)> {
        self.terms.iter().find(|(_, c)| c.is_negative())
    }

    /// Fails with [`Error::NotNonNegative`] naming the first negative term.
    pub fn require_nonnegative(&self) -> Result<()> {
        if self.form == Form::Correlator && !self.terms.is_empty() {
            return Err(Error::Precondition(
                "correlator-form functional; expand_correlators and normalize_nonneg first".into(),
            ));
        }
        match self.first_negative() {
            None => Ok(()),
            Some((k, c)) => Err(Error::NotNonNegative {
                settings: k.settings.clone(),
                outcomes: k.outcomes.clone(),
                coeff: format_rational(c),
            }),
        }
    }

    /// Value of the functional's left-hand side on `p`.
    pub fn evaluate(&self, p: &Behavior) -> Result<Rational> {
        if self.scenario != *p.scenario() {
            return Err(Error::ScenarioMismatch(
                "functional and behavior are defined on different scenarios".into(),
            ));
        }
        let mut acc = Rational::zero();
        match self.form {
            Form::Probability => {
                for (k, c) in &self.terms {
                    acc += c * p.prob(&k.settings, &k.outcomes);
                }
            }
            Form::Correlator => {
                for (k, c) in &self.terms {
                    acc += c * p.correlator(&k.settings);
                }
            }
        }
        Ok(acc)
    }

    /// Rewrites correlator coefficients as signed probability coefficients.
    /// Probability-form input is returned unchanged.
    pub fn expand_correlators(&self) -> Result<Self> {
        if self.form == Form::Probability {
            return Ok(self.clone());
        }
        if !self.scenario.is_binary() {
            return Err(Error::InvalidFunctional(
                "correlator expansion requires binary outcomes".into(),
            ));
        }
        let outcomes = self.scenario.outcomes_index();
        let mut terms = Vec::with_capacity(self.terms.len() * outcomes.len());
        for (k, c) in &self.terms {
            for o in outcomes.iter() {
                let parity = o.iter().sum::<usize>() % 2;
                let coeff = if parity == 0 { c.clone() } else { -c };
                terms.push((TermKey::new(k.settings.clone(), o), coeff));
            }
        }
        Self::new(self.scenario.clone(), Form::Probability, self.bound.clone(), terms)
    }

    /// The probability-form view: expands correlators if necessary.
    pub fn to_probability_form(&self) -> Result<Self> {
        self.expand_correlators()
    }

    /// Replaces each negative term `-c P(o|s)` by `+c` on every other outcome
    /// tuple at the same settings (using `P(o|s) = 1 - sum_{o' != o} P(o'|s)`),
    /// summing with existing coefficients.
    ///
    /// Returns the non-negative functional `g` and the offset `C` (the sum of
    /// the removed `|c|`): for every behavior `g(p) = f(p) + C`, and the bound
    /// of `g` is `R + C`.
    pub fn normalize_nonneg(&self) -> Result<(Self, Rational)> {
        if self.form != Form::Probability {
            return Err(Error::Precondition(
                "normalize_nonneg needs probability form; call expand_correlators first".into(),
            ));
        }
        let outcomes = self.scenario.outcomes_index();
        let mut offset = Rational::zero();
        let mut terms: Vec<(TermKey, Rational)> = Vec::new();
        for (k, c) in &self.terms {
            if !c.is_negative() {
                terms.push((k.clone(), c.clone()));
                continue;
            }
            let magnitude = -c;
            for o in outcomes.iter().filter(|o| *o != k.outcomes) {
                terms.push((TermKey::new(k.settings.clone(), o), magnitude.clone()));
            }
            offset += magnitude;
        }
        let g = Self::new(
            self.scenario.clone(),
            Form::Probability,
            &self.bound + &offset,
            terms,
        )?;
        Ok((g, offset))
    }

    /// Coefficients as a dense vector aligned with the behavior table
    /// (probability form only).
    pub fn dense_coefficients(&self) -> Result<Vec<Rational>> {
        let f = self.to_probability_form()?;
        let mut dense = vec![Rational::zero(); self.scenario.table_len()];
        for (k, c) in &f.terms {
            dense[self.scenario.table_index(&k.settings, &k.outcomes)] += c;
        }
        Ok(dense)
    }
}

fn check_key(scenario: &Scenario, form: Form, key: &TermKey) -> Result<()> {
    if !scenario.settings_index().contains(&key.settings) {
        return Err(Error::InvalidFunctional(format!(
            "settings tuple {:?} is not valid for the scenario",
            key.settings
        )));
    }
    match form {
        Form::Probability => {
            if !scenario.outcomes_index().contains(&key.outcomes) {
                return Err(Error::InvalidFunctional(format!(
                    "outcomes tuple {:?} is not valid for the scenario",
                    key.outcomes
                )));
            }
        }
        Form::Correlator => {
            if !key.outcomes.is_empty() {
                return Err(Error::InvalidFunctional(format!(
                    "correlator term at settings {:?} must not carry outcomes",
                    key.settings
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    #[test]
    fn correlator_term_expands_to_parity_pattern() {
        let s = Scenario::uniform(2, 2, 2).unwrap();
        let f = BellFunctional::new(
            s,
            Form::Correlator,
            int(1),
            [(TermKey::correlator(vec![0, 0]), int(1))],
        )
        .unwrap();
        let g = f.expand_correlators().unwrap();
        assert_eq!(g.form(), Form::Probability);
        let want = [([0, 0], 1), ([0, 1], -1), ([1, 0], -1), ([1, 1], 1)];
        assert_eq!(g.num_terms(), 4);
        for (o, c) in want {
            assert_eq!(g.terms()[&TermKey::new(vec![0, 0], o.to_vec())], int(c));
        }
    }

    #[test]
    fn chsh_correlator_expansion() {
        let g = fixtures::chsh_corr().expand_correlators().unwrap();
        assert_eq!(g.num_terms(), 16);
        assert_eq!(g.evaluate(&fixtures::pr_box()).unwrap(), int(4));
    }

    #[test]
    fn empty_expansion() {
        let s = Scenario::uniform(2, 2, 2).unwrap();
        let f = BellFunctional::new(s, Form::Correlator, int(0), []).unwrap();
        assert!(f.expand_correlators().unwrap().is_empty());
    }

    #[test]
    fn correlator_requires_binary() {
        let s = Scenario::uniform(2, 2, 3).unwrap();
        assert!(BellFunctional::new(s, Form::Correlator, int(0), []).is_err());
    }

    #[test]
    fn rejects_out_of_range_keys() {
        let s = Scenario::uniform(2, 2, 2).unwrap();
        let bad = [(TermKey::new(vec![0, 2], vec![0, 0]), int(1))];
        assert!(BellFunctional::new(s.clone(), Form::Probability, int(0), bad).is_err());
        let bad = [(TermKey::new(vec![0, 0], vec![0]), int(1))];
        assert!(BellFunctional::new(s.clone(), Form::Probability, int(0), bad).is_err());
        let bad = [(TermKey::new(vec![0, 0], vec![0, 0]), int(1))];
        assert!(BellFunctional::new(s, Form::Correlator, int(0), bad).is_err());
    }

    #[test]
    fn normalized_chsh_pattern() {
        let signed = fixtures::chsh_corr().expand_correlators().unwrap();
        let (g, c) = signed.normalize_nonneg().unwrap();
        assert_eq!(c, int(8));
        assert_eq!(*g.bound(), int(10));
        assert!(g.is_nonnegative());
        for x in 0..2 {
            for y in 0..2 {
                let anti = x * y == 1;
                for a in 0..2 {
                    for b in 0..2 {
                        let matches_sign = (a == b) != anti;
                        let want = if matches_sign { 3 } else { 1 };
                        assert_eq!(g.terms()[&TermKey::new(vec![x, y], vec![a, b])], int(want));
                    }
                }
            }
        }
        let pr = fixtures::pr_box();
        assert_eq!(g.evaluate(&pr).unwrap(), int(12));
        assert_eq!(g.evaluate(&pr).unwrap(), signed.evaluate(&pr).unwrap() + int(8));
    }

    #[test]
    fn normalize_single_negative_term() {
        let s = Scenario::uniform(2, 2, 2).unwrap();
        let f = BellFunctional::new(
            s,
            Form::Probability,
            int(7),
            [(TermKey::new(vec![0, 0], vec![0, 0]), int(-5))],
        )
        .unwrap();
        let (g, c) = f.normalize_nonneg().unwrap();
        assert_eq!(c, int(5));
        assert_eq!(*g.bound(), int(12));
        assert_eq!(g.num_terms(), 3);
        for o in [[0, 1], [1, 0], [1, 1]] {
            assert_eq!(g.terms()[&TermKey::new(vec![0, 0], o.to_vec())], int(5));
        }
    }

    #[test]
    fn normalize_identity_on_nonnegative() {
        let f = fixtures::chsh_prob();
        let (g, c) = f.normalize_nonneg().unwrap();
        assert_eq!(g, f);
        assert!(c.is_zero());
    }

    #[test]
    fn normalize_needs_probability_form() {
        assert!(fixtures::chsh_corr().normalize_nonneg().is_err());
    }

    #[test]
    fn require_nonnegative_names_term() {
        let signed = fixtures::chsh_corr().expand_correlators().unwrap();
        match signed.require_nonnegative() {
            Err(Error::NotNonNegative { settings, outcomes, .. }) => {
                assert_eq!(settings, vec![0, 0]);
                assert_eq!(outcomes, vec![0, 1]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn evaluation_rejects_mismatch() {
        let f = fixtures::chsh_prob();
        let p = crate::behavior::Behavior::uniform(Scenario::uniform(3, 2, 2).unwrap());
        assert!(matches!(f.evaluate(&p), Err(Error::ScenarioMismatch(_))));
    }
}
