//! Monogamy of Bell violations: one party (Alice) tested against `n` copies
//! of the other (the Bobs), where `n` is also each Bob's number of settings.
//!
//! For every no-signaling behavior of the extended scenario,
//! `sum_m B(A, B_m) <= n R`. The sum regroups into `n` chained expressions
//! `B_m`, each pairing Alice's settings with a single fixed setting per Bob:
//! under `B_m` Bob `j` always measures setting `j - m + 1 (mod n)`. With the
//! Bobs' settings fixed, any no-signaling behavior is reproduced by a local
//! model, so each `B_m <= R`.

use num_traits::{Signed, Zero};

use crate::behavior::{Behavior, SignalingWitness};
use crate::bounds::{self, DeterministicStrategy, NsOptimum};
use crate::functional::{BellFunctional, Form, TermKey};
use crate::lhv::LhvModel;
use crate::rational::{int, Rational};
use crate::scenario::{PartySpec, Scenario};
use crate::{Error, Result};

/// A bipartite non-negative functional lifted to Alice plus `n` Bobs.
#[derive(Clone, Debug)]
pub struct MonogamySetup {
    base: BellFunctional,
    n: usize,
    extended: Scenario,
}

/// One coefficient of `B_m`: `alpha(x, y, a, b)` moved onto Bob `bob`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainTerm {
    pub alice_setting: usize,
    pub alice_outcome: usize,
    /// Zero-based Bob index.
    pub bob: usize,
    /// The Bob setting `y` of the base term; under `B_m` Bob `bob` measures it.
    pub bob_setting: usize,
    pub bob_outcome: usize,
    pub coeff: Rational,
}

#[derive(Clone, Debug)]
pub struct MonogamyReport {
    /// `B(A, B_m)` for `m = 1..=n`.
    pub per_pair: Vec<Rational>,
    pub sum: Rational,
    /// `n R`.
    pub bound: Rational,
    pub holds: bool,
    /// `None` when the behavior is no-signaling. Otherwise the pair values
    /// were read with every other Bob at setting 0.
    pub signaling: Option<SignalingWitness>,
}

#[derive(Clone, Debug)]
pub struct MonogamyLp {
    /// Maximum of `sum_m B_m` over the extended no-signaling polytope.
    pub value: Rational,
    /// `n R`.
    pub bound: Rational,
    pub optimum: NsOptimum,
}

impl MonogamyLp {
    pub fn is_tight(&self) -> bool {
        self.value == self.bound
    }
}

/// Lifts `f` (bipartite, probability form, non-negative) to Alice plus `n`
/// Bobs, `n` being Bob's setting count.
pub fn extend_scenario(f: &BellFunctional) -> Result<MonogamySetup> {
    let scenario = f.scenario();
    if scenario.num_parties() != 2 {
        return Err(Error::Precondition(format!(
            "monogamy needs a bipartite functional, got {} parties (flatten a bipartition first)",
            scenario.num_parties()
        )));
    }
    f.require_nonnegative()?;
    if f.bound().is_negative() {
        return Err(Error::Precondition("bound must be non-negative".into()));
    }
    let alice = scenario.party(0);
    let bob = scenario.party(1);
    let n = bob.settings;
    let mut parties = vec![alice];
    parties.extend(std::iter::repeat_n(bob, n));
    let extended = Scenario::new(parties)?;
    Ok(MonogamySetup {
        base: f.clone(),
        n,
        extended,
    })
}

impl MonogamySetup {
    pub fn base(&self) -> &BellFunctional {
        &self.base
    }

    /// Number of Bobs, equal to each Bob's setting count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extended(&self) -> &Scenario {
        &self.extended
    }

    pub fn alice(&self) -> PartySpec {
        self.extended.party(0)
    }

    pub fn bob(&self) -> PartySpec {
        self.extended.party(1)
    }

    /// `n R`.
    pub fn bound(&self) -> Rational {
        self.base.bound() * int(self.n as i64)
    }

    /// The one place where the 1-based chain index `m` meets 0-based code:
    /// returns `m - 1`, or an error outside `1..=n`.
    fn chain_offset(&self, m: usize) -> Result<usize> {
        if m == 0 || m > self.n {
            return Err(Error::Precondition(format!(
                "chain index {m} outside 1..={}",
                self.n
            )));
        }
        Ok(m - 1)
    }

    /// Settings of Bob 0..n under `B_m`: Bob `j` measures `j - m + 1 (mod n)`
    /// in 1-based terms.
    pub fn chain_settings(&self, m: usize) -> Result<Vec<usize>> {
        let k = self.chain_offset(m)?;
        Ok((0..self.n).map(|j| (j + self.n - k) % self.n).collect())
    }

    /// Bob that carries Bob setting `y` under `B_m`: `y + m - 1 (mod n)` in
    /// 1-based terms.
    pub fn chain_bob(&self, m: usize, y: usize) -> Result<usize> {
        let k = self.chain_offset(m)?;
        Ok((y + k) % self.n)
    }

    /// The base terms relabeled for `B_m`; one per base term.
    pub fn chain_terms(&self, m: usize) -> Result<Vec<ChainTerm>> {
        self.base
            .terms()
            .iter()
            .map(|(k, c)| {
                Ok(ChainTerm {
                    alice_setting: k.settings[0],
                    alice_outcome: k.outcomes[0],
                    bob: self.chain_bob(m, k.settings[1])?,
                    bob_setting: k.settings[1],
                    bob_outcome: k.outcomes[1],
                    coeff: c.clone(),
                })
            })
            .collect()
    }

    /// `B_m` as a functional on the extended scenario. Every term sits at
    /// Alice setting `x` and the fixed Bob settings of `B_m`; summing the
    /// chain terms over the Bobs they leave unconstrained gives the
    /// coefficient `alpha'(x, a, b_1..b_n) = sum_y alpha(x, y, a, b_(bob of y))`.
    pub fn chain_functional(&self, m: usize) -> Result<BellFunctional> {
        let bobs = self.chain_settings(m)?;
        let chain = self.chain_terms(m)?;
        let mut terms = Vec::new();
        for x in 0..self.alice().settings {
            let mut settings = vec![x];
            settings.extend(&bobs);
            for o in self.extended.outcomes_index().iter() {
                let coeff: Rational = chain
                    .iter()
                    .filter(|t| t.alice_setting == x && t.alice_outcome == o[0] && o[1 + t.bob] == t.bob_outcome)
                    .map(|t| &t.coeff)
                    .sum();
                if !coeff.is_zero() {
                    terms.push((TermKey::new(settings.clone(), o), coeff));
                }
            }
        }
        BellFunctional::new(self.extended.clone(), Form::Probability, self.base.bound().clone(), terms)
    }

    /// `B_m` with the Bobs' fixed settings dropped: a functional on
    /// [`LhvModel::slice_scenario`], i.e. the `alpha'` of Alice's setting and
    /// outcome and the list of all Bob outcomes.
    pub fn collapsed_chain(&self, m: usize) -> Result<BellFunctional> {
        let bobs = self.chain_settings(m)?;
        let slice = LhvModel::slice_scenario(self.alice(), &vec![self.bob().outcomes; self.n])?;
        let full = self.chain_functional(m)?;
        let terms = full.terms().iter().map(|(k, c)| {
            debug_assert_eq!(&k.settings[1..], bobs.as_slice());
            let mut s = vec![k.settings[0]];
            s.extend(std::iter::repeat_n(0, self.n));
            (TermKey::new(s, k.outcomes.clone()), c.clone())
        });
        BellFunctional::new(slice, Form::Probability, self.base.bound().clone(), terms)
    }

    /// Alice-Bob_m distribution with all other Bobs at setting 0.
    fn pair_marginal(&self, p: &Behavior, m: usize) -> Result<Behavior> {
        let bob = self.chain_offset(m)? + 1;
        let marginal = p.marginal_table(&[0, bob], &vec![0; self.extended.num_parties()])?;
        Behavior::from_table(self.base.scenario().clone(), marginal.into_table())
    }

    fn check_scenario(&self, p: &Behavior) -> Result<()> {
        if p.scenario() != &self.extended {
            return Err(Error::ScenarioMismatch(
                "behavior is not on the extended Alice + n Bobs scenario".into(),
            ));
        }
        Ok(())
    }

    /// `B(A, B_m)` for a no-signaling behavior of the extended scenario.
    pub fn pair_value(&self, p: &Behavior, m: usize) -> Result<Rational> {
        self.check_scenario(p)?;
        self.chain_offset(m)?;
        p.require_nonsignaling()?;
        self.base.evaluate(&self.pair_marginal(p, m)?)
    }

    /// Evaluates `sum_m B(A, B_m)` against `n R`. Signaling behaviors are
    /// still evaluated (pair marginals at other Bobs' setting 0) and the
    /// report carries the signaling witness.
    pub fn monogamy_check(&self, p: &Behavior) -> Result<MonogamyReport> {
        self.check_scenario(p)?;
        let per_pair = (1..=self.n)
            .map(|m| self.base.evaluate(&self.pair_marginal(p, m)?))
            .collect::<Result<Vec<_>>>()?;
        let sum: Rational = per_pair.iter().sum();
        let bound = self.bound();
        Ok(MonogamyReport {
            holds: sum <= bound,
            per_pair,
            sum,
            bound,
            signaling: p.signaling_witness(),
        })
    }

    /// Dense objective `sum_m B_m` on the extended table.
    pub fn chain_sum_objective(&self) -> Result<Vec<Rational>> {
        let mut objective = vec![Rational::zero(); self.extended.table_len()];
        for m in 1..=self.n {
            for (o, c) in objective.iter_mut().zip(self.chain_functional(m)?.dense_coefficients()?) {
                if !c.is_zero() {
                    *o += c;
                }
            }
        }
        Ok(objective)
    }

    /// Maximum of `sum_m B_m` over the extended no-signaling polytope.
    pub fn monogamy_lp_max(&self) -> Result<MonogamyLp> {
        let optimum = bounds::ns_maximize(&self.extended, self.chain_sum_objective()?)?;
        Ok(MonogamyLp {
            value: optimum.value.clone(),
            bound: self.bound(),
            optimum,
        })
    }

    /// Deterministic behavior on the extended scenario where Alice plays
    /// `strategy`'s first entry and every Bob copies its second.
    pub fn clone_strategy(&self, strategy: &DeterministicStrategy) -> Result<Behavior> {
        if strategy.outcomes.len() != 2 {
            return Err(Error::Precondition("expected a bipartite strategy".into()));
        }
        let mut lifted = vec![strategy.outcomes[0].clone()];
        lifted.extend(std::iter::repeat_n(strategy.outcomes[1].clone(), self.n));
        Behavior::deterministic(self.extended.clone(), &lifted)
    }

    /// The optimal local strategy of the base functional, cloned to every
    /// Bob; its pair values are all `R`, so its sum is `n R`.
    pub fn cloned_local_optimum(&self) -> Result<Behavior> {
        let lb = bounds::local_bound(&self.base)?;
        self.clone_strategy(&lb.witness)
    }

    /// Local model reproducing `p` on the settings slice used by `B_m`:
    /// hidden weight `P(b)` is the Bobs' marginal there and Alice answers
    /// `P(a | b, x) = p(a, b | x, fixed) / P(b)`, uniform where `P(b) = 0`.
    pub fn fixed_setting_lhv(&self, p: &Behavior, m: usize) -> Result<LhvModel> {
        self.check_scenario(p)?;
        p.require_nonsignaling()?;
        let bobs = self.chain_settings(m)?;
        let alice = self.alice();
        let scenario = LhvModel::slice_scenario(alice, &vec![self.bob().outcomes; self.n])?;
        let bob_outcomes = crate::scenario::MixedRadix::new(vec![self.bob().outcomes; self.n])?;
        let uniform = Rational::new(1.into(), alice.outcomes.into());

        let mut hidden = std::collections::BTreeMap::new();
        let mut responses = std::collections::BTreeMap::new();
        let settings_at = |x: usize| {
            let mut s = vec![x];
            s.extend(&bobs);
            s
        };
        for b in bob_outcomes.iter() {
            let mut o = vec![0];
            o.extend(&b);
            let weight: Rational = (0..alice.outcomes)
                .map(|a| {
                    o[0] = a;
                    p.prob(&settings_at(0), &o).clone()
                })
                .sum();
            for x in 0..alice.settings {
                let dist = if weight.is_zero() {
                    vec![uniform.clone(); alice.outcomes]
                } else {
                    (0..alice.outcomes)
                        .map(|a| {
                            o[0] = a;
                            p.prob(&settings_at(x), &o) / &weight
                        })
                        .collect()
                };
                responses.insert((b.clone(), x), dist);
            }
            hidden.insert(b, weight);
        }
        Ok(LhvModel {
            scenario,
            hidden,
            responses,
        })
    }

    /// `p` restricted to the settings slice of `B_m`, as a behavior on
    /// [`LhvModel::slice_scenario`].
    pub fn fixed_setting_slice(&self, p: &Behavior, m: usize) -> Result<Behavior> {
        self.check_scenario(p)?;
        let bobs = self.chain_settings(m)?;
        let scenario = LhvModel::slice_scenario(self.alice(), &vec![self.bob().outcomes; self.n])?;
        Ok(Behavior::from_fn(scenario, |s, o| {
            let mut full = vec![s[0]];
            full.extend(&bobs);
            p.prob(&full, o).clone()
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    fn chsh() -> MonogamySetup {
        extend_scenario(&fixtures::chsh_prob()).unwrap()
    }

    #[test]
    fn extended_chsh_scenario() {
        let s = chsh();
        assert_eq!(s.n(), 2);
        assert_eq!(s.extended(), &Scenario::uniform(3, 2, 2).unwrap());
        assert_eq!(s.bound(), int(6));
    }

    #[test]
    fn extended_chained_scenario() {
        let s = extend_scenario(&fixtures::chained3_prob()).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.extended().num_parties(), 4);
        assert_eq!(s.bound(), int(15));
    }

    #[test]
    fn signed_input_is_rejected() {
        assert!(extend_scenario(&fixtures::chsh_corr()).is_err());
        let signed = fixtures::chsh_corr().expand_correlators().unwrap();
        assert!(matches!(extend_scenario(&signed), Err(Error::NotNonNegative { .. })));
        assert!(extend_scenario(&fixtures::mermin()).is_err());
    }

    #[test]
    fn chain_index_rule() {
        let s = chsh();
        // m = 1: setting y is measured by Bob y (1-based), i.e. Bob j at setting j.
        assert_eq!(s.chain_settings(1).unwrap(), vec![0, 1]);
        assert_eq!(s.chain_bob(1, 0).unwrap(), 0);
        assert_eq!(s.chain_bob(1, 1).unwrap(), 1);
        // m = 2: y = 1 goes to Bob 2, y = 2 to Bob 1.
        assert_eq!(s.chain_settings(2).unwrap(), vec![1, 0]);
        assert_eq!(s.chain_bob(2, 0).unwrap(), 1);
        assert_eq!(s.chain_bob(2, 1).unwrap(), 0);
        assert!(s.chain_settings(0).is_err());
        assert!(s.chain_settings(3).is_err());
    }

    #[test]
    fn chain_is_a_relabeling() {
        let s = extend_scenario(&fixtures::chained3_prob()).unwrap();
        for m in 1..=3 {
            let terms = s.chain_terms(m).unwrap();
            assert_eq!(terms.len(), s.base().num_terms());
            let settings = s.chain_settings(m).unwrap();
            for t in &terms {
                assert_eq!(settings[t.bob], t.bob_setting);
            }
        }
    }

    #[test]
    fn cloned_local_optimum_pairs() {
        let s = chsh();
        let p = s.cloned_local_optimum().unwrap();
        assert_eq!(s.pair_value(&p, 1).unwrap(), int(3));
        assert_eq!(s.pair_value(&p, 2).unwrap(), int(3));
        let r = s.monogamy_check(&p).unwrap();
        assert_eq!(r.sum, int(6));
        assert!(r.holds && r.signaling.is_none());
    }

    #[test]
    fn pr_box_with_independent_second_bob() {
        let s = chsh();
        let pr = fixtures::pr_box();
        let p = Behavior::from_fn(s.extended().clone(), |st, o| {
            pr.prob(&st[..2], &o[..2]) * ratio(1, 2)
        });
        assert_eq!(s.pair_value(&p, 1).unwrap(), int(4));
        assert_eq!(s.pair_value(&p, 2).unwrap(), int(2));
        let r = s.monogamy_check(&p).unwrap();
        assert_eq!(r.sum, int(6));
        assert!(r.holds);
    }

    #[test]
    fn uniform_pairs() {
        let s = chsh();
        let p = Behavior::uniform(s.extended().clone());
        assert_eq!(s.pair_value(&p, 1).unwrap(), int(2));
        assert_eq!(s.pair_value(&p, 2).unwrap(), int(2));
    }

    #[test]
    fn pair_value_rejects_signaling_and_range() {
        let s = chsh();
        let p = Behavior::from_fn(s.extended().clone(), |st, o| {
            if o[0] == 0 && o[1] == st[0] && o[2] == 0 {
                int(1)
            } else {
                int(0)
            }
        });
        assert!(matches!(s.pair_value(&p, 1), Err(Error::Signaling(_))));
        let q = Behavior::uniform(s.extended().clone());
        assert!(s.pair_value(&q, 3).is_err());
    }

    #[test]
    fn lhv_of_cloned_deterministic_is_point_mass() {
        let s = chsh();
        let p = s.cloned_local_optimum().unwrap();
        for m in 1..=2 {
            let model = s.fixed_setting_lhv(&p, m).unwrap();
            model.validate().unwrap();
            let support: Vec<_> = model.hidden.iter().filter(|(_, w)| !w.is_zero()).collect();
            assert_eq!(support.len(), 1);
            assert_eq!(model.to_behavior(), s.fixed_setting_slice(&p, m).unwrap());
        }
    }

    #[test]
    fn collapsed_chain_has_local_bound_r() {
        let s = chsh();
        for m in 1..=2 {
            let c = s.collapsed_chain(m).unwrap();
            assert_eq!(bounds::local_bound(&c).unwrap().value, int(3));
        }
    }
}
