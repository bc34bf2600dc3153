//! Optimization over the no-signaling polytope.
//!
//! A no-signaling behavior is fixed by its marginals `P(o_S | s_S)` for every
//! non-empty party subset `S`, settings of `S`, and outcomes of `S` that avoid
//! each party's last outcome. These marginals (`NsCoordinates`) parametrize the
//! affine hull of the polytope without redundancy, and the polytope itself is
//! `{ table(y) >= 0 }`. Maximizing `c . table(y)` is solved through its
//! equality-form dual
//!
//! ```text
//! maximize  -e . l   s.t.  M^T l = -M^T c,  l >= 0
//! ```
//!
//! where `table(y) = e + M y`. The simplex multipliers of that LP are the
//! coordinates `y` of an optimal vertex.

use std::collections::HashMap;

use exact_lp::{check_certificate, CertificateError, Constraint, LpProblem, LpSolution, LpStatus};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::behavior::Behavior;
use crate::functional::BellFunctional;
use crate::rational::{int, Rational};
use crate::scenario::{MixedRadix, Scenario};
use crate::{Error, Result};

/// Largest number of behavior-table entries accepted by the LP routines.
pub const MAX_LP_VARIABLES: usize = 4096;

/// One marginal probability `P(outcomes | settings)` of the parties listed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coordinate {
    pub parties: Vec<usize>,
    pub settings: Vec<usize>,
    pub outcomes: Vec<usize>,
}

/// Table entry as `constant + sum sign * y[coordinate]`.
#[derive(Clone, Debug, Default)]
struct Expansion {
    constant: i64,
    terms: Vec<(usize, i64)>,
}

/// Non-redundant coordinates for the affine hull of the no-signaling polytope.
#[derive(Clone, Debug)]
pub struct NsCoordinates {
    scenario: Scenario,
    coords: Vec<Coordinate>,
    expansions: Vec<Expansion>,
}

impl NsCoordinates {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let n = scenario.num_parties();
        if n >= usize::BITS as usize {
            return Err(Error::TooLarge(format!("{n} parties")));
        }
        let mut coords = Vec::new();
        for mask in 1usize..(1 << n) {
            let parties: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let settings = MixedRadix::new(parties.iter().map(|&i| scenario.party(i).settings).collect())?;
            let outcomes = MixedRadix::new(parties.iter().map(|&i| scenario.party(i).outcomes - 1).collect())?;
            for s in settings.iter() {
                for o in outcomes.iter() {
                    coords.push(Coordinate {
                        parties: parties.clone(),
                        settings: s.clone(),
                        outcomes: o,
                    });
                }
            }
        }
        let index: HashMap<&Coordinate, usize> = coords.iter().enumerate().map(|(i, c)| (c, i)).collect();

        // P(o|s) = prod_i f_i, with f_i = [i: o_i] when o_i is not the last
        // outcome and f_i = 1 - sum_{a < last} [i: a] otherwise.
        let mut expansions = Vec::with_capacity(scenario.table_len());
        for s in scenario.settings_index().iter() {
            for o in scenario.outcomes_index().iter() {
                let mut partial: Vec<(Vec<usize>, Vec<usize>, Vec<usize>, i64)> =
                    vec![(Vec::new(), Vec::new(), Vec::new(), 1)];
                for i in 0..n {
                    let last = scenario.party(i).outcomes - 1;
                    let mut next = Vec::with_capacity(partial.len() * scenario.party(i).outcomes);
                    for (ps, ss, os, sign) in partial {
                        let include = |a: usize, sign: i64| {
                            let mut ps = ps.clone();
                            let mut ss = ss.clone();
                            let mut os = os.clone();
                            ps.push(i);
                            ss.push(s[i]);
                            os.push(a);
                            (ps, ss, os, sign)
                        };
                        if o[i] < last {
                            next.push(include(o[i], sign));
                        } else {
                            for a in 0..last {
                                next.push(include(a, -sign));
                            }
                            next.push((ps, ss, os, sign));
                        }
                    }
                    partial = next;
                }
                let mut e = Expansion::default();
                for (parties, settings, outcomes, sign) in partial {
                    if parties.is_empty() {
                        e.constant += sign;
                    } else {
                        let key = Coordinate {
                            parties,
                            settings,
                            outcomes,
                        };
                        e.terms.push((index[&key], sign));
                    }
                }
                expansions.push(e);
            }
        }
        Ok(Self {
            scenario: scenario.clone(),
            coords,
            expansions,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coords
    }

    /// Behavior table `e + M y` for coordinate values `y`.
    pub fn table(&self, y: &[Rational]) -> Vec<Rational> {
        self.expansions
            .iter()
            .map(|e| {
                let mut v = int(e.constant);
                for &(j, sign) in &e.terms {
                    if sign > 0 {
                        v += &y[j];
                    } else {
                        v -= &y[j];
                    }
                }
                v
            })
            .collect()
    }

    /// Coordinates of `p`, reading each marginal with every party outside
    /// the subset at setting 0. For a no-signaling `p`,
    /// `table(of_behavior(p)) == p`.
    pub fn of_behavior(&self, p: &Behavior) -> Result<Vec<Rational>> {
        if p.scenario() != &self.scenario {
            return Err(Error::ScenarioMismatch("coordinates of a behavior on another scenario".into()));
        }
        let mut cache: HashMap<&[usize], Behavior> = HashMap::new();
        let mut out = Vec::with_capacity(self.coords.len());
        let others_at_zero = vec![0; self.scenario.num_parties()];
        for c in &self.coords {
            if !cache.contains_key(c.parties.as_slice()) {
                let m = p.marginal_table(&c.parties, &others_at_zero)?;
                cache.insert(&c.parties, m);
            }
            let m = &cache[c.parties.as_slice()];
            out.push(m.prob(&c.settings, &c.outcomes).clone());
        }
        Ok(out)
    }

    /// Equality-form dual of `max objective . P` over the polytope, and the
    /// constant `objective . e` to which the negated dual optimum is added.
    pub fn dual_problem(&self, objective: &[Rational]) -> Result<(LpProblem, Rational)> {
        let k = self.expansions.len();
        let mut rows = vec![vec![Rational::zero(); k]; self.coords.len()];
        let mut rhs = vec![Rational::zero(); self.coords.len()];
        let mut cost = Vec::with_capacity(k);
        let mut constant = Rational::zero();
        for (col, (e, c)) in self.expansions.iter().zip(objective).enumerate() {
            for &(j, sign) in &e.terms {
                rows[j][col] = int(sign);
                if !c.is_zero() {
                    rhs[j] -= c * int(sign);
                }
            }
            cost.push(int(-e.constant));
            if e.constant != 0 && !c.is_zero() {
                constant += c * int(e.constant);
            }
        }
        let constraints = rows.into_iter().zip(rhs).map(|(r, b)| Constraint::new(r, b)).collect();
        Ok((LpProblem::new(cost, constraints)?, constant))
    }
}

/// Equalities cutting out the no-signaling polytope in the space of behavior
/// tables: one normalization row per joint setting, then for every party,
/// every choice of the other parties' settings and outcomes, and every pair
/// of adjacent settings of that party, equality of the marginal of the
/// others. Many rows are redundant.
pub fn ns_constraints(scenario: &Scenario) -> Vec<Constraint> {
    let n = scenario.table_len();
    let width = scenario.num_joint_outcomes();
    let settings = scenario.settings_index();
    let outcomes = scenario.outcomes_index();
    let mut rows = Vec::new();

    for s in 0..settings.len() {
        let mut row = vec![Rational::zero(); n];
        for v in &mut row[s * width..(s + 1) * width] {
            *v = Rational::one();
        }
        rows.push(Constraint::new(row, Rational::one()));
    }

    for party in 0..scenario.num_parties() {
        let shape = scenario.party(party);
        for s in settings.iter() {
            if s[party] + 1 >= shape.settings {
                continue;
            }
            let mut t = s.clone();
            t[party] += 1;
            let (si, ti) = (settings.encode(&s), settings.encode(&t));
            // Group outcome tuples by the others' outcomes: tuples with
            // party's digit at zero enumerate each group once.
            for o in outcomes.iter() {
                if o[party] != 0 {
                    continue;
                }
                let mut row = vec![Rational::zero(); n];
                let mut ok = o.clone();
                for a in 0..shape.outcomes {
                    ok[party] = a;
                    let k = outcomes.encode(&ok);
                    row[si * width + k] = int(1);
                    row[ti * width + k] = int(-1);
                }
                rows.push(Constraint::new(row, Rational::zero()));
            }
        }
    }
    rows
}

/// The full-space formulation: variables are the table entries, constrained
/// by [`ns_constraints`]. Much more degenerate than [`ns_maximize`]'s
/// reduced LP; kept as an independent cross-check for small scenarios.
pub fn ns_full_problem(scenario: &Scenario, objective: Vec<Rational>) -> Result<LpProblem> {
    check_size(scenario)?;
    if objective.len() != scenario.table_len() {
        return Err(Error::ScenarioMismatch(format!(
            "objective has {} entries, scenario table has {}",
            objective.len(),
            scenario.table_len()
        )));
    }
    Ok(LpProblem::new(objective, ns_constraints(scenario))?)
}

fn check_size(scenario: &Scenario) -> Result<()> {
    let n = scenario.table_len();
    if n > MAX_LP_VARIABLES {
        return Err(Error::TooLarge(format!(
            "no-signaling LP would have {n} variables, limit is {MAX_LP_VARIABLES}"
        )));
    }
    Ok(())
}

/// An optimum over the no-signaling polytope together with the LP that
/// produced it, so the certificate can be rechecked.
#[derive(Clone, Debug)]
pub struct NsOptimum {
    pub value: Rational,
    /// An optimal vertex of the polytope.
    pub witness: Behavior,
    /// The reduced dual LP; `value = offset - solution.value`.
    pub problem: LpProblem,
    pub solution: LpSolution,
    pub offset: Rational,
}

impl NsOptimum {
    pub fn check_certificate(&self) -> std::result::Result<(), CertificateError> {
        check_certificate(&self.problem, &self.solution)
    }
}

/// Maximize a dense objective over the no-signaling polytope of `scenario`.
pub fn ns_maximize(scenario: &Scenario, objective: Vec<Rational>) -> Result<NsOptimum> {
    check_size(scenario)?;
    if objective.len() != scenario.table_len() {
        return Err(Error::ScenarioMismatch(format!(
            "objective has {} entries, scenario table has {}",
            objective.len(),
            scenario.table_len()
        )));
    }
    let coords = NsCoordinates::new(scenario)?;
    let (problem, offset) = coords.dual_problem(&objective)?;
    let solution = exact_lp::solve(&problem)?;
    match solution.status {
        LpStatus::Optimal => {}
        // The primal polytope is non-empty and bounded, so its dual is too.
        LpStatus::Infeasible => return Err(Error::LpStatus("infeasible".into())),
        LpStatus::Unbounded => return Err(Error::LpStatus("unbounded".into())),
    }
    let witness = Behavior::from_table(scenario.clone(), coords.table(&solution.duals))?;
    let value = &offset - &solution.value;
    let achieved: Rational = objective.iter().zip(witness.table()).map(|(c, p)| c * p).sum();
    if achieved != value {
        return Err(Error::LpStatus(format!(
            "inconsistent: vertex attains {achieved}, dual optimum gives {value}"
        )));
    }
    Ok(NsOptimum {
        value,
        witness,
        problem,
        solution,
        offset,
    })
}

/// Exact maximum of `f` over no-signaling behaviors.
pub fn ns_bound(f: &BellFunctional) -> Result<NsOptimum> {
    ns_maximize(f.scenario(), f.dense_coefficients()?)
}

/// Pseudorandom objective with entries in `[-1, 1]` on a grid of 1/1000.
pub fn random_objective(scenario: &Scenario, rng: &mut impl Rng) -> Vec<Rational> {
    (0..scenario.table_len())
        .map(|_| Rational::new(rng.gen_range(-1000i64..=1000).into(), 1000.into()))
        .collect()
}

/// A no-signaling vertex maximizing `objective`.
pub fn ns_vertex(scenario: &Scenario, objective: Vec<Rational>) -> Result<Behavior> {
    Ok(ns_maximize(scenario, objective)?.witness)
}

/// Convex mixture of `mixing` no-signaling vertices, each maximizing a
/// pseudorandom objective drawn from a ChaCha stream seeded with `seed`.
/// Mixture weights are drawn from the same stream.
pub fn sample_ns_behavior(scenario: &Scenario, seed: u64, mixing: usize) -> Result<Behavior> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = mixing.max(1);
    let mut parts = Vec::with_capacity(k);
    let mut total = 0i64;
    for _ in 0..k {
        let vertex = ns_vertex(scenario, random_objective(scenario, &mut rng))?;
        let w: i64 = rng.gen_range(1..=100);
        total += w;
        parts.push((int(w), vertex));
    }
    for (w, _) in &mut parts {
        *w /= int(total);
    }
    Behavior::weighted_sum(&parts)
}

