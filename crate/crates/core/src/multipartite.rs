//! Reduction of N-party functionals to two composite parties.
//!
//! Each side of a bipartition becomes one party whose settings (outcomes)
//! are the tuples of its members' settings (outcomes), encoded in mixed radix
//! in the listed member order, first member most significant.

use crate::behavior::Behavior;
use crate::functional::{BellFunctional, Form, TermKey};
use crate::scenario::{MixedRadix, PartySpec, Scenario};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    group_a: Vec<usize>,
    group_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(num_parties: usize, group_a: Vec<usize>, group_b: Vec<usize>) -> Result<Self> {
        if group_a.is_empty() || group_b.is_empty() {
            return Err(Error::Precondition("both sides of a bipartition must be non-empty".into()));
        }
        let mut seen = vec![false; num_parties];
        for &i in group_a.iter().chain(&group_b) {
            if i >= num_parties {
                return Err(Error::Precondition(format!("party {i} out of range 0..{num_parties}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Precondition(format!("party {i} listed twice")));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Precondition(format!("party {i} is on neither side")));
        }
        Ok(Self { group_a, group_b })
    }

    /// `group_a` as given, `group_b` the remaining parties in ascending order.
    pub fn from_group(num_parties: usize, group_a: Vec<usize>) -> Result<Self> {
        let group_b = (0..num_parties).filter(|i| !group_a.contains(i)).collect();
        Self::new(num_parties, group_a, group_b)
    }

    pub fn group_a(&self) -> &[usize] {
        &self.group_a
    }

    pub fn group_b(&self) -> &[usize] {
        &self.group_b
    }

    fn groups(&self) -> [&[usize]; 2] {
        [&self.group_a, &self.group_b]
    }
}

/// Index bijection between an N-party scenario and its two-party flattening.
#[derive(Clone, Debug)]
pub struct FlattenMap {
    cut: Bipartition,
    original: Scenario,
    flat: Scenario,
    settings: [MixedRadix; 2],
    outcomes: [MixedRadix; 2],
}

impl FlattenMap {
    pub fn new(original: &Scenario, cut: &Bipartition) -> Result<Self> {
        Bipartition::new(original.num_parties(), cut.group_a.clone(), cut.group_b.clone())?;
        let radix = |group: &[usize], f: fn(&PartySpec) -> usize| {
            MixedRadix::new(group.iter().map(|&i| f(&original.party(i))).collect())
        };
        let settings = [radix(&cut.group_a, |p| p.settings)?, radix(&cut.group_b, |p| p.settings)?];
        let outcomes = [radix(&cut.group_a, |p| p.outcomes)?, radix(&cut.group_b, |p| p.outcomes)?];
        let flat = Scenario::new(vec![
            PartySpec::new(settings[0].len(), outcomes[0].len()),
            PartySpec::new(settings[1].len(), outcomes[1].len()),
        ])?;
        Ok(Self {
            cut: cut.clone(),
            original: original.clone(),
            flat,
            settings,
            outcomes,
        })
    }

    pub fn cut(&self) -> &Bipartition {
        &self.cut
    }

    pub fn original(&self) -> &Scenario {
        &self.original
    }

    pub fn flat(&self) -> &Scenario {
        &self.flat
    }

    fn pack(radix: &[MixedRadix; 2], groups: [&[usize]; 2], tuple: &[usize]) -> Vec<usize> {
        groups
            .iter()
            .zip(radix)
            .map(|(g, r)| r.encode(&g.iter().map(|&i| tuple[i]).collect::<Vec<_>>()))
            .collect()
    }

    fn unpack(&self, radix: &[MixedRadix; 2], flat: &[usize]) -> Vec<usize> {
        let mut tuple = vec![0; self.original.num_parties()];
        for ((g, r), &v) in self.cut.groups().iter().zip(radix).zip(flat) {
            for (&i, d) in g.iter().zip(r.decode(v)) {
                tuple[i] = d;
            }
        }
        tuple
    }

    /// N-party `(settings, outcomes)` to composite `(settings, outcomes)`.
    pub fn forward(&self, settings: &[usize], outcomes: &[usize]) -> (Vec<usize>, Vec<usize>) {
        (
            Self::pack(&self.settings, self.cut.groups(), settings),
            Self::pack(&self.outcomes, self.cut.groups(), outcomes),
        )
    }

    /// Composite `(settings, outcomes)` back to N-party tuples.
    pub fn inverse(&self, settings: &[usize], outcomes: &[usize]) -> (Vec<usize>, Vec<usize>) {
        (self.unpack(&self.settings, settings), self.unpack(&self.outcomes, outcomes))
    }
}

/// Transports `f` to the two composite parties of `cut`. Correlator-form
/// input is expanded first unless both sides are single parties, in which
/// case the flattening is a relabeling and keeps the form.
///
/// The declared bound is carried over unchanged. A composite party can
/// correlate its members, so the local bound of the flattened functional may
/// be larger; recompute it with [`crate::bounds::local_bound`] when needed.
pub fn flatten_bipartition(f: &BellFunctional, cut: &Bipartition) -> Result<(BellFunctional, FlattenMap)> {
    let map = FlattenMap::new(f.scenario(), cut)?;
    let singletons = cut.group_a.len() == 1 && cut.group_b.len() == 1;
    let f = if singletons { f.clone() } else { f.to_probability_form()? };
    let terms = f.terms().iter().map(|(k, c)| {
        let s = FlattenMap::pack(&map.settings, cut.groups(), &k.settings);
        let o = if k.outcomes.is_empty() {
            Vec::new()
        } else {
            FlattenMap::pack(&map.outcomes, cut.groups(), &k.outcomes)
        };
        (TermKey::new(s, o), c.clone())
    });
    let form = if singletons { f.form() } else { Form::Probability };
    let flat = BellFunctional::new(map.flat.clone(), form, f.bound().clone(), terms)?;
    Ok((flat, map))
}

pub fn flatten_behavior(p: &Behavior, cut: &Bipartition) -> Result<Behavior> {
    let map = FlattenMap::new(p.scenario(), cut)?;
    Ok(Behavior::from_fn(map.flat.clone(), |s, o| {
        let (s, o) = map.inverse(s, o);
        p.prob(&s, &o).clone()
    }))
}
