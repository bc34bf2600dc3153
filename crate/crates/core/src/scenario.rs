use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upper limit on `joint settings * joint outcomes`, the size of a dense
/// behavior table.
pub const MAX_TABLE_ENTRIES: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartySpec {
    pub settings: usize,
    pub outcomes: usize,
}

impl PartySpec {
    pub fn new(settings: usize, outcomes: usize) -> Self {
        Self { settings, outcomes }
    }
}

/// Mixed-radix index codec. The first digit is the most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedRadix {
    radices: Vec<usize>,
    len: usize,
}

impl MixedRadix {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        let len = radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .ok_or_else(|| Error::TooLarge(format!("index space over radices {radices:?} overflows")))?;
        Ok(Self { radices, len })
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    /// Number of digit tuples.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.radices.len());
        digits
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d = index % r;
            index /= r;
        }
        digits
    }

    /// Whether every digit is within its radix.
    pub fn contains(&self, digits: &[usize]) -> bool {
        digits.len() == self.radices.len() && digits.iter().zip(&self.radices).all(|(&d, &r)| d < r)
    }

    /// All tuples in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len).map(|i| self.decode(i))
    }
}

/// A Bell scenario: an ordered list of parties, each with a number of
/// measurement settings and a number of outcomes shared by all its settings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    parties: Vec<PartySpec>,
    settings: MixedRadix,
    outcomes: MixedRadix,
}

#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    parties: Vec<PartySpec>,
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = Error;

    fn try_from(r: ScenarioRepr) -> Result<Self> {
        Scenario::new(r.parties)
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        ScenarioRepr { parties: s.parties }
    }
}

impl Scenario {
    pub fn new(parties: Vec<PartySpec>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidScenario("at least one party is required".into()));
        }
        for (i, p) in parties.iter().enumerate() {
            if p.settings == 0 {
                return Err(Error::InvalidScenario(format!("party {i} has no settings")));
            }
            if p.outcomes < 2 {
                return Err(Error::InvalidScenario(format!(
                    "party {i} has {} outcome(s), at least 2 are required",
                    p.outcomes
                )));
            }
        }
        let settings = MixedRadix::new(parties.iter().map(|p| p.settings).collect())?;
        let outcomes = MixedRadix::new(parties.iter().map(|p| p.outcomes).collect())?;
        match settings.len().checked_mul(outcomes.len()) {
            Some(n) if n <= MAX_TABLE_ENTRIES => {}
            _ => {
                return Err(Error::TooLarge(format!(
                    "{} joint settings x {} joint outcomes exceeds the table cap {MAX_TABLE_ENTRIES}",
                    settings.len(),
                    outcomes.len()
                )))
            }
        }
        Ok(Self {
            parties,
            settings,
            outcomes,
        })
    }

    /// Every party with the same settings and outcome counts.
    pub fn uniform(num_parties: usize, settings: usize, outcomes: usize) -> Result<Self> {
        Self::new(vec![PartySpec::new(settings, outcomes); num_parties])
    }

    pub fn parties(&self) -> &[PartySpec] {
        &self.parties
    }

    pub fn party(&self, i: usize) -> PartySpec {
        self.parties[i]
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn settings_index(&self) -> &MixedRadix {
        &self.settings
    }

    pub fn outcomes_index(&self) -> &MixedRadix {
        &self.outcomes
    }

    pub fn num_joint_settings(&self) -> usize {
        self.settings.len()
    }

    pub fn num_joint_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    /// Length of a dense behavior table.
    pub fn table_len(&self) -> usize {
        self.settings.len() * self.outcomes.len()
    }

    /// Position of `(settings, outcomes)` in the settings-major table.
    pub fn table_index(&self, settings: &[usize], outcomes: &[usize]) -> usize {
        self.settings.encode(settings) * self.outcomes.len() + self.outcomes.encode(outcomes)
    }

    pub fn is_binary(&self) -> bool {
        self.parties.iter().all(|p| p.outcomes == 2)
    }

    /// Sub-scenario made of the listed parties, in the listed order.
    pub fn restrict(&self, parties: &[usize]) -> Result<Self> {
        Self::new(parties.iter().map(|&i| self.parties[i]).collect())
    }
}
