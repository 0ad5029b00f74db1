use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdversaryModel {
    /// Follows the protocol and guesses identities from what it sees.
    SemiHonestObserver,
    /// Adds random `R_z` angles on its own qubits.
    RotationPoisoner,
    /// Speaks last and forges its broadcast bits.
    LastSpeaker,
}

impl fmt::Display for AdversaryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdversaryModel::SemiHonestObserver => "semi-honest",
            AdversaryModel::RotationPoisoner => "poison",
            AdversaryModel::LastSpeaker => "last-speaker",
        })
    }
}

impl FromStr for AdversaryModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semi-honest" => Ok(AdversaryModel::SemiHonestObserver),
            "poison" => Ok(AdversaryModel::RotationPoisoner),
            "last-speaker" => Ok(AdversaryModel::LastSpeaker),
            other => invalid(format!(
                "unknown adversary model '{other}' (expected poison|last-speaker|semi-honest)"
            )),
        }
    }
}

/// Announced parity the last speaker steers towards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ParityGoal {
    /// Announce parity 1.
    #[default]
    Force,
    /// Announce parity 0.
    Suppress,
}

impl ParityGoal {
    pub fn parity(self) -> u8 {
        match self {
            ParityGoal::Force => 1,
            ParityGoal::Suppress => 0,
        }
    }
}

impl fmt::Display for ParityGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityGoal::Force => "force",
            ParityGoal::Suppress => "suppress",
        })
    }
}

impl FromStr for ParityGoal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "force" => Ok(ParityGoal::Force),
            "suppress" => Ok(ParityGoal::Suppress),
            other => invalid(format!("unknown goal '{other}' (expected force|suppress)")),
        }
    }
}

/// Which broadcast bits reach the observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ViewPolicy {
    /// Honest users never send the bit of the GHZ state they distributed.
    #[default]
    Broadcast,
    /// Every measured bit is public. Used as a leaky control.
    FullTranscript,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryConfig {
    pub model: AdversaryModel,
    /// Corrupted user indices, ascending and distinct. The last speaker is
    /// the first entry.
    pub corrupted: Vec<usize>,
    /// Half-open range `[lo, hi)` for poisoning angles; `lo == hi` gives a
    /// fixed angle.
    pub poison_angle_range: (f64, f64),
    pub poison_probability: f64,
    pub goal: ParityGoal,
    pub view_policy: ViewPolicy,
    /// Lift the `|corrupted| <= n/2` cap.
    pub allow_majority: bool,
}

impl AdversaryConfig {
    pub fn new(model: AdversaryModel, corrupted: Vec<usize>) -> Self {
        Self {
            model,
            corrupted,
            poison_angle_range: (0.0, TAU),
            poison_probability: 1.0,
            goal: ParityGoal::Force,
            view_policy: ViewPolicy::Broadcast,
            allow_majority: false,
        }
    }

    pub fn observer() -> Self {
        Self::new(AdversaryModel::SemiHonestObserver, Vec::new())
    }

    pub fn poisoner(corrupted: Vec<usize>, probability: f64, range: (f64, f64)) -> Self {
        Self {
            poison_probability: probability,
            poison_angle_range: range,
            ..Self::new(AdversaryModel::RotationPoisoner, corrupted)
        }
    }

    pub fn last_speaker(user: usize, goal: ParityGoal) -> Self {
        Self {
            goal,
            ..Self::new(AdversaryModel::LastSpeaker, vec![user])
        }
    }

    pub fn is_corrupted(&self, user: usize) -> bool {
        self.corrupted.contains(&user)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.corrupted.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("corrupted users must be distinct and ascending");
        }
        if let Some(&u) = self.corrupted.iter().find(|&&u| u >= n) {
            return invalid(format!("corrupted user {u} out of range for n = {n}"));
        }
        if !self.allow_majority && self.corrupted.len() > n / 2 {
            return invalid(format!(
                "{} corrupted users exceeds n/2 = {}",
                self.corrupted.len(),
                n / 2
            ));
        }
        let (lo, hi) = self.poison_angle_range;
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return invalid(format!("bad poison angle range [{lo}, {hi})"));
        }
        if !(0.0..=1.0).contains(&self.poison_probability) {
            return invalid(format!(
                "poison probability {} is not a probability",
                self.poison_probability
            ));
        }
        if matches!(
            self.model,
            AdversaryModel::RotationPoisoner | AdversaryModel::LastSpeaker
        ) && self.corrupted.is_empty()
        {
            return invalid(format!("model {} needs at least one corrupted user", self.model));
        }
        Ok(())
    }
}
