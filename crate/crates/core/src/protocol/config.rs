use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::qsim::{Backend, NoiseParams, EXACT_MAX_QUBITS, MAX_QUBITS};

/// Which notification mechanism the round uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Secret-shared `R_z` rotations with a probabilistic phase kick.
    Modified,
    /// Two-unitary scheme: identity everywhere, `Z` at the receiver slot
    /// when notifying.
    Baseline,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Modified, Variant::Baseline];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Modified => "modified",
            Variant::Baseline => "baseline",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modified" => Ok(Variant::Modified),
            "baseline" => Ok(Variant::Baseline),
            other => invalid(format!("unknown variant '{other}'")),
        }
    }
}

/// How many GHZ states a round simulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Scope {
    /// Only the notifier's own GHZ state.
    #[default]
    NotifierGhzOnly,
    /// One GHZ state per user, each distributed by that user.
    AllGhz,
}

/// How the per-GHZ angle shares are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum AngleMode {
    /// Every share is zero.
    #[default]
    Zero,
    /// Independent random shares per GHZ index, each summing to zero over its
    /// participants.
    PerGhz,
    /// One random share vector reused on every GHZ index. Only the notifier's
    /// GHZ is guaranteed a zero participating sum.
    Reused,
}

/// Which gate applications count as noisy gate events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NoiseAccounting {
    /// Every applied unitary, identity included, is followed by the
    /// single-qubit channel.
    #[default]
    AllGates,
    /// The baseline's identity applications are not gate events.
    ExemptIdentity,
}

impl fmt::Display for NoiseAccounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseAccounting::AllGates => "all-gates",
            NoiseAccounting::ExemptIdentity => "exempt-identity",
        })
    }
}

impl FromStr for NoiseAccounting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-gates" => Ok(NoiseAccounting::AllGates),
            "exempt-identity" => Ok(NoiseAccounting::ExemptIdentity),
            other => invalid(format!("unknown accounting mode '{other}'")),
        }
    }
}

/// Parameters of one notification session.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    pub n: usize,
    pub notifier: usize,
    pub receiver: usize,
    /// Probability that the notifier actuates the kick in a round.
    pub pz: f64,
    /// Phase kick added at the receiver slot, in radians.
    pub delta: f64,
    pub k_rounds: usize,
    pub noise: NoiseParams,
    pub variant: Variant,
    pub scope: Scope,
    pub angle_mode: AngleMode,
    pub accounting: NoiseAccounting,
    pub backend: Backend,
}

impl Default for SessionConfig {
    /// Four users, zero shares, `δ = π`, noiseless, one round, `P_z = 0.45`.
    fn default() -> Self {
        Self {
            n: 4,
            notifier: 0,
            receiver: 1,
            pz: 0.45,
            delta: PI,
            k_rounds: 1,
            noise: NoiseParams::NOISELESS,
            variant: Variant::Modified,
            scope: Scope::NotifierGhzOnly,
            angle_mode: AngleMode::Zero,
            accounting: NoiseAccounting::AllGates,
            backend: Backend::Exact,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_QUBITS).contains(&self.n) {
            return invalid(format!("user count {} outside 2..={MAX_QUBITS}", self.n));
        }
        if self.notifier >= self.n || self.receiver >= self.n {
            return invalid("notifier and receiver must be valid user indices");
        }
        if self.notifier == self.receiver {
            return invalid("notifier and receiver must differ");
        }
        if !(0.0..=1.0).contains(&self.pz) {
            return invalid(format!("pz = {} is not a probability", self.pz));
        }
        if !self.delta.is_finite() {
            return invalid("delta must be finite");
        }
        if self.k_rounds == 0 {
            return invalid("k_rounds must be at least 1");
        }
        self.noise.validate()?;
        if self.backend == Backend::Exact && self.n > EXACT_MAX_QUBITS {
            return invalid(format!(
                "exact backend supports n <= {EXACT_MAX_QUBITS}; use the trajectory backend"
            ));
        }
        Ok(())
    }

    /// GHZ labels (distributor indices) simulated each round, ascending.
    pub fn ghz_labels(&self) -> Vec<usize> {
        match self.scope {
            Scope::NotifierGhzOnly => vec![self.notifier],
            Scope::AllGhz => (0..self.n).collect(),
        }
    }
}
