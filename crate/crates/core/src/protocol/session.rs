use super::assignment::assign_ghz;
use super::config::{AngleMode, SessionConfig};
use super::round::{run_round, GhzSetup, Honest, RoundAdversary, RoundRecord};
use crate::error::Result;
use crate::qsim::Sampler;
use crate::rng::RngStream;
use crate::shares::{generate_shares, AngleShareSet};

/// Outcome of `K` rounds between one notifier and one receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionResult {
    pub config: SessionConfig,
    pub setups: Vec<GhzSetup>,
    /// The receiver saw announced parity 1 on the notifier's GHZ in some round.
    pub detected: bool,
    pub detection_round: Option<usize>,
    pub records: Vec<RoundRecord>,
    /// `flags[w]`: user `w` saw parity 1 on a GHZ it checks in a round where
    /// that GHZ carried no kick.
    pub false_positive_flags: Vec<bool>,
}

impl SessionResult {
    /// Receiver slot in the notifier's GHZ; the same slot index is the checked
    /// slot of every GHZ.
    pub fn receiver_slot(&self) -> usize {
        self.setups
            .iter()
            .find(|s| s.label() == self.config.notifier)
            .map(|s| s.assignment.slot_of(self.config.receiver))
            .expect("session always holds the notifier's GHZ")
    }

    /// Per-round receiver verdicts (announced parity of the notifier's GHZ).
    pub fn receiver_verdicts(&self) -> Vec<bool> {
        self.records
            .iter()
            .map(|r| r.announced_parity(self.config.notifier) == Some(1))
            .collect()
    }

    pub fn kicks(&self) -> usize {
        self.records.iter().filter(|r| r.kick_applied).count()
    }

    /// Any party flagged a false positive.
    pub fn false_positive(&self) -> bool {
        self.false_positive_flags.iter().any(|&f| f)
    }

    /// The receiver saw parity 1 in a round without a kick.
    pub fn false_notify(&self) -> bool {
        self.records
            .iter()
            .zip(self.receiver_verdicts())
            .any(|(r, v)| v && !r.kick_applied)
    }

    /// The notifier kicked at least once and no kicked round reached the
    /// receiver as parity 1.
    pub fn missed(&self) -> bool {
        self.kicks() > 0
            && !self
                .records
                .iter()
                .zip(self.receiver_verdicts())
                .any(|(r, v)| v && r.kick_applied)
    }
}

/// Draws the secret mappings and angle shares for every GHZ in scope.
pub fn setup_session(cfg: &SessionConfig, rng: &mut RngStream) -> Result<Vec<GhzSetup>> {
    cfg.validate()?;
    let labels = cfg.ghz_labels();
    let assignments = labels
        .iter()
        .map(|&j| assign_ghz(cfg.n, j, rng))
        .collect::<Result<Vec<_>>>()?;
    let shares: Vec<AngleShareSet> = match cfg.angle_mode {
        AngleMode::Zero => labels
            .iter()
            .map(|&j| AngleShareSet::zero(cfg.n, j, Some(j)))
            .collect::<Result<_>>()?,
        AngleMode::PerGhz => labels
            .iter()
            .map(|&j| generate_shares(cfg.n, j, 0.0, Some(j), rng))
            .collect::<Result<_>>()?,
        AngleMode::Reused => {
            let master = generate_shares(cfg.n, cfg.notifier, 0.0, Some(cfg.notifier), rng)?;
            labels
                .iter()
                .map(|&j| master.reassigned(j, Some(j)))
                .collect::<Result<_>>()?
        }
    };
    Ok(assignments
        .into_iter()
        .zip(shares)
        .map(|(assignment, shares)| GhzSetup { assignment, shares })
        .collect())
}

/// Runs `K` fresh rounds over fixed session secrets with adversary hooks.
pub fn run_session_with(
    cfg: &SessionConfig,
    adversary: &mut dyn RoundAdversary,
    sampler: &mut Sampler,
    rng: &mut RngStream,
) -> Result<SessionResult> {
    let setups = setup_session(cfg, rng)?;
    let records = (0..cfg.k_rounds)
        .map(|k| run_round(cfg, k, &setups, adversary, sampler, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarise(cfg, setups, records))
}

/// Honest session on a private sampler.
pub fn run_session(cfg: &SessionConfig, rng: &mut RngStream) -> Result<SessionResult> {
    run_session_with(cfg, &mut Honest, &mut Sampler::new(cfg.backend), rng)
}

fn summarise(cfg: &SessionConfig, setups: Vec<GhzSetup>, records: Vec<RoundRecord>) -> SessionResult {
    let receiver_slot = setups
        .iter()
        .find(|s| s.label() == cfg.notifier)
        .map(|s| s.assignment.slot_of(cfg.receiver))
        .expect("scope contains the notifier's GHZ");
    let detection_round = records
        .iter()
        .position(|r| r.announced_parity(cfg.notifier) == Some(1));
    let mut flags = vec![false; cfg.n];
    for r in &records {
        for g in &r.ghz {
            if g.announced_parity == 1 && !g.kick_applied {
                let setup = setups
                    .iter()
                    .find(|s| s.label() == g.ghz_index)
                    .expect("outcome label comes from a setup");
                flags[setup.assignment.user_at(receiver_slot)] = true;
            }
        }
    }
    SessionResult {
        config: cfg.clone(),
        setups,
        detected: detection_round.is_some(),
        detection_round,
        records,
        false_positive_flags: flags,
    }
}
