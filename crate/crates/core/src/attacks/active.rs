//! Corrupted users that tamper with rotations or announcements.

use super::config::{AdversaryConfig, AdversaryModel};
use super::view::{semi_honest_guess, AdversaryView, LeakageReport};
use crate::error::{invalid, Result};
use crate::protocol::{run_session_with, GhzSetup, RoundAdversary, RoundRecord, SessionConfig, SessionResult};
use crate::qsim::Sampler;
use crate::rng::RngStream;

/// Each round, every poisoner independently actuates with the configured
/// probability, picks one GHZ state in scope and adds a random angle to its
/// own qubit there.
#[derive(Clone, Debug)]
pub struct Poisoner {
    users: Vec<usize>,
    range: (f64, f64),
    probability: f64,
    /// Number of poisoners that actuated, per round.
    pub actuations: Vec<usize>,
}

impl Poisoner {
    pub fn new(adv: &AdversaryConfig) -> Self {
        Self {
            users: adv.corrupted.clone(),
            range: adv.poison_angle_range,
            probability: adv.poison_probability,
            actuations: Vec::new(),
        }
    }
}

impl RoundAdversary for Poisoner {
    fn rotation_offsets(
        &mut self,
        cfg: &SessionConfig,
        setups: &[GhzSetup],
        rng: &mut RngStream,
    ) -> Vec<Vec<f64>> {
        let mut offsets = vec![vec![0.0; cfg.n]; setups.len()];
        let mut count = 0;
        // A zero probability leaves the stream untouched.
        if self.probability > 0.0 {
            for &u in &self.users {
                if rng.bernoulli(self.probability) {
                    let g = rng.index(setups.len());
                    offsets[g][u] += rng.uniform_in(self.range.0, self.range.1);
                    count += 1;
                }
            }
        }
        self.actuations.push(count);
        offsets
    }
}

/// The bit that makes `others ⊕ bit` equal `goal`.
pub fn forge_bit(others: &[u8], goal: u8) -> u8 {
    others.iter().fold(goal & 1, |acc, b| acc ^ (b & 1))
}

/// Waits for everyone else, then picks its bits so each announced parity
/// equals the goal. Physical outcomes in the record are left alone.
#[derive(Clone, Copy, Debug)]
pub struct LastSpeaker {
    pub user: usize,
    pub goal: u8,
}

impl RoundAdversary for LastSpeaker {
    fn tamper(&mut self, _cfg: &SessionConfig, record: &mut RoundRecord) {
        let Some(pos) = record.broadcasts.iter().position(|b| b.sender == self.user) else {
            return;
        };
        let mut mine = record.broadcasts.remove(pos);
        for entry in &mut mine.entries {
            let label = entry.0;
            let others: Vec<u8> = record
                .broadcasts
                .iter()
                .flat_map(|b| &b.entries)
                .filter(|(l, _)| *l == label)
                .map(|&(_, bit)| bit)
                .collect();
            entry.1 = forge_bit(&others, self.goal);
        }
        record.broadcasts.push(mine);
    }
}

fn check_model(adv: &AdversaryConfig, want: AdversaryModel, n: usize) -> Result<()> {
    if adv.model != want {
        return invalid(format!("expected a {want} adversary, got {}", adv.model));
    }
    adv.validate(n)
}

/// Blind-guess accuracy when the notifier is uniform over all users and the
/// coalition always recognises itself.
pub fn blind_baseline(n: usize, corrupted: usize) -> f64 {
    ((corrupted + 1) as f64 / n as f64).min(1.0)
}

fn single_report(result: &SessionResult, adv: &AdversaryConfig) -> Result<LeakageReport> {
    let view = AdversaryView::observe(result, adv)?;
    let guess = semi_honest_guess(&view)?;
    Ok(LeakageReport {
        sessions: 1,
        notifier_correct: usize::from(guess.notifier == result.config.notifier),
        receiver_correct: usize::from(guess.receiver == result.config.receiver),
        baseline: blind_baseline(result.config.n, adv.corrupted.len()),
    })
}

pub fn poisoned_session_with(
    cfg: &SessionConfig,
    adv: &AdversaryConfig,
    sampler: &mut Sampler,
    rng: &mut RngStream,
) -> Result<(SessionResult, Poisoner)> {
    check_model(adv, AdversaryModel::RotationPoisoner, cfg.n)?;
    let mut p = Poisoner::new(adv);
    let res = run_session_with(cfg, &mut p, sampler, rng)?;
    Ok((res, p))
}

/// One session with rotation poisoners, plus what the poisoners learn about
/// the identities.
pub fn run_poisoned_session(
    cfg: &SessionConfig,
    adv: &AdversaryConfig,
    rng: &mut RngStream,
) -> Result<(SessionResult, LeakageReport)> {
    let (res, _) = poisoned_session_with(cfg, adv, &mut Sampler::new(cfg.backend), rng)?;
    let report = single_report(&res, adv)?;
    Ok((res, report))
}

pub fn last_speaker_session_with(
    cfg: &SessionConfig,
    adv: &AdversaryConfig,
    sampler: &mut Sampler,
    rng: &mut RngStream,
) -> Result<SessionResult> {
    check_model(adv, AdversaryModel::LastSpeaker, cfg.n)?;
    let mut ls = LastSpeaker {
        user: adv.corrupted[0],
        goal: adv.goal.parity(),
    };
    run_session_with(cfg, &mut ls, sampler, rng)
}

/// One session in which the first corrupted user speaks last and forges.
pub fn run_last_speaker_session(
    cfg: &SessionConfig,
    adv: &AdversaryConfig,
    rng: &mut RngStream,
) -> Result<(SessionResult, LeakageReport)> {
    let res = last_speaker_session_with(cfg, adv, &mut Sampler::new(cfg.backend), rng)?;
    let report = single_report(&res, adv)?;
    Ok((res, report))
}

/// Majority of the first `window` verdicts.
pub fn majority_vote(verdicts: &[bool], window: usize) -> Result<bool> {
    if window < 3 || window.is_multiple_of(2) {
        return invalid(format!("majority window must be odd and at least 3, got {window}"));
    }
    if verdicts.len() < window {
        return invalid(format!(
            "majority window {window} exceeds the {} available verdicts",
            verdicts.len()
        ));
    }
    Ok(verdicts[..window].iter().filter(|&&v| v).count() > window / 2)
}

/// Majority vote over the receiver's per-round verdicts of consecutive
/// sessions.
pub fn mitigation_majority_vote(sessions: &[SessionResult], window: usize) -> Result<bool> {
    let verdicts: Vec<bool> = sessions.iter().flat_map(|s| s.receiver_verdicts()).collect();
    majority_vote(&verdicts, window)
}
