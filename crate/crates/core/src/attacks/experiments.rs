//! Batch drivers for the attack table.
//!
//! Row `i` uses stream indices `2i * trials + t` for its idle sessions
//! (`P_z = 0`) and `(2i + 1) * trials + t` for its active sessions.

use rayon::prelude::*;

use super::active::{blind_baseline, last_speaker_session_with, poisoned_session_with};
use super::config::{AdversaryConfig, AdversaryModel};
use super::view::{semi_honest_guess_with, AdversaryView, LeakageReport, LikelihoodModel};
use crate::error::{invalid, Result};
use crate::protocol::{monte_carlo, run_session_with, Honest, Scope, SessionConfig, SessionResult};
use crate::qsim::Sampler;
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct AttackRow {
    pub model: AdversaryModel,
    pub param: String,
    pub trials: usize,
    /// Idle sessions in which the receiver saw an announced parity 1.
    pub false_notify_rate: Option<f64>,
    /// Active sessions in which no kick reached the receiver.
    pub missed_rate: Option<f64>,
    pub guess_accuracy: Option<f64>,
}

fn rate(flags: &[bool]) -> f64 {
    flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    Ok(())
}

/// Runs idle and active batches of a session function and tabulates rates.
fn integrity_rates<F>(
    base: &SessionConfig,
    row: usize,
    trials: usize,
    seed: u64,
    session: F,
) -> Result<(f64, f64)>
where
    F: Fn(&SessionConfig, &mut Sampler, &mut RngStream) -> Result<SessionResult> + Sync,
{
    let idle = SessionConfig {
        pz: 0.0,
        ..base.clone()
    };
    idle.validate()?;
    base.validate()?;
    let fn_flags = monte_carlo(base.backend, seed, (2 * row * trials) as u64, trials, |s, rng| {
        Ok(session(&idle, s, rng)?.false_notify())
    })?;
    let miss_flags = monte_carlo(
        base.backend,
        seed,
        ((2 * row + 1) * trials) as u64,
        trials,
        |s, rng| Ok(session(base, s, rng)?.missed()),
    )?;
    Ok((rate(&fn_flags), rate(&miss_flags)))
}

/// One row per poisoning probability. Active sessions use `base.pz`.
pub fn poison_sweep(
    base: &SessionConfig,
    adv: &AdversaryConfig,
    probabilities: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<AttackRow>> {
    check_trials(trials)?;
    probabilities
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let adv = AdversaryConfig {
                poison_probability: p,
                ..adv.clone()
            };
            adv.validate(base.n)?;
            let (fnr, missed) = integrity_rates(base, i, trials, seed, |cfg, s, rng| {
                Ok(poisoned_session_with(cfg, &adv, s, rng)?.0)
            })?;
            Ok(AttackRow {
                model: AdversaryModel::RotationPoisoner,
                param: format!("{p}"),
                trials,
                false_notify_rate: Some(fnr),
                missed_rate: Some(missed),
                guess_accuracy: None,
            })
        })
        .collect()
}

/// Announced false-notify and missed rates under a forging last speaker.
pub fn last_speaker_attack(
    base: &SessionConfig,
    adv: &AdversaryConfig,
    trials: usize,
    seed: u64,
) -> Result<AttackRow> {
    check_trials(trials)?;
    adv.validate(base.n)?;
    let (fnr, missed) = integrity_rates(base, 0, trials, seed, |cfg, s, rng| {
        last_speaker_session_with(cfg, adv, s, rng)
    })?;
    Ok(AttackRow {
        model: AdversaryModel::LastSpeaker,
        param: adv.goal.to_string(),
        trials,
        false_notify_rate: Some(fnr),
        missed_rate: Some(missed),
        guess_accuracy: None,
    })
}

/// Honest sessions over every GHZ state with a uniformly drawn notifier and
/// receiver per session; the coalition in `adv` guesses both.
///
/// Rates come from the same sessions at `base.pz`: false notifications are
/// counted in rounds without a kick.
pub fn semi_honest_experiment(
    base: &SessionConfig,
    adv: &AdversaryConfig,
    trials: usize,
    seed: u64,
) -> Result<(AttackRow, LeakageReport)> {
    check_trials(trials)?;
    adv.validate(base.n)?;
    let n = base.n;
    let cfg = SessionConfig {
        scope: Scope::AllGhz,
        ..base.clone()
    };
    cfg.validate()?;
    let outcomes: Vec<(bool, bool, bool, bool)> = (0..trials as u64)
        .into_par_iter()
        .map_init(
            || (Sampler::new(cfg.backend), None::<LikelihoodModel>),
            |(sampler, model), t| {
                let mut rng = RngStream::new(seed, t);
                let notifier = rng.index(n);
                let receiver = (notifier + 1 + rng.index(n - 1)) % n;
                let cfg = SessionConfig {
                    notifier,
                    receiver,
                    ..cfg.clone()
                };
                let res = run_session_with(&cfg, &mut Honest, sampler, &mut rng)?;
                let view = AdversaryView::observe(&res, adv)?;
                let model = match model {
                    Some(m) => m,
                    None => model.insert(LikelihoodModel::new(&view.public)?),
                };
                let guess = semi_honest_guess_with(&view, model)?;
                Ok((
                    guess.notifier == notifier,
                    guess.receiver == receiver,
                    res.false_notify(),
                    res.missed(),
                ))
            },
        )
        .collect::<Result<_>>()?;
    let count = |f: fn(&(bool, bool, bool, bool)) -> bool| outcomes.iter().filter(|o| f(o)).count();
    let report = LeakageReport {
        sessions: trials,
        notifier_correct: count(|o| o.0),
        receiver_correct: count(|o| o.1),
        baseline: blind_baseline(n, adv.corrupted.len()),
    };
    let row = AttackRow {
        model: AdversaryModel::SemiHonestObserver,
        param: adv.corrupted.len().to_string(),
        trials,
        false_notify_rate: Some(count(|o| o.2) as f64 / trials as f64),
        missed_rate: Some(count(|o| o.3) as f64 / trials as f64),
        guess_accuracy: Some(report.guess_accuracy()),
    };
    Ok((row, report))
}
