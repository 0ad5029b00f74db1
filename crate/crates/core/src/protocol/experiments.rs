//! Monte Carlo drivers behind the detection, anonymity and noise-comparison
//! experiments.
//!
//! Trial `t` of grid point `g` always uses stream index `g * trials + t`, so
//! results are identical whether trials run serially or in parallel.

use rayon::prelude::*;

use super::assignment::GhzAssignment;
use super::config::{SessionConfig, Variant};
use super::round::{round_circuit, slot_gates, GhzSetup};
use super::session::{run_session_with, setup_session};
use super::round::Honest;
use crate::error::{invalid, Result};
use crate::qsim::{Backend, BitString, Sampler};
use crate::rng::RngStream;
use crate::stats::proportion_stderr;

/// Runs `trials` independent jobs on streams `first_stream..first_stream+trials`.
pub fn monte_carlo<T, F>(
    backend: Backend,
    seed: u64,
    first_stream: u64,
    trials: usize,
    job: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut Sampler, &mut RngStream) -> Result<T> + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map_init(
            || Sampler::new(backend),
            |sampler, t| {
                let mut rng = RngStream::new(seed, first_stream + t);
                job(sampler, &mut rng)
            },
        )
        .collect()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionGrid {
    pub pz: Vec<f64>,
    pub k: Vec<usize>,
}

impl Default for DetectionGrid {
    /// `P_z ∈ {0.1, 0.3, 0.45}`, `K ∈ 1..=9`.
    fn default() -> Self {
        Self {
            pz: vec![0.1, 0.3, 0.45],
            k: (1..=9).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionPoint {
    pub pz: f64,
    pub k: usize,
    pub trials: usize,
    pub detections: usize,
    pub prob: f64,
    pub stderr: f64,
}

/// Estimated receiver detection probability over a `(P_z, K)` grid,
/// row-major with `P_z` outermost.
pub fn detection_curve(
    base: &SessionConfig,
    grid: &DetectionGrid,
    trials: usize,
    seed: u64,
) -> Result<Vec<DetectionPoint>> {
    check_trials(trials)?;
    let points: Vec<(f64, usize)> = grid
        .pz
        .iter()
        .flat_map(|&pz| grid.k.iter().map(move |&k| (pz, k)))
        .collect();
    points
        .iter()
        .enumerate()
        .map(|(g, &(pz, k))| {
            let cfg = SessionConfig {
                pz,
                k_rounds: k,
                ..base.clone()
            };
            cfg.validate()?;
            let hits = monte_carlo(cfg.backend, seed, (g * trials) as u64, trials, |s, rng| {
                Ok(run_session_with(&cfg, &mut Honest, s, rng)?.detected)
            })?;
            let detections = hits.iter().filter(|&&d| d).count();
            let prob = detections as f64 / trials as f64;
            Ok(DetectionPoint {
                pz,
                k,
                trials,
                detections,
                prob,
                stderr: proportion_stderr(prob, trials),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnonymityRow {
    pub flipper: usize,
    pub outcome: BitString,
    pub count: u64,
    pub probability: f64,
}

/// Circuit for the notifier's GHZ with the kick forced onto `flipper_slot`.
/// Slot `s` is held by user `s`.
fn flipper_setup(cfg: &SessionConfig, rng: &mut RngStream) -> Result<GhzSetup> {
    let single = SessionConfig {
        scope: super::config::Scope::NotifierGhzOnly,
        ..cfg.clone()
    };
    let mut setup = setup_session(&single, rng)?.remove(0);
    setup.assignment = GhzAssignment::identity(cfg.n, cfg.notifier)?;
    Ok(setup)
}

/// Exact outcome distribution (slot order) for each flipper slot.
pub fn anonymity_exact(base: &SessionConfig) -> Result<Vec<Vec<f64>>> {
    base.validate()?;
    let mut sampler = Sampler::new(Backend::Exact);
    let mut rng = RngStream::new(0, 0);
    (0..base.n)
        .map(|f| {
            let setup = flipper_setup(base, &mut rng)?;
            let gates = slot_gates(base, &setup, Some(f), None)?;
            let d = sampler.distribution(&round_circuit(base, &gates)?)?;
            Ok(d.as_ref().clone())
        })
        .collect()
}

/// Empirical outcome distribution for each flipper slot, `trials` shots each.
/// Rows are ordered by flipper, then outcome index.
pub fn anonymity_distribution(
    base: &SessionConfig,
    trials: usize,
    seed: u64,
) -> Result<Vec<AnonymityRow>> {
    check_trials(trials)?;
    base.validate()?;
    let dim = 1usize << base.n;
    let mut rows = Vec::with_capacity(base.n * dim);
    for f in 0..base.n {
        let shots = monte_carlo(base.backend, seed, (f * trials) as u64, trials, |s, rng| {
            let setup = flipper_setup(base, rng)?;
            let gates = slot_gates(base, &setup, Some(f), None)?;
            s.sample(&round_circuit(base, &gates)?, rng)
        })?;
        let mut counts = vec![0u64; dim];
        for b in shots {
            counts[b.index()] += 1;
        }
        for (i, &count) in counts.iter().enumerate() {
            rows.push(AnonymityRow {
                flipper: f,
                outcome: BitString::new(i as u64, base.n)?,
                count,
                probability: count as f64 / trials as f64,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FalsePositiveRow {
    pub variant: Variant,
    pub k: usize,
    pub trials: usize,
    pub false_positives: usize,
    pub fp_rate: f64,
    pub stderr: f64,
}

/// False-positive rate per variant and `K` with the notifier idle.
///
/// Both variants share stream indices for a given `K`, so the comparison
/// uses common random numbers.
pub fn false_positive_compare(
    base: &SessionConfig,
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<FalsePositiveRow>> {
    check_trials(trials)?;
    let mut rows = Vec::with_capacity(2 * ks.len());
    for variant in Variant::ALL {
        for (ki, &k) in ks.iter().enumerate() {
            let cfg = SessionConfig {
                pz: 0.0,
                k_rounds: k,
                variant,
                ..base.clone()
            };
            cfg.validate()?;
            let flags = monte_carlo(cfg.backend, seed, (ki * trials) as u64, trials, |s, rng| {
                Ok(run_session_with(&cfg, &mut Honest, s, rng)?.false_positive())
            })?;
            let false_positives = flags.iter().filter(|&&f| f).count();
            let fp_rate = false_positives as f64 / trials as f64;
            rows.push(FalsePositiveRow {
                variant,
                k,
                trials,
                false_positives,
                fp_rate,
                stderr: proportion_stderr(fp_rate, trials),
            });
        }
    }
    Ok(rows)
}

/// `baseline − modified` false-positive rate for `k`, if both rows exist.
pub fn false_positive_gap(rows: &[FalsePositiveRow], k: usize) -> Option<f64> {
    let rate = |v: Variant| rows.iter().find(|r| r.variant == v && r.k == k).map(|r| r.fp_rate);
    Some(rate(Variant::Baseline)? - rate(Variant::Modified)?)
}
