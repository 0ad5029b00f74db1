use std::f64::consts::TAU;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qan_core::attacks::{
    forge_bit, last_speaker_attack, poison_sweep, semi_honest_experiment, AdversaryConfig,
    AdversaryModel, AttackRow,
};
use qan_core::protocol::{
    anonymity_distribution, anonymity_exact, detection_curve, false_positive_compare,
    false_positive_gap, DetectionGrid, SessionConfig,
};
use qan_core::qsim::{ghz_prepare, DensityState, NoiseParams, PureState};
use qan_core::quanet::{run_all_modes, Mode, PayloadClass, ScenarioConfig};

use crate::format::{num, opt, Table};
use crate::{require_seed, Command, Common};

/// The fidelity of a four-qubit GHZ preparation at `p1 = 0.01, p2 = 0.02`,
/// from an independent dense-matrix calculation.
const GHZ4_FIDELITY: f64 = 0.9414349542083945;

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn base_config(c: &Common, default_noise: NoiseParams) -> Result<SessionConfig> {
    let noise = NoiseParams::new(
        c.p1.unwrap_or(default_noise.p1),
        c.p2.unwrap_or(default_noise.p2),
    )?;
    let cfg = SessionConfig {
        n: c.n,
        noise,
        backend: c.backend,
        ..SessionConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn trials(c: &Common, default: u64) -> usize {
    c.trials.unwrap_or(default) as usize
}

/// Runs a subcommand; `Ok(false)` means it completed with failed checks.
pub fn run(command: Command) -> Result<bool> {
    match command {
        Command::Detect {
            common,
            pz,
            kmax,
            delta,
        } => {
            let seed = require_seed(common.seed);
            if kmax == 0 {
                bail!("--kmax must be at least 1");
            }
            let cfg = SessionConfig {
                delta,
                ..base_config(&common, NoiseParams::NOISELESS)?
            };
            let grid = DetectionGrid {
                pz,
                k: (1..=kmax).collect(),
            };
            let points = detection_curve(&cfg, &grid, trials(&common, 10_000), seed)?;
            let mut t = Table::new(&["pz", "k", "trials", "detections", "prob", "stderr"]);
            for p in points {
                t.row(&[
                    num(p.pz),
                    p.k.to_string(),
                    p.trials.to_string(),
                    p.detections.to_string(),
                    num(p.prob),
                    num(p.stderr),
                ]);
            }
            write_output(common.out.as_deref(), &t.into_string())?;
        }
        Command::Anonymity { common } => {
            let seed = require_seed(common.seed);
            let cfg = base_config(&common, NoiseParams::NOISELESS)?;
            let rows = anonymity_distribution(&cfg, trials(&common, 1000), seed)?;
            let mut t = Table::new(&["flipper_index", "outcome", "probability"]);
            for r in rows {
                t.row(&[r.flipper.to_string(), r.outcome.to_string(), num(r.probability)]);
            }
            write_output(common.out.as_deref(), &t.into_string())?;
        }
        Command::Compare {
            common,
            kmax,
            accounting,
        } => {
            let seed = require_seed(common.seed);
            if kmax == 0 {
                bail!("--kmax must be at least 1");
            }
            let cfg = SessionConfig {
                accounting,
                ..base_config(&common, NoiseParams::DEFAULT)?
            };
            let ks: Vec<usize> = (1..=kmax).collect();
            let rows = false_positive_compare(&cfg, &ks, trials(&common, 10_000), seed)?;
            let mut t = Table::new(&[
                "variant",
                "k",
                "trials",
                "false_positives",
                "fp_rate",
                "stderr",
                "gap",
                "accounting",
            ]);
            for r in &rows {
                t.row(&[
                    r.variant.to_string(),
                    r.k.to_string(),
                    r.trials.to_string(),
                    r.false_positives.to_string(),
                    num(r.fp_rate),
                    num(r.stderr),
                    opt(false_positive_gap(&rows, r.k)),
                    accounting.to_string(),
                ]);
            }
            write_output(common.out.as_deref(), &t.into_string())?;
        }
        Command::Attack {
            common,
            model,
            prob,
            goal,
            corrupted,
            angle,
            k,
            pz,
        } => {
            let seed = require_seed(common.seed);
            let cfg = SessionConfig {
                k_rounds: k,
                pz,
                ..base_config(&common, NoiseParams::NOISELESS)?
            };
            cfg.validate()?;
            let n = cfg.n;
            let corrupted = corrupted.unwrap_or_else(|| match model {
                AdversaryModel::SemiHonestObserver => Vec::new(),
                _ => vec![n - 1],
            });
            let range = match angle.as_deref() {
                Some([lo, hi]) => (*lo, *hi),
                _ => (0.0, TAU),
            };
            let mut adv = AdversaryConfig::new(model, corrupted);
            adv.poison_angle_range = range;
            adv.goal = goal;
            let trials = trials(&common, 10_000);
            let rows: Vec<AttackRow> = match model {
                AdversaryModel::RotationPoisoner => poison_sweep(&cfg, &adv, &prob, trials, seed)?,
                AdversaryModel::LastSpeaker => vec![last_speaker_attack(&cfg, &adv, trials, seed)?],
                AdversaryModel::SemiHonestObserver => {
                    vec![semi_honest_experiment(&cfg, &adv, trials, seed)?.0]
                }
            };
            let mut t = Table::new(&[
                "model",
                "param",
                "trials",
                "false_notify_rate",
                "missed_rate",
                "guess_accuracy",
            ]);
            for r in rows {
                t.row(&[
                    r.model.to_string(),
                    r.param,
                    r.trials.to_string(),
                    opt(r.false_notify_rate),
                    opt(r.missed_rate),
                    opt(r.guess_accuracy),
                ]);
            }
            write_output(common.out.as_deref(), &t.into_string())?;
        }
        Command::Quanet { config, seed, out } => {
            let seed = require_seed(seed);
            let cfg = ScenarioConfig::from_path(&config)?;
            let metrics = run_all_modes(&cfg, seed)?;
            let mut t = Table::new(&[
                "mode",
                "class",
                "sent",
                "delivered",
                "dropped",
                "delayed",
                "mean_latency",
                "inference_accuracy",
                "failed",
                "chance_accuracy",
            ]);
            for m in &metrics {
                for c in &m.classes {
                    let private = c.class == PayloadClass::Private;
                    t.row(&[
                        m.mode.to_string(),
                        c.class.name().to_string(),
                        c.sent.to_string(),
                        c.delivered.to_string(),
                        c.dropped.to_string(),
                        c.delayed.to_string(),
                        opt(c.mean_latency),
                        opt(m.inference_accuracy.filter(|_| private)),
                        c.failed.to_string(),
                        opt(m.chance.filter(|_| private)),
                    ]);
                }
            }
            write_output(out.as_deref(), &t.into_string())?;
        }
        Command::Selftest { seed, out } => {
            let checks = selftest(seed)?;
            let ok = checks.iter().all(|c| c.1);
            let mut t = Table::new(&["check", "result", "detail"]);
            for (name, pass, detail) in checks {
                t.row(&[name.into(), if pass { "pass" } else { "fail" }.into(), detail]);
            }
            write_output(out.as_deref(), &t.into_string())?;
            return Ok(ok);
        }
    }
    Ok(true)
}

type Check = (&'static str, bool, String);

fn selftest(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let f = ghz_prepare(4, &NoiseParams::DEFAULT)?.fidelity_with_pure(&PureState::ghz(4)?)?;
    checks.push((
        "ghz4_fidelity",
        (f - GHZ4_FIDELITY).abs() < 1e-10,
        format!("{f:.15}"),
    ));

    let mut rho = DensityState::zero(1)?;
    rho.depolarize1(0, 0.75)?;
    let mixed = DensityState::maximally_mixed(1)?;
    let dev = rho
        .matrix()
        .iter()
        .zip(mixed.matrix())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    checks.push(("depolarize_fixed_point", dev < 1e-9, format!("{dev:.3e}")));

    let cfg = SessionConfig::default();
    let grid = DetectionGrid {
        pz: vec![0.45],
        k: vec![3],
    };
    let p = detection_curve(&cfg, &grid, 4000, seed)?[0].prob;
    let law = 1.0 - 0.55f64.powi(3);
    checks.push(("detection_law", (p - law).abs() < 0.03, format!("{p:.4} vs {law:.4}")));

    let dists = anonymity_exact(&cfg)?;
    let spread = dists
        .iter()
        .flat_map(|d| d.iter().zip(&dists[0]).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    checks.push(("anonymity_exact", spread < 1e-10, format!("{spread:.3e}")));

    let forged = (0..=3usize).all(|others| {
        (0u32..1 << others).all(|bits| {
            let v: Vec<u8> = (0..others).map(|i| ((bits >> i) & 1) as u8).collect();
            [0u8, 1].iter().all(|&g| v.iter().fold(forge_bit(&v, g), |a, b| a ^ b) == g)
        })
    });
    checks.push(("forge_bit", forged, String::new()));

    let scenario = ScenarioConfig::from_toml_str(SELFTEST_SCENARIO)?;
    let metrics = run_all_modes(&scenario, seed)?;
    let delivered = |mode: Mode| {
        metrics
            .iter()
            .find(|m| m.mode == mode)
            .map_or(usize::MAX, |m| m.class(PayloadClass::Private).delivered)
    };
    let (flagged, bypass) = (delivered(Mode::FlaggedHeaders), delivered(Mode::QanBypass));
    checks.push((
        "bypass_delivery",
        flagged == 0 && bypass == 20,
        format!("flagged {flagged}, bypass {bypass}"),
    ));
    Ok(checks)
}

const SELFTEST_SCENARIO: &str = r#"
[topology]
hosts = ["a", "b"]
gateway = "g"
[[topology.switch]]
name = "s"
honest = false
drop_rate = 1.0
[[topology.flow]]
src = "a"
dst = "b"
path = ["s"]
[classifier]
private_markers = ["secret"]
[traffic]
[[traffic.message]]
src = "a"
dst = "b"
text = "secret"
count = 20
[mode]
run = ["flagged-headers", "qan-bypass"]
qan_success_probability = 1.0
"#;
