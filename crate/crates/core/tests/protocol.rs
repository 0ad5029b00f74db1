use qan_core::protocol::{
    anonymity_distribution, anonymity_exact, assign_ghz, broadcast, collect, detection_curve,
    false_positive_compare, false_positive_gap, round_distribution, run_round, run_round_baseline,
    run_round_modified, run_session, run_session_with, setup_session, AngleMode, DetectionGrid,
    GhzAssignment, GhzSetup, Honest, NoiseAccounting, Scope, SessionConfig, Variant,
};
use qan_core::qsim::{NoiseParams, Sampler};
use qan_core::shares::{generate_shares, AngleShareSet};
use qan_core::stats::{proportion_stderr, total_variation};
use qan_core::RngStream;

/// Per-round parity-1 probability of an idle n = 4 round at p1 = 0.01,
/// p2 = 0.02, from the independent dense-matrix calculation. The modified
/// value is the same for every distributor slot.
const IDLE_PARITY_MODIFIED: f64 = 0.0790427005652649;
const IDLE_PARITY_BASELINE: f64 = 0.08465546455772802;
/// Baseline with identity applications exempt from noise.
const IDLE_PARITY_EXEMPT: f64 = 0.06174520586384597;

fn odd_mass(d: &[f64]) -> f64 {
    d.iter()
        .enumerate()
        .filter(|(i, _)| i.count_ones() % 2 == 1)
        .map(|(_, p)| p)
        .sum()
}

fn setup(n: usize, distributor: usize, shares: AngleShareSet, rng: &mut RngStream) -> GhzSetup {
    GhzSetup {
        assignment: assign_ghz(n, distributor, rng).unwrap(),
        shares,
    }
}

fn detection_rate(cfg: &SessionConfig, sessions: u64, seed: u64) -> f64 {
    let hits = (0..sessions)
        .filter(|&t| run_session(cfg, &mut RngStream::new(seed, t)).unwrap().detected)
        .count();
    hits as f64 / sessions as f64
}

#[test]
fn three_user_worked_example() {
    // Alice (0) notifies Bob (1) over the state (|000> + |111>)/sqrt(2).
    let cfg = SessionConfig {
        n: 3,
        notifier: 0,
        receiver: 1,
        pz: 1.0,
        ..SessionConfig::default()
    };
    let mut rng = RngStream::new(1, 0);
    let res = run_session(&cfg, &mut rng).unwrap();
    assert!(res.detected);
    assert_eq!(res.detection_round, Some(0));
    let g = &res.records[0].ghz[0];
    assert_eq!(g.parity, 1);
    assert_eq!(g.user_bits.iter().fold(0, |a, b| a ^ b), 1);
    let idle = SessionConfig { pz: 0.0, ..cfg };
    assert!(!run_session(&idle, &mut rng).unwrap().detected);
}

#[test]
fn noiseless_round_examples() {
    let mut rng = RngStream::new(2, 0);
    for variant in Variant::ALL {
        for (pz, parity) in [(1.0, 1), (0.0, 0)] {
            let cfg = SessionConfig {
                pz,
                variant,
                ..SessionConfig::default()
            };
            for _ in 0..50 {
                let setups = setup_session(&cfg, &mut rng).unwrap();
                let rec = match variant {
                    Variant::Modified => run_round_modified(&cfg, &setups, &mut rng),
                    Variant::Baseline => run_round_baseline(&cfg, &setups, &mut rng),
                }
                .unwrap();
                assert_eq!(rec.ghz[0].parity, parity);
                assert_eq!(rec.ghz[0].announced_parity, parity);
                assert_eq!(rec.kick_applied, pz == 1.0);
            }
        }
    }
}

#[test]
fn random_shares_with_zero_sum_match_zero_shares() {
    let mut rng = RngStream::new(3, 0);
    for noise in [NoiseParams::NOISELESS, NoiseParams::DEFAULT] {
        let cfg = SessionConfig {
            noise,
            ..SessionConfig::default()
        };
        let assignment = assign_ghz(4, 0, &mut rng).unwrap();
        let zero = GhzSetup {
            assignment: assignment.clone(),
            shares: AngleShareSet::zero(4, 0, Some(0)).unwrap(),
        };
        for kick in [None, Some(assignment.slot_of(1))] {
            let reference = round_distribution(&cfg, &zero, kick).unwrap();
            for _ in 0..10 {
                let random = GhzSetup {
                    assignment: assignment.clone(),
                    shares: generate_shares(4, 0, 0.0, Some(0), &mut rng).unwrap(),
                };
                let d = round_distribution(&cfg, &random, kick).unwrap();
                let dev = d.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(dev < 1e-10, "deviation {dev}");
            }
        }
    }
}

#[test]
fn zero_noise_idle_rounds_have_even_parity() {
    for scope in [Scope::NotifierGhzOnly, Scope::AllGhz] {
        for angle_mode in [AngleMode::Zero, AngleMode::PerGhz] {
            for variant in Variant::ALL {
                let cfg = SessionConfig {
                    pz: 0.0,
                    k_rounds: 4,
                    scope,
                    angle_mode,
                    variant,
                    ..SessionConfig::default()
                };
                for t in 0..100 {
                    let res = run_session(&cfg, &mut RngStream::new(4, t)).unwrap();
                    assert!(res.records.iter().all(|r| r.ghz.iter().all(|g| g.parity == 0)));
                    assert!(!res.false_positive() && !res.detected);
                }
            }
        }
    }
}

#[test]
fn noiseless_detection_law() {
    let sessions = 10_000;
    for (pz, k, seed) in [(0.3, 3, 5), (0.45, 9, 6), (1.0, 1, 7), (0.1, 2, 8)] {
        let cfg = SessionConfig {
            pz,
            k_rounds: k,
            ..SessionConfig::default()
        };
        let rate = detection_rate(&cfg, sessions, seed);
        let law = 1.0 - (1.0 - pz).powi(k as i32);
        let se = proportion_stderr(law, sessions as usize);
        assert!((rate - law).abs() <= 3.0 * se + 1e-12, "pz={pz} K={k}: {rate} vs {law}");
    }
}

#[test]
fn detection_curve_is_monotone_in_k() {
    let grid = DetectionGrid {
        pz: vec![0.1, 0.45],
        k: (1..=6).collect(),
    };
    let pts = detection_curve(&SessionConfig::default(), &grid, 4000, 9).unwrap();
    assert_eq!(pts.len(), 12);
    for w in pts.windows(2).filter(|w| w[0].pz == w[1].pz) {
        let tol = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        assert!(w[1].prob + tol >= w[0].prob);
    }
    for p in &pts {
        assert!(p.stderr <= 0.5 / (p.trials as f64).sqrt() + 1e-15);
    }
    assert!(detection_curve(&SessionConfig::default(), &grid, 0, 9).is_err());
}

#[test]
fn detection_curve_is_independent_of_thread_count() {
    let grid = DetectionGrid {
        pz: vec![0.3],
        k: vec![1, 2, 3],
    };
    let cfg = SessionConfig::default();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| detection_curve(&cfg, &grid, 500, 10).unwrap());
    let parallel = detection_curve(&cfg, &grid, 500, 10).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn exact_anonymity_conditionals_are_identical() {
    for n in [3, 4, 5] {
        let cfg = SessionConfig {
            n,
            ..SessionConfig::default()
        };
        let dists = anonymity_exact(&cfg).unwrap();
        assert_eq!(dists.len(), n);
        let uniform = 1.0 / (1u64 << (n - 1)) as f64;
        for d in &dists {
            for (i, p) in d.iter().enumerate() {
                let want = if i.count_ones() % 2 == 1 { uniform } else { 0.0 };
                assert!((p - want).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn sampled_anonymity_distributions() {
    let cfg = SessionConfig::default();
    let rows = anonymity_distribution(&cfg, 1000, 11).unwrap();
    assert_eq!(rows.len(), 4 * 16);
    let per: Vec<Vec<f64>> = (0..4)
        .map(|f| rows.iter().filter(|r| r.flipper == f).map(|r| r.probability).collect())
        .collect();
    for d in &per {
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(odd_mass(d) > 1.0 - 1e-12);
    }
    for a in 0..4 {
        for b in a + 1..4 {
            assert!(total_variation(&per[a], &per[b]) < 0.08);
        }
    }
}

#[test]
fn broadcast_permutations_are_neutral_and_uniform() {
    let cfg = SessionConfig {
        scope: Scope::AllGhz,
        pz: 0.5,
        ..SessionConfig::default()
    };
    let mut rng = RngStream::new(12, 0);
    let setups = setup_session(&cfg, &mut rng).unwrap();
    let mut position_counts = vec![0usize; 4];
    let rounds = 10_000;
    for _ in 0..rounds {
        let mut rec = run_round(&cfg, 0, &setups, &mut Honest, &mut Sampler::default(), &mut rng)
            .unwrap();
        let before: Vec<u8> = rec.ghz.iter().map(|g| g.announced_parity).collect();
        assert!(rec.ghz.iter().all(|g| g.parity == g.announced_parity));
        broadcast(&mut rec, &mut rng);
        collect(&mut rec);
        let after: Vec<u8> = rec.ghz.iter().map(|g| g.announced_parity).collect();
        assert_eq!(before, after);
        let own = rec.broadcasts[2].entries.iter().position(|&(l, _)| l == 2).unwrap();
        position_counts[own] += 1;
    }
    for c in position_counts {
        assert!((c as f64 / rounds as f64 - 0.25).abs() < 0.02);
    }

    let single = SessionConfig::default();
    let setups = setup_session(&single, &mut rng).unwrap();
    let rec = run_round(&single, 0, &setups, &mut Honest, &mut Sampler::default(), &mut rng).unwrap();
    assert!(rec.broadcasts.iter().all(|b| b.permutation == vec![0]));
}

#[test]
fn variants_agree_without_noise() {
    let cfg = SessionConfig {
        pz: 0.3,
        k_rounds: 3,
        ..SessionConfig::default()
    };
    let base = SessionConfig {
        variant: Variant::Baseline,
        ..cfg.clone()
    };
    let a = detection_rate(&cfg, 5000, 13);
    let b = detection_rate(&base, 5000, 13);
    assert_eq!(a, b);

    let mut rng = RngStream::new(14, 0);
    let s = setup(4, 0, AngleShareSet::zero(4, 0, Some(0)).unwrap(), &mut rng);
    let r = s.assignment.slot_of(1);
    let dm = round_distribution(&cfg, &s, Some(r)).unwrap();
    let db = round_distribution(&base, &s, Some(r)).unwrap();
    assert!(total_variation(&dm, &db) < 1e-12);
}

#[test]
fn idle_parity_matches_frozen_oracle_values() {
    let noisy = SessionConfig {
        noise: NoiseParams::DEFAULT,
        ..SessionConfig::default()
    };
    for d in 0..4 {
        let s = GhzSetup {
            assignment: GhzAssignment::identity(4, d).unwrap(),
            shares: AngleShareSet::zero(4, d, Some(d)).unwrap(),
        };
        let modified = odd_mass(&round_distribution(&noisy, &s, None).unwrap());
        assert!((modified - IDLE_PARITY_MODIFIED).abs() < 1e-10, "slot {d}: {modified}");
        let base = SessionConfig {
            variant: Variant::Baseline,
            ..noisy.clone()
        };
        let baseline = odd_mass(&round_distribution(&base, &s, None).unwrap());
        assert!((baseline - IDLE_PARITY_BASELINE).abs() < 1e-10);

        // Exempting identities leaves the baseline with fewer noisy events.
        let exempt = SessionConfig {
            accounting: NoiseAccounting::ExemptIdentity,
            ..base
        };
        let exempt_q = odd_mass(&round_distribution(&exempt, &s, None).unwrap());
        assert!((exempt_q - IDLE_PARITY_EXEMPT).abs() < 1e-10);
    }
}

#[test]
fn false_positive_comparison_properties() {
    let cfg = SessionConfig {
        noise: NoiseParams::DEFAULT,
        ..SessionConfig::default()
    };
    let ks: Vec<usize> = (1..=9).collect();
    let trials = 10_000;
    let rows = false_positive_compare(&cfg, &ks, trials, 15).unwrap();
    assert_eq!(rows.len(), 18);
    for variant in Variant::ALL {
        let q = match variant {
            Variant::Modified => IDLE_PARITY_MODIFIED,
            Variant::Baseline => IDLE_PARITY_BASELINE,
        };
        let mine: Vec<_> = rows.iter().filter(|r| r.variant == variant).collect();
        for r in &mine {
            let law = 1.0 - (1.0 - q).powi(r.k as i32);
            let se = proportion_stderr(law, trials);
            assert!((r.fp_rate - law).abs() < 3.5 * se, "{variant} K={}: {}", r.k, r.fp_rate);
        }
        for w in mine.windows(2) {
            let tol = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
            assert!(w[1].fp_rate + tol >= w[0].fp_rate);
        }
    }
    for k in 3..=9 {
        assert!(false_positive_gap(&rows, k).unwrap() >= 0.0, "K={k}");
    }

    let clean = SessionConfig::default();
    let rows = false_positive_compare(&clean, &ks, 2000, 16).unwrap();
    assert!(rows.iter().all(|r| r.fp_rate == 0.0 && r.false_positives == 0));
}

#[test]
fn reused_shares_break_other_ghz_states() {
    let cfg = SessionConfig {
        scope: Scope::AllGhz,
        pz: 0.0,
        angle_mode: AngleMode::Reused,
        ..SessionConfig::default()
    };
    let flagged = (0..500)
        .filter(|&t| run_session(&cfg, &mut RngStream::new(17, t)).unwrap().false_positive())
        .count();
    assert!(flagged > 100, "{flagged}");
    let res = run_session(&cfg, &mut RngStream::new(17, 0)).unwrap();
    let notifier_ghz = res.records[0].outcome(cfg.notifier).unwrap();
    assert_eq!(notifier_ghz.parity, 0);
}

#[test]
fn session_detection_matches_records() {
    let cfg = SessionConfig {
        pz: 0.3,
        k_rounds: 5,
        scope: Scope::AllGhz,
        angle_mode: AngleMode::PerGhz,
        notifier: 2,
        receiver: 0,
        ..SessionConfig::default()
    };
    for t in 0..200 {
        let res = run_session(&cfg, &mut RngStream::new(18, t)).unwrap();
        let verdicts = res.receiver_verdicts();
        assert_eq!(res.detected, verdicts.iter().any(|&v| v));
        assert_eq!(res.detection_round, verdicts.iter().position(|&v| v));
        for r in &res.records {
            for g in &r.ghz {
                assert_eq!(g.parity, g.user_bits.iter().fold(0, |a, b| a ^ b));
                assert_eq!(g.kick_applied, r.kick_applied && g.ghz_index == 2);
            }
        }
        assert_eq!(res.receiver_slot(), res.setups[2].assignment.slot_of(0));
        assert!(!res.false_positive() && !res.false_notify());
        assert!(!res.missed());
    }
}

#[test]
fn config_and_setup_validation() {
    let bad = [
        SessionConfig { n: 1, ..SessionConfig::default() },
        SessionConfig { receiver: 0, ..SessionConfig::default() },
        SessionConfig { notifier: 4, ..SessionConfig::default() },
        SessionConfig { pz: 1.5, ..SessionConfig::default() },
        SessionConfig { k_rounds: 0, ..SessionConfig::default() },
        SessionConfig { delta: f64::NAN, ..SessionConfig::default() },
        SessionConfig { n: 9, ..SessionConfig::default() },
    ];
    for cfg in bad {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
    let cfg = SessionConfig::default();
    let mut rng = RngStream::new(19, 0);
    // Mask that does not exclude the distributor.
    let wrong = vec![setup(4, 0, AngleShareSet::zero(4, 0, None).unwrap(), &mut rng)];
    assert!(run_round_modified(&cfg, &wrong, &mut rng).is_err());
    // Wrong GHZ label for the scope.
    let wrong = vec![setup(4, 1, AngleShareSet::zero(4, 1, Some(1)).unwrap(), &mut rng)];
    assert!(run_round_modified(&cfg, &wrong, &mut rng).is_err());
    assert!(run_session_with(&cfg, &mut Honest, &mut Sampler::default(), &mut rng).is_ok());
}
