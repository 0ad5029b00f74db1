mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use qan_core::qsim::{
    ghz_prepare, trajectory_run, BitString, Circuit, DensityState, Gate1, NoiseParams, Op,
    PureState, Sampler, Backend,
};
use qan_core::stats::total_variation;
use qan_core::RngStream;

/// GHZ_4 fidelity at p1 = 0.01, p2 = 0.02 from an independent dense-matrix
/// calculation (numpy Kronecker products, Kraus sums).
const GHZ4_FIDELITY: f64 = 0.9414349542083945;

fn random_gate(rng: &mut RngStream) -> Gate1 {
    let a = Gate1::rz(rng.uniform_in(-PI, PI)).unwrap();
    let b = Gate1::rz(rng.uniform_in(-PI, PI)).unwrap();
    match rng.index(4) {
        0 => a,
        1 => a.compose(&Gate1::hadamard()).compose(&b),
        2 => Gate1::hadamard().compose(&a).compose(&Gate1::pauli_y()),
        _ => b.compose(&Gate1::pauli_x()),
    }
}

fn random_op(n: usize, rng: &mut RngStream) -> Op {
    let q = rng.index(n);
    let other = |rng: &mut RngStream| (q + 1 + rng.index(n - 1)) % n;
    match rng.index(4) {
        0 => Op::Gate {
            qubit: q,
            gate: random_gate(rng),
        },
        1 => Op::Cx {
            control: q,
            target: other(rng),
        },
        2 => Op::Depolarize1 {
            qubit: q,
            p: rng.uniform(),
        },
        _ => Op::Depolarize2 {
            q1: q,
            q2: other(rng),
            p: rng.uniform(),
        },
    }
}

fn random_circuit(n: usize, len: usize, rng: &mut RngStream) -> Circuit {
    let mut c = Circuit::new(n).unwrap();
    for _ in 0..len {
        c.push(random_op(n, rng));
    }
    c
}

#[test]
fn ghz4_fidelity_matches_frozen_oracle_value() {
    let rho = ghz_prepare(4, &NoiseParams::new(0.01, 0.02).unwrap()).unwrap();
    let f = rho.fidelity_with_pure(&PureState::ghz(4).unwrap()).unwrap();
    assert!((f - GHZ4_FIDELITY).abs() < 1e-10, "fidelity {f}");
    assert!(f < 1.0 && f > 0.8);
    assert!((rho.trace().re - 1.0).abs() < 1e-10);

    let dense = common::run(&Circuit::ghz_preparation(4, &NoiseParams::DEFAULT).unwrap());
    let ket = common::ghz_ket(4);
    let mut dense_f = 0.0;
    for (i, a) in ket.iter().enumerate() {
        for (j, b) in ket.iter().enumerate() {
            dense_f += (a.conj() * dense[(i, j)] * b).re;
        }
    }
    assert!((dense_f - GHZ4_FIDELITY).abs() < 1e-12);
}

#[test]
fn noiseless_ghz_is_exact() {
    let ghz3 = ghz_prepare(3, &NoiseParams::NOISELESS).unwrap();
    let f = ghz3.fidelity_with_pure(&PureState::ghz(3).unwrap()).unwrap();
    assert!((f - 1.0).abs() < 1e-12);
    let bell = ghz_prepare(2, &NoiseParams::NOISELESS).unwrap();
    assert!((bell.trace().re - 1.0).abs() < 1e-12);
    let d = bell.outcome_distribution();
    assert!((d[0] - 0.5).abs() < 1e-12 && (d[3] - 0.5).abs() < 1e-12);
    assert!(ghz_prepare(1, &NoiseParams::NOISELESS).is_err());
    assert!(ghz_prepare(13, &NoiseParams::NOISELESS).is_err());
}

#[test]
fn library_matches_dense_oracle_on_random_circuits() {
    for seed in 0..60 {
        let mut rng = RngStream::new(seed, 0);
        let n = 1 + rng.index(4);
        let n = n.max(2);
        let c = random_circuit(n, 12, &mut rng);
        let lib = DensityState::run(&c).unwrap();
        let dense = common::run(&c);
        let err = common::max_abs_diff(lib.matrix(), &dense);
        assert!(err < 1e-10, "seed {seed}: deviation {err}");
    }
}

#[test]
fn full_strength_channels_give_maximally_mixed_marginals() {
    for seed in 0..40 {
        let mut rng = RngStream::new(seed, 1);
        let n = 3;
        let base = DensityState::run(&random_circuit(n, 10, &mut rng)).unwrap();

        let q = rng.index(n);
        let mut one = base.clone();
        one.depolarize1(q, 0.75).unwrap();
        let marginal = one.partial_trace_keep(&[q]).unwrap();
        let mixed = DensityState::maximally_mixed(1).unwrap();
        let err = common::max_abs_diff(
            marginal.matrix(),
            &nalgebra::DMatrix::from_row_slice(2, 2, mixed.matrix()),
        );
        assert!(err < 1e-9, "depolarize1: {err}");

        let q2 = (q + 1 + rng.index(n - 1)) % n;
        let mut two = base.clone();
        two.depolarize2(q, q2, 15.0 / 16.0).unwrap();
        let mut keep = [q, q2];
        keep.sort();
        let marginal = two.partial_trace_keep(&keep).unwrap();
        let mixed = DensityState::maximally_mixed(2).unwrap();
        let err = common::max_abs_diff(
            marginal.matrix(),
            &nalgebra::DMatrix::from_row_slice(4, 4, mixed.matrix()),
        );
        assert!(err < 1e-9, "depolarize2: {err}");
    }
}

#[test]
fn random_sequences_preserve_trace_hermiticity_positivity() {
    for seed in 0..1000u64 {
        let mut rng = RngStream::new(seed, 2);
        let n = 1 + rng.index(3);
        let n = n.max(2);
        let len = 1 + rng.index(20);
        let rho = DensityState::run(&random_circuit(n, len, &mut rng)).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-10, "seed {seed}");
        assert!(rho.trace().im.abs() < 1e-10);
        assert!(rho.hermiticity_error() < 1e-10, "seed {seed}");
        assert!(rho.min_eigenvalue() >= -1e-9, "seed {seed}");
        assert!(rho.validate().is_ok());
    }
}

#[test]
fn small_channel_value_on_ground_state() {
    let mut rho = DensityState::zero(1).unwrap();
    rho.depolarize1(0, 0.01).unwrap();
    let d = rho.outcome_distribution();
    assert!((d[0] - (1.0 - 0.02 / 3.0)).abs() < 1e-12);
    assert!((d[1] - 0.02 / 3.0).abs() < 1e-12);
}

#[test]
fn channel_argument_errors() {
    let mut rho = DensityState::zero(2).unwrap();
    assert!(rho.depolarize1(0, 1.1).is_err());
    assert!(rho.depolarize1(0, -0.1).is_err());
    assert!(rho.depolarize1(2, 0.1).is_err());
    assert!(rho.depolarize2(1, 1, 0.1).is_err());
    assert!(rho.depolarize2(0, 2, 0.1).is_err());
    assert!(rho.apply_gate1(5, &Gate1::hadamard(), &NoiseParams::NOISELESS).is_err());
    let mut same = rho.clone();
    same.depolarize1(0, 0.0).unwrap();
    same.depolarize2(0, 1, 0.0).unwrap();
    same.apply_gate1(1, &Gate1::identity(), &NoiseParams::NOISELESS).unwrap();
    assert_eq!(same, rho);
}

fn odd_mass(d: &[f64]) -> f64 {
    d.iter()
        .enumerate()
        .filter(|(i, _)| i.count_ones() % 2 == 1)
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn phase_parity_law() {
    for n in 2..=5 {
        for phi in [0.0, FRAC_PI_4, FRAC_PI_2, PI] {
            let mut rho = DensityState::from_pure(&PureState::ghz_with_phase(n, phi).unwrap());
            for q in 0..n {
                rho.apply_unitary1(q, &Gate1::hadamard()).unwrap();
            }
            let odd = odd_mass(&rho.outcome_distribution());
            let law = (phi / 2.0).sin().powi(2);
            assert!((odd - law).abs() < 1e-10, "n={n} phi={phi}: {odd} vs {law}");
        }
    }
}

#[test]
fn rz_rotations_compose_into_relative_phase() {
    for seed in 0..30 {
        let mut rng = RngStream::new(seed, 3);
        let n = 2 + rng.index(3);
        let thetas: Vec<f64> = (0..n).map(|_| rng.uniform_in(-2.0 * PI, 2.0 * PI)).collect();
        let mut rho = DensityState::from_pure(&PureState::ghz(n).unwrap());
        let mut psi = PureState::ghz(n).unwrap();
        for (q, &t) in thetas.iter().enumerate() {
            rho.apply_unitary1(q, &Gate1::rz(t).unwrap()).unwrap();
            psi.apply_gate1(q, &Gate1::rz(t).unwrap()).unwrap();
        }
        let expected =
            DensityState::from_pure(&PureState::ghz_with_phase(n, thetas.iter().sum()).unwrap());
        let err = rho
            .matrix()
            .iter()
            .zip(expected.matrix())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "seed {seed}: {err}");

        // Direct matrix product on the dense oracle.
        let mut c = Circuit::ghz_preparation(n, &NoiseParams::NOISELESS).unwrap();
        for (q, &t) in thetas.iter().enumerate() {
            c.gate(q, Gate1::rz(t).unwrap());
        }
        assert!(common::max_abs_diff(rho.matrix(), &common::run(&c)) < 1e-10);
        assert!((DensityState::from_pure(&psi).fidelity_with_pure(&psi).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn hadamard_examples() {
    let mut rho = DensityState::from_pure(&PureState::ghz(3).unwrap());
    for q in 0..3 {
        rho.apply_unitary1(q, &Gate1::hadamard()).unwrap();
    }
    let d = rho.outcome_distribution();
    for (i, p) in d.iter().enumerate() {
        let want = if i.count_ones() % 2 == 0 { 0.25 } else { 0.0 };
        assert!((p - want).abs() < 1e-12);
    }
    let mut rho = DensityState::from_pure(&PureState::ghz(4).unwrap());
    for q in 0..4 {
        rho.apply_unitary1(q, &Gate1::hadamard()).unwrap();
    }
    assert!(odd_mass(&rho.outcome_distribution()) < 1e-12);
    let hh = Gate1::hadamard().compose(&Gate1::hadamard());
    assert!(hh.approx_eq(&Gate1::identity(), 1e-12));
}

#[test]
fn measurement_examples() {
    let mut rng = RngStream::new(11, 0);
    let ghz = DensityState::from_pure(&PureState::ghz(3).unwrap());
    let shots = 10_000;
    let mut zeros = 0;
    for _ in 0..shots {
        let b = ghz.clone().measure_all(&mut rng).unwrap();
        assert!(b.value() == 0 || b.value() == 7);
        zeros += usize::from(b.value() == 0);
    }
    assert!((zeros as f64 / shots as f64 - 0.5).abs() < 0.02);

    let ket = PureState::basis("01".parse::<BitString>().unwrap()).unwrap();
    for _ in 0..20 {
        let b = DensityState::from_pure(&ket).measure_all(&mut rng).unwrap();
        assert_eq!(b.to_string(), "01");
    }
    let empty = Circuit::new(2).unwrap();
    for _ in 0..20 {
        assert_eq!(trajectory_run(&empty, &mut rng).unwrap().to_string(), "00");
    }
    let mixed = DensityState::maximally_mixed(2).unwrap();
    assert_eq!(mixed.outcome_distribution(), vec![0.25; 4]);
    let d = DensityState::from_pure(&PureState::ghz(3).unwrap()).outcome_distribution();
    assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    assert!((d[0] - 0.5).abs() < 1e-12 && (d[7] - 0.5).abs() < 1e-12);
}

/// Circuits used for cross-checking the two backends.
fn fixture_circuits() -> Vec<Circuit> {
    let noise = NoiseParams::DEFAULT;
    let heavy = NoiseParams::new(0.2, 0.3).unwrap();
    let mut out = vec![Circuit::ghz_preparation(3, &noise).unwrap()];

    let mut round = Circuit::ghz_preparation(4, &noise).unwrap();
    for q in 1..4 {
        round.noisy_gate(q, Gate1::rz(0.7 * q as f64).unwrap(), &noise);
    }
    round.noisy_gate(2, Gate1::rz(PI).unwrap(), &noise);
    for q in 0..4 {
        round.noisy_gate(q, Gate1::hadamard(), &noise);
    }
    out.push(round);

    let mut bell = Circuit::ghz_preparation(2, &heavy).unwrap();
    bell.noisy_gate(0, Gate1::hadamard(), &heavy);
    out.push(bell);

    let mut rng = RngStream::new(99, 0);
    for n in [2, 3, 4] {
        let mut c = Circuit::new(n).unwrap();
        for _ in 0..8 {
            let q = rng.index(n);
            c.noisy_gate(q, random_gate(&mut rng), &heavy);
            let t = (q + 1 + rng.index(n - 1)) % n;
            c.noisy_cx(q, t, &heavy);
        }
        out.push(c);
    }
    out
}

#[test]
fn trajectory_backend_matches_exact_diagonal() {
    let shots = 100_000u64;
    for (i, c) in fixture_circuits().iter().enumerate() {
        let exact = DensityState::run(c).unwrap().outcome_distribution();
        let mut counts = vec![0u64; exact.len()];
        for s in 0..shots {
            let mut rng = RngStream::new(2024 + i as u64, s);
            counts[trajectory_run(c, &mut rng).unwrap().index()] += 1;
        }
        let freq = qan_core::stats::frequencies(&counts);
        let tvd = total_variation(&exact, &freq);
        assert!(tvd < 0.02, "fixture {i}: TVD {tvd}");
    }
}

#[test]
fn noiseless_trajectory_equals_exact() {
    let mut c = Circuit::ghz_preparation(3, &NoiseParams::NOISELESS).unwrap();
    c.gate(1, Gate1::rz(0.3).unwrap()).gate(0, Gate1::hadamard());
    let exact = DensityState::run(&c).unwrap().outcome_distribution();
    let mut psi = PureState::zero(3).unwrap();
    for op in c.ops() {
        match *op {
            Op::Gate { qubit, gate } => psi.apply_gate1(qubit, &gate).unwrap(),
            Op::Cx { control, target } => psi.apply_cx(control, target).unwrap(),
            _ => unreachable!(),
        }
    }
    for (a, b) in exact.iter().zip(psi.probabilities()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn same_stream_reproduces_outcomes() {
    let c = &fixture_circuits()[1];
    for backend in [Backend::Exact, Backend::Trajectory] {
        let draw = |seed| {
            let mut rng = RngStream::new(seed, 5);
            let mut s = Sampler::new(backend);
            (0..200).map(|_| s.sample(c, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(1), draw(1));
        assert_ne!(draw(1), draw(2));
    }
}

#[test]
fn exact_sampler_rejects_large_registers() {
    let c = Circuit::ghz_preparation(9, &NoiseParams::NOISELESS).unwrap();
    let mut rng = RngStream::new(0, 0);
    assert!(Sampler::new(Backend::Exact).sample(&c, &mut rng).is_err());
    let b = Sampler::new(Backend::Trajectory).sample(&c, &mut rng).unwrap();
    assert!(b.value() == 0 || b.value() == (1 << 9) - 1);
}
