//! Exact mixed-state backend.
//!
//! The `2^n × 2^n` matrix is stored row-major as a single vector of length
//! `4^n`, which is the amplitude vector of a `2n`-qubit system whose high
//! bits index rows. Left multiplication by `G` acts on the row bits; right
//! multiplication by `G†` is `conj(G)` acting on the column bits.

use nalgebra::DMatrix;

use super::bits::BitString;
use super::circuit::{Circuit, Op};
use super::gate::{ComplexAmp, Gate1, Pauli, ALGEBRAIC_TOL, ONE, ZERO};
use super::kernel;
use super::pure::{check_qubit_count, sample_index, PureState};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// Eigenvalue floor accepted as "positive semidefinite".
pub const EIGEN_FLOOR: f64 = -1e-9;

/// Probability-drift threshold before [`DensityState::outcome_distribution`]
/// renormalises.
const DRIFT_TOL: f64 = 1e-12;

/// Depolarizing probabilities attached to single-qubit gates and CX gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseParams {
    pub const NOISELESS: NoiseParams = NoiseParams { p1: 0.0, p2: 0.0 };

    /// Single-qubit 0.01, two-qubit 0.02.
    pub const DEFAULT: NoiseParams = NoiseParams { p1: 0.01, p2: 0.02 };

    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let n = Self { p1, p2 };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.p1, "p1")?;
        check_probability(self.p2, "p2")
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub(crate) fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("{what} = {p} is not a probability in [0, 1]"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    n: usize,
    rho: Vec<ComplexAmp>,
}

impl DensityState {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let mut rho = vec![ZERO; dim * dim];
        rho[0] = ONE;
        Ok(Self { n, rho })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let mut rho = vec![ZERO; dim * dim];
        for i in 0..dim {
            rho[i * dim + i] = ComplexAmp::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n, rho })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let amps = psi.amplitudes();
        let dim = amps.len();
        let mut rho = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                rho[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Self {
            n: psi.num_qubits(),
            rho,
        }
    }

    /// Builds a state from a row-major matrix, validating trace, Hermiticity
    /// and positivity.
    pub fn from_matrix(n: usize, rho: Vec<ComplexAmp>) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        if rho.len() != dim * dim {
            return invalid(format!("expected {} entries, got {}", dim * dim, rho.len()));
        }
        let s = Self { n, rho };
        s.validate()?;
        Ok(s)
    }

    /// Runs `circuit` from `|0…0⟩`.
    pub fn run(circuit: &Circuit) -> Result<Self> {
        circuit.validate()?;
        let mut s = Self::zero(circuit.num_qubits())?;
        for op in circuit.ops() {
            s.apply_op(op)?;
        }
        Ok(s)
    }

    pub(crate) fn apply_op(&mut self, op: &Op) -> Result<()> {
        match *op {
            Op::Gate { qubit, gate } => self.apply_unitary1(qubit, &gate),
            Op::Cx { control, target } => self.apply_cx(control, target),
            Op::Depolarize1 { qubit, p } => self.depolarize1(qubit, p),
            Op::Depolarize2 { q1, q2, p } => self.depolarize2(q1, q2, p),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> ComplexAmp {
        self.rho[row * self.dim() + col]
    }

    pub fn matrix(&self) -> &[ComplexAmp] {
        &self.rho
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n {
            return invalid(format!("qubit {qubit} out of range for {} qubits", self.n));
        }
        Ok(())
    }

    fn row_mask(&self, qubit: usize) -> usize {
        1 << (2 * self.n - 1 - qubit)
    }

    fn col_mask(&self, qubit: usize) -> usize {
        1 << (self.n - 1 - qubit)
    }

    /// `ρ → GρG†` on one qubit, no noise.
    pub fn apply_unitary1(&mut self, qubit: usize, gate: &Gate1) -> Result<()> {
        self.check_qubit(qubit)?;
        let m = gate.matrix();
        let (rm, cm) = (self.row_mask(qubit), self.col_mask(qubit));
        kernel::apply_1q(&mut self.rho, rm, &m);
        kernel::apply_1q(&mut self.rho, cm, &kernel::conj_matrix(&m));
        Ok(())
    }

    /// Noisy single-qubit gate: `GρG†` followed by the depolarizing channel
    /// with probability `noise.p1` on the same qubit.
    pub fn apply_gate1(&mut self, qubit: usize, gate: &Gate1, noise: &NoiseParams) -> Result<()> {
        noise.validate()?;
        self.apply_unitary1(qubit, gate)?;
        self.depolarize1(qubit, noise.p1)
    }

    /// Noiseless CX.
    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return invalid("CX control and target must differ");
        }
        let (rc, rt) = (self.row_mask(control), self.row_mask(target));
        let (cc, ct) = (self.col_mask(control), self.col_mask(target));
        kernel::apply_cx(&mut self.rho, rc, rt);
        kernel::apply_cx(&mut self.rho, cc, ct);
        Ok(())
    }

    /// CX followed by the two-qubit depolarizing channel with `noise.p2`.
    pub fn apply_cx_noisy(&mut self, control: usize, target: usize, noise: &NoiseParams) -> Result<()> {
        noise.validate()?;
        self.apply_cx(control, target)?;
        self.depolarize2(control, target, noise.p2)
    }

    fn conjugated(&self, qubit: usize, p: Pauli) -> Self {
        let mut out = self.clone();
        if p != Pauli::I {
            // Paulis are their own inverse; qubit already validated.
            out.apply_unitary1(qubit, &p.gate()).expect("validated qubit");
        }
        out
    }

    fn mix_in(&mut self, keep: f64, terms: &[Self], weight: f64) {
        for (i, z) in self.rho.iter_mut().enumerate() {
            let sum: ComplexAmp = terms.iter().map(|t| t.rho[i]).sum();
            *z = *z * keep + sum * weight;
        }
    }

    /// `(1−p)ρ + (p/3)(XρX† + YρY† + ZρZ†)` on `qubit`.
    pub fn depolarize1(&mut self, qubit: usize, p: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        check_probability(p, "depolarizing probability")?;
        if p == 0.0 {
            return Ok(());
        }
        let terms: Vec<Self> = Pauli::NON_IDENTITY
            .into_iter()
            .map(|pauli| self.conjugated(qubit, pauli))
            .collect();
        self.mix_in(1.0 - p, &terms, p / 3.0);
        Ok(())
    }

    /// `(1−p)ρ + (p/15) Σ P_i ρ P_i†` over the 15 non-identity Paulis on
    /// `(q1, q2)`.
    pub fn depolarize2(&mut self, q1: usize, q2: usize, p: f64) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return invalid("two-qubit channel needs distinct qubits");
        }
        check_probability(p, "depolarizing probability")?;
        if p == 0.0 {
            return Ok(());
        }
        let mut terms = Vec::with_capacity(15);
        for a in Pauli::ALL {
            let first = self.conjugated(q1, a);
            for b in Pauli::ALL {
                if a == Pauli::I && b == Pauli::I {
                    continue;
                }
                terms.push(first.conjugated(q2, b));
            }
        }
        self.mix_in(1.0 - p, &terms, p / 15.0);
        Ok(())
    }

    pub fn trace(&self) -> ComplexAmp {
        let dim = self.dim();
        (0..dim).map(|i| self.rho[i * dim + i]).sum()
    }

    /// Largest elementwise deviation `|ρ_rc − conj(ρ_cr)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.rho[r * dim + c] - self.rho[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            // Symmetrise away round-off so the Hermitian solver sees exact input.
            (self.rho[r * dim + c] + self.rho[c * dim + r].conj()) * 0.5
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Checks finiteness, unit trace, Hermiticity and the eigenvalue floor.
    pub fn validate(&self) -> Result<()> {
        if self.rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("density matrix has non-finite entries".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > ALGEBRAIC_TOL || tr.im.abs() > ALGEBRAIC_TOL {
            return Err(Error::Numerical(format!("trace {tr} is not 1")));
        }
        let herm = self.hermiticity_error();
        if herm > ALGEBRAIC_TOL {
            return Err(Error::Numerical(format!("not Hermitian (error {herm:e})")));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < EIGEN_FLOOR {
            return Err(Error::Numerical(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if psi.num_qubits() != self.n {
            return invalid("qubit count mismatch");
        }
        let a = psi.amplitudes();
        let dim = self.dim();
        let mut acc = ZERO;
        for r in 0..dim {
            if a[r] == ZERO {
                continue;
            }
            for c in 0..dim {
                acc += a[r].conj() * self.rho[r * dim + c] * a[c];
            }
        }
        Ok(acc.re)
    }

    /// Reduced state on a subset of qubits (kept in ascending order).
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return invalid("must keep at least one qubit");
        }
        for &q in &keep {
            self.check_qubit(q)?;
        }
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let kdim = 1usize << k;
        let dim = self.dim();
        let compose = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                if kept_bits >> (k - 1 - pos) & 1 == 1 {
                    idx |= 1 << (self.n - 1 - q);
                }
            }
            for (pos, &q) in traced.iter().enumerate() {
                if traced_bits >> (traced.len() - 1 - pos) & 1 == 1 {
                    idx |= 1 << (self.n - 1 - q);
                }
            }
            idx
        };
        let mut out = vec![ZERO; kdim * kdim];
        for r in 0..kdim {
            for c in 0..kdim {
                let mut acc = ZERO;
                for t in 0..(1usize << traced.len()) {
                    acc += self.rho[compose(r, t) * dim + compose(c, t)];
                }
                out[r * kdim + c] = acc;
            }
        }
        Ok(Self { n: k, rho: out })
    }

    /// Diagonal of `ρ` as a probability vector, clipped at zero and
    /// renormalised if it drifted more than `1e-12` from unit sum.
    pub fn outcome_distribution(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut probs: Vec<f64> = (0..dim).map(|i| self.rho[i * dim + i].re.max(0.0)).collect();
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > DRIFT_TOL && total > 0.0 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        probs
    }

    /// Single-shot computational-basis measurement; consumes the state.
    pub fn measure_all(self, rng: &mut RngStream) -> Result<BitString> {
        let dim = self.dim();
        if let Some(i) = (0..dim).find(|&i| self.rho[i * dim + i].re < EIGEN_FLOOR) {
            return Err(Error::Numerical(format!(
                "diagonal entry {i} is negative ({:e})",
                self.rho[i * dim + i].re
            )));
        }
        let probs = self.outcome_distribution();
        Ok(BitString::from_index(sample_index(&probs, rng), self.n))
    }
}

/// Prepares an `n`-qubit GHZ state with `H(0)` followed by the CX fan-out
/// `0→1, 0→2, …, 0→n−1`, each gate followed by its depolarizing channel.
pub fn ghz_prepare(n: usize, noise: &NoiseParams) -> Result<DensityState> {
    if !(2..=super::pure::MAX_QUBITS).contains(&n) {
        return invalid(format!("GHZ preparation needs 2..=12 qubits, got {n}"));
    }
    noise.validate()?;
    DensityState::run(&Circuit::ghz_preparation(n, noise)?)
}
