use std::f64::consts::FRAC_1_SQRT_2;

use super::bits::BitString;
use super::gate::{ComplexAmp, Gate1, Pauli, ALGEBRAIC_TOL, ONE, ZERO};
use super::kernel;
use crate::error::{invalid, Result};
use crate::rng::RngStream;

pub const MAX_QUBITS: usize = 12;

/// A normalised `n`-qubit state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<ComplexAmp>,
}

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return invalid(format!("qubit count {n} outside 1..={MAX_QUBITS}"));
    }
    Ok(())
}

impl PureState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    /// Computational basis state for `bits` (qubit 0 first).
    pub fn basis(bits: BitString) -> Result<Self> {
        let mut s = Self::zero(bits.len())?;
        s.amps[0] = ZERO;
        s.amps[bits.index()] = ONE;
        Ok(s)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n: usize) -> Result<Self> {
        Self::ghz_with_phase(n, 0.0)
    }

    /// `(|0…0⟩ + e^{iφ}|1…1⟩)/√2`.
    pub fn ghz_with_phase(n: usize, phase: f64) -> Result<Self> {
        check_qubit_count(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ComplexAmp::new(FRAC_1_SQRT_2, 0.0);
        amps[(1 << n) - 1] = ComplexAmp::from_polar(FRAC_1_SQRT_2, phase);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<ComplexAmp>) -> Result<Self> {
        check_qubit_count(n)?;
        if amps.len() != 1 << n {
            return invalid(format!("expected {} amplitudes, got {}", 1 << n, amps.len()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return invalid("amplitudes must be finite");
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return invalid(format!("state norm {norm} is not 1"));
        }
        Ok(Self { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[ComplexAmp] {
        &self.amps
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n {
            return invalid(format!("qubit {qubit} out of range for {} qubits", self.n));
        }
        Ok(1 << (self.n - 1 - qubit))
    }

    pub fn apply_gate1(&mut self, qubit: usize, gate: &Gate1) -> Result<()> {
        let mask = self.mask(qubit)?;
        kernel::apply_1q(&mut self.amps, mask, &gate.matrix());
        Ok(())
    }

    pub fn apply_pauli(&mut self, qubit: usize, p: Pauli) -> Result<()> {
        if p == Pauli::I {
            return self.mask(qubit).map(|_| ());
        }
        self.apply_gate1(qubit, &p.gate())
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target {
            return invalid("CX control and target must differ");
        }
        let (c, t) = (self.mask(control)?, self.mask(target)?);
        kernel::apply_cx(&mut self.amps, c, t);
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities, indexed by [`BitString::index`].
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Samples a computational-basis outcome (single shot).
    pub fn measure_all(self, rng: &mut RngStream) -> BitString {
        let probs = self.probabilities();
        BitString::from_index(sample_index(&probs, rng), self.n)
    }
}

/// Inverse-CDF draw from an (approximately) normalised probability vector.
/// Consumes exactly one uniform.
pub(crate) fn sample_index(probs: &[f64], rng: &mut RngStream) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.uniform() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last_nonzero = i;
        if u < acc {
            return i;
        }
    }
    last_nonzero
}
