use super::density::NoiseParams;
use super::gate::Gate1;
use super::pure::check_qubit_count;
use crate::error::{invalid, Result};

/// One step of a circuit. Noise is explicit so both backends see the same
/// channel placement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    Gate { qubit: usize, gate: Gate1 },
    Cx { control: usize, target: usize },
    Depolarize1 { qubit: usize, p: f64 },
    Depolarize2 { q1: usize, q2: usize, p: f64 },
}

/// An ordered list of gates and channels on `n` qubits starting from `|0…0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        Ok(Self { n, ops: Vec::new() })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn push(&mut self, op: Op) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn gate(&mut self, qubit: usize, gate: Gate1) -> &mut Self {
        self.push(Op::Gate { qubit, gate })
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Op::Cx { control, target })
    }

    /// Gate followed by single-qubit depolarizing noise (omitted when `p1 = 0`).
    pub fn noisy_gate(&mut self, qubit: usize, gate: Gate1, noise: &NoiseParams) -> &mut Self {
        self.gate(qubit, gate);
        if noise.p1 > 0.0 {
            self.push(Op::Depolarize1 { qubit, p: noise.p1 });
        }
        self
    }

    /// CX followed by two-qubit depolarizing noise (omitted when `p2 = 0`).
    pub fn noisy_cx(&mut self, control: usize, target: usize, noise: &NoiseParams) -> &mut Self {
        self.cx(control, target);
        if noise.p2 > 0.0 {
            self.push(Op::Depolarize2 {
                q1: control,
                q2: target,
                p: noise.p2,
            });
        }
        self
    }

    /// `H(0)` then `CX(0→k)` for `k = 1..n`, with gate-attached noise.
    pub fn ghz_preparation(n: usize, noise: &NoiseParams) -> Result<Self> {
        if n < 2 {
            return invalid(format!("GHZ preparation needs at least 2 qubits, got {n}"));
        }
        noise.validate()?;
        let mut c = Self::new(n)?;
        c.noisy_gate(0, Gate1::hadamard(), noise);
        for k in 1..n {
            c.noisy_cx(0, k, noise);
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |q: usize| -> Result<()> {
            if q >= self.n {
                return invalid(format!("circuit references qubit {q} on {} qubits", self.n));
            }
            Ok(())
        };
        let check_p = |p: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("channel probability {p} outside [0, 1]"));
            }
            Ok(())
        };
        for op in &self.ops {
            match *op {
                Op::Gate { qubit, .. } => check(qubit)?,
                Op::Cx { control, target } => {
                    check(control)?;
                    check(target)?;
                    if control == target {
                        return invalid("CX control equals target");
                    }
                }
                Op::Depolarize1 { qubit, p } => {
                    check(qubit)?;
                    check_p(p)?;
                }
                Op::Depolarize2 { q1, q2, p } => {
                    check(q1)?;
                    check(q2)?;
                    check_p(p)?;
                    if q1 == q2 {
                        return invalid("two-qubit channel on a single qubit");
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact structural key, used to memoise outcome distributions.
    pub(crate) fn fingerprint(&self) -> Vec<u64> {
        let mut key = Vec::with_capacity(1 + self.ops.len() * 9);
        key.push(self.n as u64);
        for op in &self.ops {
            match *op {
                Op::Gate { qubit, gate } => {
                    key.push(0);
                    key.push(qubit as u64);
                    for z in gate.matrix().iter().flatten() {
                        key.push(z.re.to_bits());
                        key.push(z.im.to_bits());
                    }
                }
                Op::Cx { control, target } => {
                    key.extend([1, control as u64, target as u64]);
                }
                Op::Depolarize1 { qubit, p } => key.extend([2, qubit as u64, p.to_bits()]),
                Op::Depolarize2 { q1, q2, p } => {
                    key.extend([3, q1 as u64, q2 as u64, p.to_bits()])
                }
            }
        }
        key
    }
}
