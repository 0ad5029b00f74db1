//! Stochastic pure-state backend: every depolarizing channel is realised by
//! sampling one Pauli error with the channel's mixture weights.

use super::bits::BitString;
use super::circuit::{Circuit, Op};
use super::gate::Pauli;
use super::pure::PureState;
use crate::error::Result;
use crate::rng::RngStream;

/// Runs one trajectory of `circuit` and measures every qubit.
pub fn trajectory_run(circuit: &Circuit, rng: &mut RngStream) -> Result<BitString> {
    circuit.validate()?;
    let mut psi = PureState::zero(circuit.num_qubits())?;
    for op in circuit.ops() {
        match *op {
            Op::Gate { qubit, gate } => psi.apply_gate1(qubit, &gate)?,
            Op::Cx { control, target } => psi.apply_cx(control, target)?,
            Op::Depolarize1 { qubit, p } => {
                if rng.bernoulli(p) {
                    psi.apply_pauli(qubit, Pauli::NON_IDENTITY[rng.index(3)])?;
                }
            }
            Op::Depolarize2 { q1, q2, p } => {
                if rng.bernoulli(p) {
                    // Index 1..16 over the 4×4 Pauli grid skips II at 0.
                    let k = 1 + rng.index(15);
                    psi.apply_pauli(q1, Pauli::ALL[k / 4])?;
                    psi.apply_pauli(q2, Pauli::ALL[k % 4])?;
                }
            }
        }
    }
    Ok(psi.measure_all(rng))
}
