//! Small-register quantum simulation: gates, depolarizing channels, an exact
//! density-matrix backend and a Pauli-trajectory sampling backend.

mod backend;
mod bits;
mod circuit;
mod density;
mod gate;
mod kernel;
mod pure;
mod trajectory;

pub use backend::{Backend, Sampler, EXACT_MAX_QUBITS};
pub use bits::{index_parity, BitString};
pub use circuit::{Circuit, Op};
pub use density::{ghz_prepare, DensityState, NoiseParams, EIGEN_FLOOR};
pub use gate::{hadamard_gate, rz_gate, ComplexAmp, Gate1, Pauli, ALGEBRAIC_TOL};
pub use pure::{PureState, MAX_QUBITS};
pub use trajectory::trajectory_run;

/// Free-function form of [`DensityState::apply_gate1`].
pub fn apply_gate1(
    mut state: DensityState,
    qubit: usize,
    gate: &Gate1,
    noise: &NoiseParams,
) -> crate::Result<DensityState> {
    state.apply_gate1(qubit, gate, noise)?;
    Ok(state)
}

pub fn depolarize1(mut state: DensityState, qubit: usize, p: f64) -> crate::Result<DensityState> {
    state.depolarize1(qubit, p)?;
    Ok(state)
}

pub fn depolarize2(
    mut state: DensityState,
    q1: usize,
    q2: usize,
    p: f64,
) -> crate::Result<DensityState> {
    state.depolarize2(q1, q2, p)?;
    Ok(state)
}

pub fn measure_all(state: DensityState, rng: &mut crate::RngStream) -> crate::Result<BitString> {
    state.measure_all(rng)
}

pub fn outcome_distribution(state: &DensityState) -> Vec<f64> {
    state.outcome_distribution()
}
