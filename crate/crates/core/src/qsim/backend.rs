use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::bits::BitString;
use super::circuit::Circuit;
use super::density::DensityState;
use super::pure::sample_index;
use super::trajectory::trajectory_run;
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// Largest register the exact backend accepts.
pub const EXACT_MAX_QUBITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Density-matrix evolution, then one draw from the exact diagonal.
    #[default]
    Exact,
    /// One Pauli trajectory per shot.
    Trajectory,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Trajectory => "trajectory",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "trajectory" => Ok(Backend::Trajectory),
            other => invalid(format!("unknown backend '{other}' (expected exact|trajectory)")),
        }
    }
}

/// Draws single-shot outcomes for circuits on a chosen backend.
///
/// The exact backend memoises each distinct circuit's outcome distribution,
/// so repeated protocol rounds with identical gate lists cost one draw each.
/// The cache never changes which uniform is consumed, so results are the same
/// with or without hits.
#[derive(Debug, Default)]
pub struct Sampler {
    backend: Backend,
    cache: HashMap<Vec<u64>, Arc<Vec<f64>>>,
}

impl Sampler {
    pub fn new(backend: Backend) -> Self {
        Self {
            backend,
            cache: HashMap::new(),
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Exact outcome distribution of `circuit`, memoised.
    pub fn distribution(&mut self, circuit: &Circuit) -> Result<Arc<Vec<f64>>> {
        if circuit.num_qubits() > EXACT_MAX_QUBITS {
            return invalid(format!(
                "exact backend supports at most {EXACT_MAX_QUBITS} qubits, got {}",
                circuit.num_qubits()
            ));
        }
        let key = circuit.fingerprint();
        if let Some(d) = self.cache.get(&key) {
            return Ok(Arc::clone(d));
        }
        let d = Arc::new(DensityState::run(circuit)?.outcome_distribution());
        // Bound memory when every round carries fresh random angles.
        if self.cache.len() >= 4096 {
            self.cache.clear();
        }
        self.cache.insert(key, Arc::clone(&d));
        Ok(d)
    }

    pub fn sample(&mut self, circuit: &Circuit, rng: &mut RngStream) -> Result<BitString> {
        match self.backend {
            Backend::Exact => {
                let d = self.distribution(circuit)?;
                Ok(BitString::from_index(sample_index(&d, rng), circuit.num_qubits()))
            }
            Backend::Trajectory => trajectory_run(circuit, rng),
        }
    }
}
