use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Complex amplitude used throughout the simulator.
pub type ComplexAmp = Complex64;

pub(crate) const ZERO: ComplexAmp = Complex64::new(0.0, 0.0);
pub(crate) const ONE: ComplexAmp = Complex64::new(1.0, 0.0);
pub(crate) const I: ComplexAmp = Complex64::new(0.0, 1.0);

/// Tolerance for algebraic identities (unitarity, trace, Hermiticity).
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// A single-qubit unitary, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate1 {
    m: [[ComplexAmp; 2]; 2],
}

impl Gate1 {
    /// Wraps a 2×2 matrix, rejecting non-finite or non-unitary input.
    pub fn new(m: [[ComplexAmp; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("gate matrix has non-finite entries");
        }
        let g = Self { m };
        if !g.is_unitary(ALGEBRAIC_TOL) {
            return invalid("gate matrix is not unitary");
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self { m: [[h, h], [h, -h]] }
    }

    pub fn pauli_x() -> Self {
        Self {
            m: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            m: [[ZERO, -I], [I, ZERO]],
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// `R_z(θ) = exp(-iθZ/2) = diag(e^{-iθ/2}, e^{iθ/2})`.
    pub fn rz(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return invalid(format!("rotation angle must be finite, got {theta}"));
        }
        let half = 0.5 * theta;
        Ok(Self {
            m: [
                [Complex64::from_polar(1.0, -half), ZERO],
                [ZERO, Complex64::from_polar(1.0, half)],
            ],
        })
    }

    pub fn matrix(&self) -> [[ComplexAmp; 2]; 2] {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        let m = self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Gate1) -> Self {
        let (a, b) = (self.m, rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, out) in row.iter_mut().enumerate() {
                *out = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self { m }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.compose(&self.adjoint()).approx_eq(&Self::identity(), tol)
    }

    pub fn approx_eq(&self, other: &Gate1, tol: f64) -> bool {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&Self::identity(), 0.0)
    }
}

/// Builds `R_z(theta)`.
pub fn rz_gate(theta: f64) -> Result<Gate1> {
    Gate1::rz(theta)
}

pub fn hadamard_gate() -> Gate1 {
    Gate1::hadamard()
}

/// Single-qubit Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn gate(self) -> Gate1 {
        match self {
            Pauli::I => Gate1::identity(),
            Pauli::X => Gate1::pauli_x(),
            Pauli::Y => Gate1::pauli_y(),
            Pauli::Z => Gate1::pauli_z(),
        }
    }

    /// The 15 non-identity two-qubit Paulis, in `IX, IY, …, ZZ` order.
    pub fn two_qubit_non_identity() -> impl Iterator<Item = (Pauli, Pauli)> {
        Pauli::ALL
            .into_iter()
            .flat_map(|a| Pauli::ALL.into_iter().map(move |b| (a, b)))
            .filter(|&(a, b)| !(a == Pauli::I && b == Pauli::I))
    }
}
