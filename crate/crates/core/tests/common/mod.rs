//! Dense reference simulator: full 2^n matrices built from Kronecker
//! products, channels applied as explicit Kraus sums. Shares no code with the
//! library's bit-mask kernels.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qan_core::qsim::{Circuit, Gate1, Op};

pub type Mat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn paulis() -> [Mat; 4] {
    [
        Mat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        Mat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        Mat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        Mat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    ]
}

pub fn gate_matrix(g: &Gate1) -> Mat {
    let m = g.matrix();
    Mat::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

/// `factors[q]` acts on qubit `q`; qubit 0 is the leftmost factor.
pub fn kron_all(factors: &[Mat]) -> Mat {
    factors
        .iter()
        .fold(Mat::from_element(1, 1, c(1., 0.)), |acc, f| acc.kronecker(f))
}

pub fn embed1(n: usize, q: usize, g: &Mat) -> Mat {
    let id = paulis()[0].clone();
    kron_all(&(0..n).map(|k| if k == q { g.clone() } else { id.clone() }).collect::<Vec<_>>())
}

pub fn embed2(n: usize, q1: usize, a: &Mat, q2: usize, b: &Mat) -> Mat {
    let id = paulis()[0].clone();
    kron_all(
        &(0..n)
            .map(|k| {
                if k == q1 {
                    a.clone()
                } else if k == q2 {
                    b.clone()
                } else {
                    id.clone()
                }
            })
            .collect::<Vec<_>>(),
    )
}

pub fn cx_matrix(n: usize, control: usize, target: usize) -> Mat {
    let d = 1 << n;
    let mut m = Mat::zeros(d, d);
    for i in 0..d {
        let bit = |q: usize| (i >> (n - 1 - q)) & 1;
        let j = if bit(control) == 1 { i ^ (1 << (n - 1 - target)) } else { i };
        m[(j, i)] = c(1., 0.);
    }
    m
}

pub fn kraus(rho: &Mat, ops: &[(f64, Mat)]) -> Mat {
    ops.iter()
        .map(|(w, k)| (k * rho * k.adjoint()) * c(*w, 0.))
        .fold(Mat::zeros(rho.nrows(), rho.ncols()), |a, b| a + b)
}

pub fn depolarize1(rho: &Mat, n: usize, q: usize, p: f64) -> Mat {
    let ps = paulis();
    let mut ops = vec![(1.0 - p, embed1(n, q, &ps[0]))];
    for pauli in &ps[1..] {
        ops.push((p / 3.0, embed1(n, q, pauli)));
    }
    kraus(rho, &ops)
}

pub fn depolarize2(rho: &Mat, n: usize, q1: usize, q2: usize, p: f64) -> Mat {
    let ps = paulis();
    let mut ops = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            let w = if a == 0 && b == 0 { 1.0 - p } else { p / 15.0 };
            ops.push((w, embed2(n, q1, &ps[a], q2, &ps[b])));
        }
    }
    kraus(rho, &ops)
}

pub fn zero_state(n: usize) -> Mat {
    let d = 1 << n;
    let mut m = Mat::zeros(d, d);
    m[(0, 0)] = c(1., 0.);
    m
}

pub fn run(circuit: &Circuit) -> Mat {
    let n = circuit.num_qubits();
    let mut rho = zero_state(n);
    for op in circuit.ops() {
        rho = match *op {
            Op::Gate { qubit, gate } => {
                let u = embed1(n, qubit, &gate_matrix(&gate));
                &u * &rho * u.adjoint()
            }
            Op::Cx { control, target } => {
                let u = cx_matrix(n, control, target);
                &u * &rho * u.adjoint()
            }
            Op::Depolarize1 { qubit, p } => depolarize1(&rho, n, qubit, p),
            Op::Depolarize2 { q1, q2, p } => depolarize2(&rho, n, q1, q2, p),
        };
    }
    rho
}

pub fn diagonal(rho: &Mat) -> Vec<f64> {
    (0..rho.nrows()).map(|i| rho[(i, i)].re).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &Mat) -> f64 {
    // `a` is row-major.
    let d = b.nrows();
    (0..d * d)
        .map(|k| (a[k] - b[(k / d, k % d)]).norm())
        .fold(0.0, f64::max)
}

pub fn ghz_ket(n: usize) -> Vec<Complex64> {
    let mut v = vec![c(0., 0.); 1 << n];
    v[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.);
    v[(1 << n) - 1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.);
    v
}
