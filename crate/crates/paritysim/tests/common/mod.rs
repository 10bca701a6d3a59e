//! Independent dense-matrix route used to cross-check the simulator.
//!
//! Everything here is built from explicit 2^n x 2^n matrices and
//! bit-rule constructions, deliberately sharing no code with the
//! library's in-place amplitude kernels.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

pub type Matrix = Vec<Vec<Complex64>>;

fn zero_matrix(dim: usize) -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); dim]; dim]
}

pub fn identity(dim: usize) -> Matrix {
    let mut m = zero_matrix(dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matvec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let dim = a.len();
    let mut out = zero_matrix(dim);
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = zero_matrix(ra * rb);
    for (i, arow) in a.iter().enumerate() {
        for (j, aij) in arow.iter().enumerate() {
            for (k, brow) in b.iter().enumerate() {
                for (l, bkl) in brow.iter().enumerate() {
                    out[i * rb + k][j * rb + l] = aij * bkl;
                }
            }
        }
    }
    out
}

pub fn hadamard2() -> Matrix {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    vec![vec![s, s], vec![s, -s]]
}

pub fn pauli_x2() -> Matrix {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    vec![vec![o, l], vec![l, o]]
}

pub fn pauli_z2() -> Matrix {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    vec![vec![l, o], vec![o, -l]]
}

/// Embeds a single-qubit matrix at the given position (0 = most
/// significant amplitude-index bit) by Kronecker products.
pub fn embed_single(n: usize, position: usize, g: &Matrix) -> Matrix {
    let mut m = identity(1 << position);
    m = kron(&m, g);
    kron(&m, &identity(1 << (n - position - 1)))
}

fn bit_of(index: usize, n: usize, position: usize) -> usize {
    (index >> (n - 1 - position)) & 1
}

/// CNOT as a permutation matrix built from the bit rule.
pub fn cnot_matrix(n: usize, control: usize, target: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = zero_matrix(dim);
    for col in 0..dim {
        let row = if bit_of(col, n, control) == 1 {
            col ^ (1 << (n - 1 - target))
        } else {
            col
        };
        m[row][col] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Controlled-Z as a diagonal sign matrix.
pub fn cz_matrix(n: usize, a: usize, b: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = zero_matrix(dim);
    for col in 0..dim {
        let sign = if bit_of(col, n, a) == 1 && bit_of(col, n, b) == 1 {
            -1.0
        } else {
            1.0
        };
        m[col][col] = Complex64::new(sign, 0.0);
    }
    m
}

/// Controlled single-qubit gate built from the bit rule: when the control
/// bit is set, mix the two rows that differ in the target bit.
pub fn controlled_u_matrix(n: usize, control: usize, target: usize, u: &Matrix) -> Matrix {
    let dim = 1 << n;
    let tmask = 1 << (n - 1 - target);
    let mut m = zero_matrix(dim);
    for col in 0..dim {
        if bit_of(col, n, control) == 0 {
            m[col][col] = Complex64::new(1.0, 0.0);
        } else {
            let t = bit_of(col, n, target);
            m[col & !tmask][col] = u[0][t];
            m[col | tmask][col] = u[1][t];
        }
    }
    m
}

/// Phase rotation diag(e^{i phi}, e^{-i phi}).
pub fn zrot2(phi: f64) -> Matrix {
    let o = Complex64::new(0.0, 0.0);
    vec![
        vec![Complex64::from_polar(1.0, phi), o],
        vec![o, Complex64::from_polar(1.0, -phi)],
    ]
}

/// Projector onto the subspace where qubits a and b have the given joint
/// parity, as a diagonal indicator matrix.
pub fn parity_projector(n: usize, a: usize, b: usize, parity: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = zero_matrix(dim);
    for col in 0..dim {
        if bit_of(col, n, a) ^ bit_of(col, n, b) == parity {
            m[col][col] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// Projector onto qubit q reading `value` under a Z measurement.
pub fn z_projector(n: usize, q: usize, value: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = zero_matrix(dim);
    for col in 0..dim {
        if bit_of(col, n, q) == value {
            m[col][col] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Projects and renormalizes; returns the branch probability and state.
pub fn project(v: &[Complex64], projector: &Matrix) -> (f64, Vec<Complex64>) {
    let raw = matvec(projector, v);
    let p = norm_sqr(&raw);
    if p == 0.0 {
        return (0.0, raw);
    }
    let scale = 1.0 / p.sqrt();
    (p, raw.iter().map(|a| a * scale).collect())
}

pub fn max_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
