//! Small dense complex-matrix helpers shared by the dynamics modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// A dense operator on a finite Hilbert space.
pub type Operator = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// `|i⟩⟨j|` on a `dim`-level space.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> Operator {
    let mut m = Operator::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

pub fn identity(dim: usize) -> Operator {
    Operator::identity(dim, dim)
}

pub fn dagger(m: &Operator) -> Operator {
    m.adjoint()
}

pub fn trace(m: &Operator) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `tr(op ρ)`.
pub fn expectation(op: &Operator, rho: &Operator) -> Complex64 {
    let n = rho.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += op[(i, k)] * rho[(k, i)];
        }
    }
    acc
}

pub fn max_abs(m: &Operator) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &Operator) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Column-stacking vectorization: `vec(ρ)[i + n j] = ρ[i, j]`.
pub fn vectorize(m: &Operator) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &DVector<Complex64>, dim: usize) -> Operator {
    Operator::from_column_slice(dim, dim, v.as_slice())
}

pub(crate) fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
