use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Operator};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;

/// A Hermitian, unit-trace, positive semidefinite density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Operator,
}

impl DensityOperator {
    /// Validates the matrix against the density-operator invariants.
    pub fn new(matrix: Operator) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = DensityOperator { matrix };
        rho.check_invariants()?;
        Ok(rho)
    }

    /// `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        DensityOperator { matrix: linalg::ket_bra(dim, k, k) }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let n = psi.len();
        let m = Operator::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm2);
        Ok(DensityOperator { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator { matrix: linalg::identity(dim) / linalg::real(dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_matrix(self) -> Operator {
        self.matrix
    }

    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    /// `tr(op ρ)`.
    pub fn expectation(&self, op: &Operator) -> Complex64 {
        linalg::expectation(op, &self.matrix)
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.matrix)
    }

    pub fn trace_error(&self) -> f64 {
        (linalg::trace(&self.matrix) - linalg::ONE).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * linalg::real(0.5);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let h = self.hermiticity_error();
        if h >= HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {h:e})")));
        }
        let t = self.trace_error();
        if t >= TRACE_TOL {
            return Err(Error::InvalidState(format!("trace deviates from 1 by {t:e}")));
        }
        let e = self.min_eigenvalue();
        if e <= -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {e:e}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_states() {
        let mut m = linalg::ket_bra(2, 0, 0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityOperator::new(m).is_err());

        let m = linalg::ket_bra(2, 0, 0) * linalg::real(2.0);
        assert!(DensityOperator::new(m).is_err());

        // trace one, Hermitian, but eigenvalues 1.5 and -0.5
        let m = Operator::from_row_slice(
            2,
            2,
            &[linalg::real(0.5), linalg::real(1.0), linalg::real(1.0), linalg::real(0.5)],
        );
        assert!(DensityOperator::new(m).is_err());
    }

    #[test]
    fn pure_state_is_valid() {
        let psi = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let rho = DensityOperator::pure(&psi).unwrap();
        rho.check_invariants().unwrap();
        assert!((rho.population(1) - 0.5).abs() < 1e-15);
        assert!(rho.min_eigenvalue().abs() < 1e-12);
    }
}
