use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::mhz_to_angular;
use crate::error::{Error, Result};
use crate::linalg::{self, Operator};

/// A collapse operator `L` applied at `rate` (1/ns): contributes `rate·D[L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOperator {
    pub matrix: Operator,
    pub rate: f64,
}

impl CollapseOperator {
    pub fn new(matrix: Operator, rate: f64) -> Self {
        CollapseOperator { matrix, rate }
    }

    /// `√rate · L`, the operator a quantum jump applies.
    pub fn jump(&self) -> Operator {
        &self.matrix * linalg::real(self.rate.sqrt())
    }
}

/// Lindblad generator `L(ρ) = −i[H, ρ] + Σ_k r_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`.
///
/// The Hamiltonian is in rad/ns and rates in 1/ns. The column-stacked
/// superoperator is assembled once at construction.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    hamiltonian: Operator,
    collapse_ops: Vec<CollapseOperator>,
    effective_hamiltonian: Operator,
    superoperator: DMatrix<Complex64>,
}

const HAMILTONIAN_HERMITICITY_TOL: f64 = 1e-12;

impl LindbladGenerator {
    pub fn new(hamiltonian: Operator, collapse_ops: Vec<CollapseOperator>) -> Result<Self> {
        let n = hamiltonian.nrows();
        if n == 0 || hamiltonian.ncols() != n {
            return Err(Error::param("hamiltonian", "must be square and non-empty"));
        }
        let herr = linalg::hermiticity_error(&hamiltonian);
        if herr > HAMILTONIAN_HERMITICITY_TOL * linalg::max_abs(&hamiltonian).max(1.0) {
            return Err(Error::param("hamiltonian", format!("not Hermitian (deviation {herr:e})")));
        }
        for (k, op) in collapse_ops.iter().enumerate() {
            if !(op.rate >= 0.0) || !op.rate.is_finite() {
                return Err(Error::param(
                    &format!("collapse_ops[{k}].rate"),
                    format!("must be finite and non-negative, got {}", op.rate),
                ));
            }
            if op.matrix.nrows() != n || op.matrix.ncols() != n {
                return Err(Error::param(
                    &format!("collapse_ops[{k}].matrix"),
                    format!("dimension mismatch with {n}-level Hamiltonian"),
                ));
            }
        }

        let mut effective = hamiltonian.clone();
        for op in &collapse_ops {
            let ldl = op.matrix.adjoint() * &op.matrix;
            effective -= ldl * Complex64::new(0.0, 0.5 * op.rate);
        }

        let id = linalg::identity(n);
        let mut sup = id.kronecker(&(&effective * Complex64::new(0.0, -1.0)))
            + (effective.map(|z| z.conj()) * linalg::I).kronecker(&id);
        for op in &collapse_ops {
            let j = op.jump();
            sup += j.map(|z| z.conj()).kronecker(&j);
        }

        Ok(LindbladGenerator {
            hamiltonian,
            collapse_ops,
            effective_hamiltonian: effective,
            superoperator: sup,
        })
    }

    /// The generator with no Hamiltonian and no dissipation.
    pub fn zero(dim: usize) -> Self {
        LindbladGenerator::new(Operator::zeros(dim, dim), Vec::new()).expect("zero generator is valid")
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn collapse_ops(&self) -> &[CollapseOperator] {
        &self.collapse_ops
    }

    /// `H − (i/2) Σ r_k L_k†L_k`, the no-jump evolution operator.
    pub fn effective_hamiltonian(&self) -> &Operator {
        &self.effective_hamiltonian
    }

    /// Jump operator `√r_k L_k` of channel `k`.
    pub fn jump_operator(&self, k: usize) -> Operator {
        self.collapse_ops[k].jump()
    }

    pub fn superoperator(&self) -> &DMatrix<Complex64> {
        &self.superoperator
    }

    /// `L(ρ)` for an arbitrary (not necessarily physical) matrix.
    pub fn apply(&self, rho: &Operator) -> Operator {
        let v = &self.superoperator * linalg::vectorize(rho);
        linalg::unvectorize(&v, self.dim())
    }

    /// Same dissipators with `extra` added to the Hamiltonian.
    pub fn with_hamiltonian_term(&self, extra: &Operator) -> Result<Self> {
        LindbladGenerator::new(&self.hamiltonian + extra, self.collapse_ops.clone())
    }

    /// Same dynamics with one more collapse channel.
    pub fn with_collapse(&self, op: CollapseOperator) -> Result<Self> {
        let mut ops = self.collapse_ops.clone();
        ops.push(op);
        LindbladGenerator::new(self.hamiltonian.clone(), ops)
    }
}

/// Parameters of the driven two-level emitter, as ordinary frequencies in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    pub rabi_mhz: f64,
    pub detuning_mhz: f64,
    pub gamma0_mhz: f64,
    pub dephasing_mhz: f64,
    #[serde(default)]
    pub extra_decay_mhz: f64,
}

impl TwoLevelParams {
    pub fn generator(&self) -> Result<LindbladGenerator> {
        build_two_level_generator(
            self.rabi_mhz,
            self.detuning_mhz,
            self.gamma0_mhz,
            self.dephasing_mhz,
            self.extra_decay_mhz,
        )
    }

    /// Coherence decay rate `γ₀/2 + γ_φ` (MHz), including any extra decay.
    pub fn coherence_decay_mhz(&self) -> f64 {
        0.5 * (self.gamma0_mhz + self.extra_decay_mhz) + self.dephasing_mhz
    }

    /// Drive strength giving saturation parameter `s = Ω²/(γ₁γ₂)`.
    pub fn rabi_for_saturation(s: f64, gamma0_mhz: f64, dephasing_mhz: f64) -> f64 {
        (s * gamma0_mhz * (0.5 * gamma0_mhz + dephasing_mhz)).sqrt()
    }
}

/// Two-level basis: index 0 is `|g⟩`, index 1 is `|e⟩`.
pub const GROUND: usize = 0;
pub const EXCITED: usize = 1;

/// `σ₋ = |g⟩⟨e|`.
pub fn sigma_minus() -> Operator {
    linalg::ket_bra(2, GROUND, EXCITED)
}

/// `σ₊σ₋ = |e⟩⟨e|`.
pub fn excited_projector() -> Operator {
    linalg::ket_bra(2, EXCITED, EXCITED)
}

/// Rotating-frame two-level emitter.
///
/// `H = −δ|e⟩⟨e| + (Ω/2)(|e⟩⟨g| + |g⟩⟨e|)`, radiative decay `σ₋` at
/// `γ₀ + γ_extra`, and pure dephasing `√(2γ_φ)|e⟩⟨e|` so coherences decay at
/// `γ₀/2 + γ_φ`. Inputs are ordinary frequencies in MHz.
pub fn build_two_level_generator(
    rabi_frequency: f64,
    detuning: f64,
    gamma_0: f64,
    gamma_dephasing: f64,
    gamma_extra_decay: f64,
) -> Result<LindbladGenerator> {
    for (name, v) in [
        ("gamma_0", gamma_0),
        ("gamma_dephasing", gamma_dephasing),
        ("gamma_extra_decay", gamma_extra_decay),
    ] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("rate must be non-negative, got {v}")));
        }
    }
    if !rabi_frequency.is_finite() || !detuning.is_finite() {
        return Err(Error::param("rabi_frequency/detuning", "must be finite"));
    }
    let omega = mhz_to_angular(rabi_frequency);
    let delta = mhz_to_angular(detuning);

    let mut h = Operator::zeros(2, 2);
    h[(EXCITED, EXCITED)] = linalg::real(-delta);
    h[(EXCITED, GROUND)] = linalg::real(0.5 * omega);
    h[(GROUND, EXCITED)] = linalg::real(0.5 * omega);

    let mut ops = Vec::new();
    let decay = mhz_to_angular(gamma_0 + gamma_extra_decay);
    if decay > 0.0 {
        ops.push(CollapseOperator::new(sigma_minus(), decay));
    }
    let dephasing = mhz_to_angular(gamma_dephasing);
    if dephasing > 0.0 {
        ops.push(CollapseOperator::new(excited_projector(), 2.0 * dephasing));
    }
    LindbladGenerator::new(h, ops)
}
