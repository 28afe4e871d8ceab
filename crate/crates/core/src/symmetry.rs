//! Symmetries (`J = J* = J⁻¹`) and the three relations they can satisfy
//! against an idempotent `P`:
//!
//! * `JPJ = I − P` (membership in Γ_P),
//! * `JPJ = I − P*` (membership in Δ_P),
//! * `JP ≥ 0` (a positive pair).
//!
//! Relation residuals are normalized by `(1 + ‖P‖)(1 + ‖J‖)`.

use bitflags::bitflags;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::idempotent::Idempotent;
use crate::linalg::{
    adjoint, dist, hermitian_eigen, identity, is_square, op_norm, symmetrize, ComplexMatrix,
    ToleranceConfig,
};

bitflags! {
    /// Relations a [`Symmetry`] has been checked against for the idempotent it
    /// was built from.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
    pub struct Certified: u8 {
        const GAMMA = 0b001;
        const DELTA = 0b010;
        const POSITIVE = 0b100;
    }
}

/// A validated self-adjoint unitary.
#[derive(Debug, Clone)]
pub struct Symmetry {
    matrix: ComplexMatrix,
    certified: Certified,
}

/// `max(‖J − J*‖, ‖J² − I‖)`; infinite for non-square input.
pub fn symmetry_residual(j: &ComplexMatrix) -> f64 {
    if !is_square(j) {
        return f64::INFINITY;
    }
    let n = j.nrows();
    dist(j, &adjoint(j)).max(dist(&(j * j), &identity(n)))
}

impl Symmetry {
    /// Checks the symmetry axioms; no relation to any idempotent is certified.
    pub fn new(matrix: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        crate::linalg::ensure_finite(&matrix)?;
        let residual = symmetry_residual(&matrix);
        if residual > tol.residual_atol {
            return Err(Error::NotSymmetry { residual });
        }
        Ok(Self {
            matrix,
            certified: Certified::empty(),
        })
    }

    /// Validates `matrix` and certifies every relation it satisfies against `p`.
    pub fn certify(matrix: ComplexMatrix, p: &Idempotent) -> Result<Self> {
        let mut s = Self::new(matrix, p.tolerance())?;
        let m = membership(p, &s.matrix);
        s.certified.set(Certified::GAMMA, m.in_gamma);
        s.certified.set(Certified::DELTA, m.in_delta);
        s.certified.set(Certified::POSITIVE, m.positive);
        Ok(s)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn certified(&self) -> Certified {
        self.certified
    }

    pub fn is_certified(&self, tag: Certified) -> bool {
        self.certified.contains(tag)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Certifies `matrix` against `p` and fails unless `relation` holds.
pub(crate) fn certify_as(
    matrix: ComplexMatrix,
    p: &Idempotent,
    relation: Certified,
) -> Result<Symmetry> {
    let j = Symmetry::certify(matrix, p)?;
    if !j.is_certified(relation) {
        let m = membership(p, j.matrix());
        return Err(Error::NotMember(format!(
            "result fails its defining relation (gamma {:.3e}, delta {:.3e}, min eigenvalue {:.3e})",
            m.gamma_residual, m.delta_residual, m.positivity.min_eigenvalue
        )));
    }
    Ok(j)
}

fn relation_scale(p: &Idempotent, j: &ComplexMatrix) -> f64 {
    (1.0 + p.norm()) * (1.0 + op_norm(j))
}

fn shapes_agree(p: &Idempotent, j: &ComplexMatrix) -> bool {
    is_square(j) && j.nrows() == p.dim()
}

/// `‖JPJ − (I − P)‖` normalized.
pub fn gamma_residual(p: &Idempotent, j: &ComplexMatrix) -> f64 {
    if !shapes_agree(p, j) {
        return f64::INFINITY;
    }
    let target = identity(p.dim()) - p.matrix();
    dist(&(j * p.matrix() * j), &target) / relation_scale(p, j)
}

/// `‖JPJ − (I − P*)‖` normalized.
pub fn delta_residual(p: &Idempotent, j: &ComplexMatrix) -> f64 {
    if !shapes_agree(p, j) {
        return f64::INFINITY;
    }
    let target = identity(p.dim()) - adjoint(p.matrix());
    dist(&(j * p.matrix() * j), &target) / relation_scale(p, j)
}

/// Positivity data for `JP`: normalized `‖JP − (JP)*‖` and the smallest
/// eigenvalue of its Hermitian part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityResidual {
    pub hermitian_residual: f64,
    pub min_eigenvalue: f64,
}

pub fn positive_residual(p: &Idempotent, j: &ComplexMatrix) -> PositivityResidual {
    if !shapes_agree(p, j) {
        return PositivityResidual {
            hermitian_residual: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
        };
    }
    let jp = j * p.matrix();
    let hermitian_residual = dist(&jp, &adjoint(&jp)) / relation_scale(p, j);
    let min_eigenvalue = hermitian_eigen(&symmetrize(&jp))
        .map(|e| e.min())
        .unwrap_or(f64::NEG_INFINITY);
    PositivityResidual {
        hermitian_residual,
        min_eigenvalue: if p.dim() == 0 { 0.0 } else { min_eigenvalue },
    }
}

/// Every relation of `J` against `P`, with residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub symmetry_residual: f64,
    pub gamma_residual: f64,
    pub delta_residual: f64,
    pub positivity: PositivityResidual,
    pub is_symmetry: bool,
    pub in_gamma: bool,
    pub in_delta: bool,
    pub positive: bool,
}

pub fn membership(p: &Idempotent, j: &ComplexMatrix) -> Membership {
    let tol = p.tolerance();
    let symmetry_residual = symmetry_residual(j);
    let gamma_residual = gamma_residual(p, j);
    let delta_residual = delta_residual(p, j);
    let positivity = positive_residual(p, j);
    let is_symmetry = shapes_agree(p, j) && symmetry_residual <= tol.residual_atol;
    Membership {
        symmetry_residual,
        gamma_residual,
        delta_residual,
        positivity,
        is_symmetry,
        in_gamma: is_symmetry && gamma_residual <= tol.residual_atol,
        in_delta: is_symmetry && delta_residual <= tol.residual_atol,
        positive: is_symmetry
            && positivity.hermitian_residual <= tol.residual_atol
            && positivity.min_eigenvalue >= tol.psd_tol,
    }
}

/// `J` is a symmetry with `JPJ = I − P`.
pub fn is_in_gamma(p: &Idempotent, j: &ComplexMatrix) -> bool {
    membership(p, j).in_gamma
}

/// `J` is a symmetry with `JPJ = I − P*`.
pub fn is_in_delta(p: &Idempotent, j: &ComplexMatrix) -> bool {
    membership(p, j).in_delta
}

/// `J` is a symmetry with `JP ≥ 0`.
pub fn is_positive_pair(p: &Idempotent, j: &ComplexMatrix) -> bool {
    membership(p, j).positive
}
