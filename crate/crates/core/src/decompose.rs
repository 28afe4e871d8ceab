//! Factorizations of members of Δ_P and the unitary-equivalence tests.
//!
//! Every `J ∈ Δ_P` factors as `J = −i J₁ J₂ = i J₂ J₁` with `J₂` the minimal
//! positive symmetry of `P` and `J₁ = i J J₂ ∈ Γ_P`. The same formula gives a
//! bijection Δ_P → Γ_P with inverse `J₁ ↦ −i J₁ J₂`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::halmos::{halmos_symmetry, min_positive_symmetry, HalmosRoute};
use crate::idempotent::{range_kernel_projections, Idempotent};
use crate::linalg::{
    adjoint, c64, dist, ensure_unitary, identity, op_norm, scaled, ComplexMatrix,
    ToleranceConfig,
};
use crate::symmetry::{certify_as, is_in_delta, is_in_gamma, is_positive_pair, Certified, Symmetry};

const I: c64 = c64 { re: 0.0, im: 1.0 };

fn times_i(m: &ComplexMatrix) -> ComplexMatrix {
    scaled(m, I)
}

fn times_minus_i(m: &ComplexMatrix) -> ComplexMatrix {
    scaled(m, -I)
}

fn require_delta(p: &Idempotent, j: &ComplexMatrix) -> Result<()> {
    if is_in_delta(p, j) {
        Ok(())
    } else {
        Err(Error::NotMember("J is not in the family JPJ = I - P*".into()))
    }
}

fn require_gamma(p: &Idempotent, j: &ComplexMatrix) -> Result<()> {
    if is_in_gamma(p, j) {
        Ok(())
    } else {
        Err(Error::NotMember("J is not in the family JPJ = I - P".into()))
    }
}

/// `J = −i J₁ J₂ = i J₂ J₁`.
#[derive(Debug, Clone)]
pub struct DeltaDecomposition {
    pub j1: Symmetry,
    pub j2: Symmetry,
    /// Larger of the two reconstruction errors.
    pub residual: f64,
    /// Distance between `J₁` and the factor rebuilt from the block-form
    /// Halmos symmetry in place of the minimal positive symmetry.
    pub uniqueness_residual: f64,
}

pub fn delta_decompose(p: &Idempotent, j: &ComplexMatrix) -> Result<DeltaDecomposition> {
    require_delta(p, j)?;
    let j2 = min_positive_symmetry(p)?;
    let j1 = certify_as(times_i(&(j * j2.matrix())), p, Certified::GAMMA)?;
    let left = times_minus_i(&(j1.matrix() * j2.matrix()));
    let right = times_i(&(j2.matrix() * j1.matrix()));
    let residual = dist(&left, j).max(dist(&right, j));
    let alternative = halmos_symmetry(p, HalmosRoute::Block)?;
    let uniqueness_residual = dist(&times_i(&(j * alternative.matrix())), j1.matrix());
    Ok(DeltaDecomposition {
        j1,
        j2,
        residual,
        uniqueness_residual,
    })
}

/// `i J J_min`, a member of Γ_P.
pub fn gamma_from_delta(p: &Idempotent, j: &ComplexMatrix) -> Result<Symmetry> {
    require_delta(p, j)?;
    let jmin = min_positive_symmetry(p)?;
    certify_as(times_i(&(j * jmin.matrix())), p, Certified::GAMMA)
}

/// `−i J₁ J_min`, a member of Δ_P.
pub fn delta_from_gamma(p: &Idempotent, j1: &ComplexMatrix) -> Result<Symmetry> {
    require_gamma(p, j1)?;
    let jmin = min_positive_symmetry(p)?;
    certify_as(times_minus_i(&(j1 * jmin.matrix())), p, Certified::DELTA)
}

/// Whether a positive symmetry `J′` of `P` anticommutes with `J ∈ Δ_P`. This
/// holds exactly when `J′` is the minimal positive symmetry.
pub fn anticommute_check(p: &Idempotent, j_prime: &ComplexMatrix, j: &ComplexMatrix) -> Result<bool> {
    if !is_positive_pair(p, j_prime) {
        return Err(Error::NotMember("J' is not a positive symmetry for P".into()));
    }
    require_delta(p, j)?;
    Ok(anticommutator_norm(j_prime, j) <= p.tolerance().residual_atol)
}

/// `‖AB + BA‖`.
pub fn anticommutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&(a * b + b * a))
}

/// A factorization `J = J₃J₄ = J₄J₃` with `J₃ ∈ Γ_P` and `J₄P ≥ 0` exists only
/// for orthogonal projections, where `(J, I)` works. Returns `None` otherwise.
pub fn commuting_decomposition(
    p: &Idempotent,
    j: &ComplexMatrix,
) -> Result<Option<(Symmetry, Symmetry)>> {
    require_delta(p, j)?;
    if !p.is_orthogonal() {
        return Ok(None);
    }
    let j3 = certify_as(j.clone(), p, Certified::GAMMA)?;
    let j4 = certify_as(identity(p.dim()), p, Certified::POSITIVE)?;
    Ok(Some((j3, j4)))
}

/// Three equivalent formulations of `UPU* = Q` for a unitary `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntertwineReport {
    /// `UPU* = Q`.
    pub i: bool,
    /// `U P_R U* = Q_R` and `U P_N U* = Q_N`.
    pub ii: bool,
    /// `U(P_R − P_N)U* = Q_R − Q_N` and `U(P − P*)U* = Q − Q*`.
    pub iii: bool,
    pub consistent: bool,
    pub residual_i: f64,
    pub residual_ii: f64,
    pub residual_iii: f64,
}

pub fn intertwine_check(
    u: &ComplexMatrix,
    p: &Idempotent,
    q: &Idempotent,
    tol: &ToleranceConfig,
) -> Result<IntertwineReport> {
    let n = p.dim();
    if q.dim() != n || u.nrows() != n || u.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "U is {}x{}, P is {n}x{n}, Q is {}x{}",
            u.nrows(),
            u.ncols(),
            q.dim(),
            q.dim()
        )));
    }
    ensure_unitary(u, tol)?;
    let conj = |m: &ComplexMatrix| u * m * adjoint(u);
    let scale = 1.0 + p.norm().max(q.norm());

    let residual_i = dist(&conj(p.matrix()), q.matrix()) / scale;

    let pp = range_kernel_projections(p)?;
    let qp = range_kernel_projections(q)?;
    let residual_ii = dist(&conj(&pp.range), &qp.range).max(dist(&conj(&pp.kernel), &qp.kernel));

    let p_diff = &pp.range - &pp.kernel;
    let q_diff = &qp.range - &qp.kernel;
    let p_skew = p.matrix() - adjoint(p.matrix());
    let q_skew = q.matrix() - adjoint(q.matrix());
    let residual_iii = dist(&conj(&p_diff), &q_diff).max(dist(&conj(&p_skew), &q_skew) / scale);

    let atol = tol.residual_atol;
    let (i, ii, iii) = (residual_i <= atol, residual_ii <= atol, residual_iii <= atol);
    Ok(IntertwineReport {
        i,
        ii,
        iii,
        consistent: i == ii && ii == iii,
        residual_i,
        residual_ii,
        residual_iii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{canonical_delta, construct_positive_symmetry, PositiveParam};
    use crate::linalg::{diag, from_real_rows, from_rows, zeros};

    const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn t() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn idem(m: ComplexMatrix) -> Idempotent {
        Idempotent::new(m, &t()).unwrap()
    }

    fn oblique() -> Idempotent {
        idem(from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]))
    }

    fn pauli_y_like() -> ComplexMatrix {
        let z = c64::new(0.0, 0.0);
        from_rows(&[vec![z, I], vec![-I, z]])
    }

    #[test]
    fn decomposition_of_oblique_fixture() {
        let p = oblique();
        let d = delta_decompose(&p, &pauli_y_like()).unwrap();
        assert!(dist(d.j1.matrix(), &from_real_rows(&[&[-R2, R2], &[R2, R2]])) < 1e-12);
        assert!(dist(d.j2.matrix(), &from_real_rows(&[&[R2, R2], &[R2, -R2]])) < 1e-12);
        assert!(d.residual < 1e-12 && d.uniqueness_residual < 1e-12);
    }

    #[test]
    fn decomposition_of_orthogonal_fixture() {
        let p = idem(diag(&[1.0, 0.0]));
        let d = delta_decompose(&p, &pauli_y_like()).unwrap();
        assert!(dist(d.j1.matrix(), &from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])) < 1e-12);
        assert!(dist(d.j2.matrix(), &diag(&[1.0, -1.0])) < 1e-12);
    }

    #[test]
    fn decomposition_rejects_non_members() {
        let h = from_real_rows(&[&[R2, R2], &[R2, -R2]]);
        assert!(matches!(delta_decompose(&oblique(), &h), Err(Error::NotMember(_))));
    }

    #[test]
    fn bijection_fixture() {
        let p = oblique();
        let g = gamma_from_delta(&p, &pauli_y_like()).unwrap();
        assert!(dist(g.matrix(), &from_real_rows(&[&[-R2, R2], &[R2, R2]])) < 1e-12);
        let back = delta_from_gamma(&p, g.matrix()).unwrap();
        assert!(dist(back.matrix(), &pauli_y_like()) < 1e-12);
    }

    #[test]
    fn bijection_stays_inside_coinciding_families() {
        let p = idem(diag(&[1.0, 0.0]));
        let j = pauli_y_like();
        let g = gamma_from_delta(&p, &j).unwrap();
        assert!(g.is_certified(Certified::GAMMA | Certified::DELTA));
        let d = delta_from_gamma(&p, &j).unwrap();
        assert!(d.is_certified(Certified::GAMMA | Certified::DELTA));
    }

    #[test]
    fn anticommutation_examples() {
        let j = pauli_y_like();
        let h = from_real_rows(&[&[R2, R2], &[R2, -R2]]);
        assert!(anticommute_check(&oblique(), &h, &j).unwrap());
        let q = idem(diag(&[1.0, 0.0]));
        assert!(!anticommute_check(&q, &identity(2), &j).unwrap());
        assert!(anticommute_check(&q, &diag(&[1.0, -1.0]), &j).unwrap());
        assert!(matches!(
            anticommute_check(&oblique(), &diag(&[1.0, -1.0]), &j),
            Err(Error::NotMember(_))
        ));
    }

    #[test]
    fn commuting_factorization_dichotomy() {
        let j = pauli_y_like();
        let q = idem(diag(&[1.0, 0.0]));
        let (j3, j4) = commuting_decomposition(&q, &j).unwrap().unwrap();
        assert!(dist(j3.matrix(), &j) < 1e-15);
        assert!(dist(j4.matrix(), &identity(2)) < 1e-15);
        assert!(commuting_decomposition(&oblique(), &j).unwrap().is_none());

        let e = idem(zeros(0, 0));
        let (a, b) = commuting_decomposition(&e, &zeros(0, 0)).unwrap().unwrap();
        assert_eq!((a.dim(), b.dim()), (0, 0));
    }

    #[test]
    fn positive_family_element_with_nonzero_e_does_not_anticommute() {
        let q = idem(diag(&[1.0, 0.0]));
        let j = canonical_delta(&q).unwrap();
        let full = construct_positive_symmetry(&q, &PositiveParam { e: identity(1) }).unwrap();
        assert!(!anticommute_check(&q, full.matrix(), j.matrix()).unwrap());
    }

    #[test]
    fn intertwining_examples() {
        let p = oblique();
        let r = intertwine_check(&identity(2), &p, &p, &t()).unwrap();
        assert!(r.i && r.ii && r.iii && r.consistent);

        let swap = from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let a = idem(diag(&[1.0, 0.0]));
        let b = idem(diag(&[0.0, 1.0]));
        let r = intertwine_check(&swap, &a, &b, &t()).unwrap();
        assert!(r.i && r.ii && r.iii);

        let r = intertwine_check(&identity(2), &a, &b, &t()).unwrap();
        assert!(!r.i && !r.ii && !r.iii && r.consistent);

        assert!(matches!(
            intertwine_check(&identity(3), &a, &b, &t()),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            intertwine_check(&diag(&[1.0, 2.0]), &a, &b, &t()),
            Err(Error::NotUnitary { .. })
        ));
    }
}
