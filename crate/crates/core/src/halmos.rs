//! The Halmos symmetry `J′ = (2P − I)|2P − I|⁻¹` and the closed forms of
//! `|2P − I|^{±1}` in block coordinates.
//!
//! With `A = (I + P₁P₁*)^{-1/2}` and `B = (I + P₁*P₁)^{-1/2}`:
//!
//! ```text
//! J′          = [[A,          A P₁], [P₁* A, −B]]
//! |2P − I|    = [[A,          A P₁], [P₁* A, (I + 2P₁*P₁) B]]
//! |2P − I|⁻¹  = [[(I + 2P₁P₁*) A, −A P₁], [−P₁* A, B]]
//! ```
//!
//! `J′` coincides with `(P + P* − I)|P + P* − I|⁻¹` and with the minimal
//! positive symmetry `2 P_{R((P + P*)⁺)} − I`.

use crate::error::Result;
use crate::idempotent::{BlockForm, Idempotent};
use crate::linalg::{
    adjoint, c64, hermitian_inv_sqrt, identity, inverse_abs_value, op_norm,
    positive_negative_parts, range_projector, scaled, ComplexMatrix, ToleranceConfig,
};
use crate::symmetry::Symmetry;

/// Which formula evaluates `J′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HalmosRoute {
    /// `(2P − I)|2P − I|⁻¹`.
    Reflection,
    /// `(P + P* − I)|P + P* − I|⁻¹`.
    HermitianSum,
    /// Block closed form.
    #[default]
    Block,
}

/// The weights `A = (I + P₁P₁*)^{-1/2}` (on `R(P)`) and `B = (I + P₁*P₁)^{-1/2}`
/// (on `R(P)^⊥`).
#[derive(Debug, Clone)]
pub struct CornerWeights {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

pub fn corner_weights(bf: &BlockForm, tol: &ToleranceConfig) -> Result<CornerWeights> {
    let p1 = bf.corner();
    let p1_adj = adjoint(p1);
    let a = hermitian_inv_sqrt(&(identity(bf.rank()) + p1 * &p1_adj), tol)?;
    let b = hermitian_inv_sqrt(&(identity(bf.corank()) + &p1_adj * p1), tol)?;
    Ok(CornerWeights { a, b })
}

fn two(m: &ComplexMatrix) -> ComplexMatrix {
    scaled(m, c64::new(2.0, 0.0))
}

fn neg(m: &ComplexMatrix) -> ComplexMatrix {
    scaled(m, c64::new(-1.0, 0.0))
}

/// `J′` for `P`, certified against `P` for every relation it satisfies.
pub fn halmos_symmetry(p: &Idempotent, route: HalmosRoute) -> Result<Symmetry> {
    let tol = p.tolerance();
    let j = match route {
        HalmosRoute::Reflection => {
            let t = p.reflection();
            &t * inverse_abs_value(&t, tol)?
        }
        HalmosRoute::HermitianSum => {
            let s = p.hermitian_sum() - identity(p.dim());
            &s * inverse_abs_value(&s, tol)?
        }
        HalmosRoute::Block => {
            let bf = p.block_form();
            let w = corner_weights(bf, tol)?;
            let ap1 = &w.a * bf.corner();
            bf.assemble(&w.a, &ap1, &adjoint(&ap1), &neg(&w.b))
        }
    };
    Symmetry::certify(j, p)
}

/// `|2P − I|`, or its inverse, from the block closed forms.
pub fn abs_2p_minus_i(p: &Idempotent, inverse: bool) -> Result<ComplexMatrix> {
    let bf = p.block_form();
    let w = corner_weights(bf, p.tolerance())?;
    let p1 = bf.corner();
    let p1_adj = adjoint(p1);
    let ap1 = &w.a * p1;
    let ap1_adj = adjoint(&ap1);
    Ok(if inverse {
        let m11 = (identity(bf.rank()) + two(&(p1 * &p1_adj))) * &w.a;
        bf.assemble(&m11, &neg(&ap1), &neg(&ap1_adj), &w.b)
    } else {
        let m22 = (identity(bf.corank()) + two(&(&p1_adj * p1))) * &w.b;
        bf.assemble(&w.a, &ap1, &ap1_adj, &m22)
    })
}

/// `2 P_{R(S⁺)} − I` for `S = P + P*`.
pub fn min_positive_symmetry(p: &Idempotent) -> Result<Symmetry> {
    let tol = p.tolerance();
    let s = p.hermitian_sum();
    let (plus, _) = positive_negative_parts(&s, tol)?;
    let proj = range_projector(&plus, tol.rank_rtol * op_norm(&s))?;
    Symmetry::certify(two(&proj) - identity(p.dim()), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{abs_value, diag, dist, from_real_rows};
    use crate::symmetry::Certified;

    fn idem(rows: &[&[f64]]) -> Idempotent {
        Idempotent::new(from_real_rows(rows), &ToleranceConfig::default()).unwrap()
    }

    const ROUTES: [HalmosRoute; 3] = [
        HalmosRoute::Reflection,
        HalmosRoute::HermitianSum,
        HalmosRoute::Block,
    ];

    #[test]
    fn oblique_unit_corner_fixture() {
        let p = idem(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = from_real_rows(&[&[r, r], &[r, -r]]);
        for route in ROUTES {
            let j = halmos_symmetry(&p, route).unwrap();
            assert!(dist(j.matrix(), &expected) < 1e-12, "{route:?}");
            assert!(j.is_certified(Certified::POSITIVE));
        }
        let abs = from_real_rows(&[&[r, r], &[r, 3.0 * r]]);
        let abs_inv = from_real_rows(&[&[3.0 * r, -r], &[-r, r]]);
        assert!(dist(&abs_2p_minus_i(&p, false).unwrap(), &abs) < 1e-12);
        assert!(dist(&abs_2p_minus_i(&p, true).unwrap(), &abs_inv) < 1e-12);
    }

    #[test]
    fn oblique_corner_two_fixture() {
        let p = idem(&[&[1.0, 2.0], &[0.0, 0.0]]);
        let s = 1.0 / 5f64.sqrt();
        let expected = from_real_rows(&[&[s, 2.0 * s], &[2.0 * s, -s]]);
        for route in ROUTES {
            let j = halmos_symmetry(&p, route).unwrap();
            assert!(dist(j.matrix(), &expected) < 1e-12, "{route:?}");
        }
        let jmin = min_positive_symmetry(&p).unwrap();
        assert!(dist(jmin.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn orthogonal_projection_gives_reflection() {
        let p = idem(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let j = halmos_symmetry(&p, HalmosRoute::Block).unwrap();
        assert!(dist(j.matrix(), &diag(&[1.0, -1.0])) < 1e-14);
    }

    #[test]
    fn identity_has_identity_min_symmetry() {
        let p = Idempotent::new(identity(3), &ToleranceConfig::default()).unwrap();
        let j = min_positive_symmetry(&p).unwrap();
        assert!(dist(j.matrix(), &identity(3)) < 1e-14);
        let h = halmos_symmetry(&p, HalmosRoute::Block).unwrap();
        assert!(dist(h.matrix(), &identity(3)) < 1e-14);
    }

    #[test]
    fn closed_forms_match_direct_absolute_value() {
        let p = crate::idempotent::random_idempotent(6, 2, 5.0, 11).unwrap();
        let tol = ToleranceConfig::default();
        let direct = abs_value(&p.reflection(), &tol).unwrap();
        let closed = abs_2p_minus_i(&p, false).unwrap();
        assert!(dist(&direct, &closed) / (1.0 + p.norm()) < 1e-10);
        let inv = abs_2p_minus_i(&p, true).unwrap();
        assert!(dist(&(&closed * &inv), &identity(6)) < 1e-9);
    }

    #[test]
    fn zero_and_empty_idempotents() {
        let t = ToleranceConfig::default();
        let z = Idempotent::new(crate::linalg::zeros(2, 2), &t).unwrap();
        let j = halmos_symmetry(&z, HalmosRoute::Block).unwrap();
        assert!(dist(j.matrix(), &diag(&[-1.0, -1.0])) < 1e-14);
        let e = Idempotent::new(crate::linalg::zeros(0, 0), &t).unwrap();
        assert_eq!(min_positive_symmetry(&e).unwrap().dim(), 0);
    }
}
