//! Parameterized families of symmetries attached to an idempotent.
//!
//! Every construction is assembled in the block coordinates of
//! [`BlockForm`] and conjugated back to the ambient basis, so results can be
//! compared in the ambient basis directly.
//!
//! | family   | block form of `J`                                        | parameter constraint |
//! |----------|----------------------------------------------------------|----------------------|
//! | Γ_P      | `[[−U B P₁*, U B], [B U*, P₁* U B]]`                      | `U*P₁ = P₁*U`        |
//! | Δ_P      | `[[0, iU*], [−iU, 0]]`                                    | `UP₁ = P₁*U*`        |
//! | positive | `[[A, A P₁], [P₁* A, (2E − I) B]]`                        | `E ≤ P_{N(P₁)}`      |
//!
//! Here `A = (I + P₁P₁*)^{-1/2}` and `B = (I + P₁*P₁)^{-1/2}`. The families Γ_P
//! and Δ_P are nonempty exactly when `dim R(P) = dim R(P)^⊥`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::halmos::{corner_weights, CornerWeights};
use crate::idempotent::{kernel_dims, kernel_dims_direct, BlockForm, Idempotent};
use crate::linalg::{
    adjoint, c64, columns, dist, ensure_finite, hermitian_eigen, hermitian_residual,
    hermitian_sqrt, identity, null_space_basis_with_floor, op_norm, polar_decompose, projector,
    random_unitary_with, scaled, svd, symmetrize, unitary_residual, zeros, ComplexMatrix,
    ToleranceConfig,
};
use crate::symmetry::{certify_as, symmetry_residual, Certified, Symmetry};

pub use crate::symmetry::{is_in_delta, is_in_gamma, is_positive_pair};

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// Unitary `U: R(P)^⊥ → R(P)` (in block coordinates) with `U*P₁ = P₁*U`.
#[derive(Debug, Clone)]
pub struct GammaParam {
    pub u: ComplexMatrix,
}

/// Unitary `U: R(P) → R(P)^⊥` (in block coordinates) with `UP₁ = P₁*U*`.
#[derive(Debug, Clone)]
pub struct DeltaParam {
    pub u: ComplexMatrix,
}

/// Orthogonal projection `E` on `R(P)^⊥` coordinates with `P₁E = 0`.
#[derive(Debug, Clone)]
pub struct PositiveParam {
    pub e: ComplexMatrix,
}

impl PositiveParam {
    /// `J₂ = 2E − I`.
    pub fn j2(&self) -> ComplexMatrix {
        scaled(&self.e, c64::new(2.0, 0.0)) - identity(self.e.nrows())
    }
}

fn not_exists(p: &Idempotent) -> Error {
    let bf = p.block_form();
    match kernel_dims(p).or_else(|_| kernel_dims_direct(p)) {
        Ok(d) => Error::NotExists {
            d_plus: d.d_plus,
            d_minus: d.d_minus,
        },
        // the corner has rank at most min(r, n − r)
        Err(_) => Error::NotExists {
            d_plus: bf.corank(),
            d_minus: bf.rank(),
        },
    }
}

fn ensure_balanced(p: &Idempotent) -> Result<&BlockForm> {
    let bf = p.block_form();
    if bf.rank() != bf.corank() {
        return Err(not_exists(p));
    }
    Ok(bf)
}

fn constraint_scale(bf: &BlockForm) -> f64 {
    1.0 + op_norm(bf.corner())
}

fn check_shape(m: &ComplexMatrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::BadParam(format!(
            "{what} must be {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite(m)
}

fn check_unitary(u: &ComplexMatrix, tol: &ToleranceConfig, what: &str) -> Result<()> {
    let residual = unitary_residual(u);
    if residual > tol.residual_atol {
        return Err(Error::BadParam(format!(
            "{what} is not unitary (residual {residual:.3e})"
        )));
    }
    Ok(())
}

impl GammaParam {
    pub fn validate(&self, p: &Idempotent) -> Result<()> {
        let bf = ensure_balanced(p)?;
        let tol = p.tolerance();
        check_shape(&self.u, bf.rank(), bf.corank(), "U")?;
        check_unitary(&self.u, tol, "U")?;
        let p1 = bf.corner();
        let lhs = adjoint(&self.u) * p1;
        let rhs = adjoint(p1) * &self.u;
        let residual = dist(&lhs, &rhs) / constraint_scale(bf);
        if residual > tol.residual_atol {
            return Err(Error::BadParam(format!(
                "U*P1 = P1*U fails (residual {residual:.3e})"
            )));
        }
        Ok(())
    }
}

impl DeltaParam {
    pub fn validate(&self, p: &Idempotent) -> Result<()> {
        let bf = ensure_balanced(p)?;
        let tol = p.tolerance();
        check_shape(&self.u, bf.corank(), bf.rank(), "U")?;
        check_unitary(&self.u, tol, "U")?;
        let p1 = bf.corner();
        let lhs = &self.u * p1;
        let rhs = adjoint(p1) * adjoint(&self.u);
        let residual = dist(&lhs, &rhs) / constraint_scale(bf);
        if residual > tol.residual_atol {
            return Err(Error::BadParam(format!(
                "UP1 = P1*U* fails (residual {residual:.3e})"
            )));
        }
        Ok(())
    }
}

impl PositiveParam {
    pub fn validate(&self, p: &Idempotent) -> Result<()> {
        let bf = p.block_form();
        let tol = p.tolerance();
        let s = bf.corank();
        check_shape(&self.e, s, s, "E")?;
        let hermitian = hermitian_residual(&self.e);
        let idempotent = dist(&(&self.e * &self.e), &self.e) / (1.0 + op_norm(&self.e));
        if hermitian > tol.residual_atol || idempotent > tol.residual_atol {
            return Err(Error::BadParam(format!(
                "E is not an orthogonal projection (hermitian {hermitian:.3e}, idempotent {idempotent:.3e})"
            )));
        }
        let annihilation = op_norm(&(bf.corner() * &self.e)) / constraint_scale(bf);
        if annihilation > tol.residual_atol {
            return Err(Error::BadParam(format!(
                "R(E) is not inside N(P1) (residual {annihilation:.3e})"
            )));
        }
        Ok(())
    }
}

/// The unitary `V` of the completed polar decomposition `P₁* = V (P₁P₁*)^{1/2}`.
fn corner_adjoint_polar_unitary(bf: &BlockForm, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let factors = polar_decompose(&adjoint(bf.corner()), tol, true)?;
    Ok(factors
        .unitary_completion
        .expect("completion requested for a square corner"))
}

fn assemble_gamma(bf: &BlockForm, w: &CornerWeights, u: &ComplexMatrix) -> ComplexMatrix {
    let p1 = bf.corner();
    let ub = u * &w.b;
    let m11 = scaled(&(&ub * adjoint(p1)), c64::new(-1.0, 0.0));
    let m22 = adjoint(p1) * &ub;
    bf.assemble(&m11, &ub, &adjoint(&ub), &m22)
}

/// The element of Γ_P with `U = V*`, `V` from the completed polar decomposition
/// of `P₁*`.
pub fn canonical_gamma(p: &Idempotent) -> Result<Symmetry> {
    let bf = ensure_balanced(p)?;
    let tol = p.tolerance();
    let u = adjoint(&corner_adjoint_polar_unitary(bf, tol)?);
    let w = corner_weights(bf, tol)?;
    certify_as(assemble_gamma(bf, &w, &u), p, Certified::GAMMA)
}

pub fn construct_gamma(p: &Idempotent, param: &GammaParam) -> Result<Symmetry> {
    param.validate(p)?;
    let bf = p.block_form();
    let w = corner_weights(bf, p.tolerance())?;
    certify_as(assemble_gamma(bf, &w, &param.u), p, Certified::GAMMA)
}

/// `U = V J₁` with `V` the polar unitary of an invertible corner `P₁` and `J₁`
/// (in `R(P)^⊥` coordinates) a symmetry commuting with `P₁*P₁`.
pub fn gamma_param_from_seed(p: &Idempotent, j1: &ComplexMatrix) -> Result<GammaParam> {
    let dims = kernel_dims(p)?;
    if dims.d_plus != 0 || dims.d_minus != 0 {
        return Err(Error::NotApplicable(format!(
            "seeded parameters need kernel dims (0, 0), got ({}, {})",
            dims.d_plus, dims.d_minus
        )));
    }
    let bf = p.block_form();
    let tol = p.tolerance();
    let s = bf.corank();
    check_shape(j1, s, s, "J1")?;
    let sym = symmetry_residual(j1);
    if sym > tol.residual_atol {
        return Err(Error::BadParam(format!("J1 is not a symmetry (residual {sym:.3e})")));
    }
    let p1 = bf.corner();
    let gram = adjoint(p1) * p1;
    let commutator = dist(&(j1 * &gram), &(&gram * j1)) / (1.0 + op_norm(&gram));
    if commutator > tol.residual_atol {
        return Err(Error::BadParam(format!(
            "J1 does not commute with P1*P1 (residual {commutator:.3e})"
        )));
    }
    let v = polar_decompose(p1, tol, true)?
        .unitary_completion
        .expect("completion requested for a square corner");
    let param = GammaParam { u: &v * j1 };
    param.validate(p)?;
    Ok(param)
}

/// Reads `U = J₁₂ (I + P₁*P₁)^{1/2}` off a member of Γ_P.
pub fn extract_gamma_param(p: &Idempotent, j: &ComplexMatrix) -> Result<GammaParam> {
    if !is_in_gamma(p, j) {
        return Err(Error::NotMember("J is not in the family JPJ = I - P".into()));
    }
    let bf = p.block_form();
    let p1 = bf.corner();
    let root = hermitian_sqrt(&(identity(bf.corank()) + adjoint(p1) * p1), p.tolerance())?;
    let (_, j12, _, _) = bf.split(j);
    Ok(GammaParam { u: &j12 * root })
}

fn assemble_delta(bf: &BlockForm, u: &ComplexMatrix) -> ComplexMatrix {
    let (r, s) = (bf.rank(), bf.corank());
    bf.assemble(
        &zeros(r, r),
        &scaled(&adjoint(u), I),
        &scaled(u, -I),
        &zeros(s, s),
    )
}

/// `[[0, iV*], [−iV, 0]]` with `V` the completed polar unitary of `P₁*`.
pub fn canonical_delta(p: &Idempotent) -> Result<Symmetry> {
    let bf = ensure_balanced(p)?;
    let v = corner_adjoint_polar_unitary(bf, p.tolerance())?;
    certify_as(assemble_delta(bf, &v), p, Certified::DELTA)
}

pub fn construct_delta(p: &Idempotent, param: &DeltaParam) -> Result<Symmetry> {
    param.validate(p)?;
    certify_as(
        assemble_delta(p.block_form(), &param.u),
        p,
        Certified::DELTA,
    )
}

/// Reads `U = i J₂₁` off a member of Δ_P.
pub fn extract_delta_param(p: &Idempotent, j: &ComplexMatrix) -> Result<DeltaParam> {
    if !is_in_delta(p, j) {
        return Err(Error::NotMember("J is not in the family JPJ = I - P*".into()));
    }
    let (_, _, j21, _) = p.block_form().split(j);
    Ok(DeltaParam { u: scaled(&j21, I) })
}

/// `[[A, A P₁], [P₁* A, (2E − I) B]]`; `E = 0` gives the minimal positive symmetry.
pub fn construct_positive_symmetry(p: &Idempotent, param: &PositiveParam) -> Result<Symmetry> {
    param.validate(p)?;
    let bf = p.block_form();
    let w = corner_weights(bf, p.tolerance())?;
    let ap1 = &w.a * bf.corner();
    let m22 = param.j2() * &w.b;
    certify_as(
        bf.assemble(&w.a, &ap1, &adjoint(&ap1), &m22),
        p,
        Certified::POSITIVE,
    )
}

/// Orthonormal basis of `N(P₁)` in `R(P)^⊥` coordinates.
pub fn corner_kernel_basis(p: &Idempotent) -> Result<ComplexMatrix> {
    null_space_basis_with_floor(p.block_form().corner(), p.rank_floor())
}

/// Symmetry `K = K₊ ⊕ K₀` adapted to Hermitian `h`: random signs on the
/// eigenvectors with nonzero eigenvalue, a Haar unitary on the kernel.
fn random_commutant_factor<R: Rng + ?Sized>(
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let n = h.nrows();
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    let eig = hermitian_eigen(&symmetrize(h))?;
    let floor = tol.rank_rtol * eig.spectral_radius().max(1.0);
    let kernel: Vec<usize> = (0..n).filter(|&k| eig.values[k].abs() <= floor).collect();
    let kernel_unitary = random_unitary_with(kernel.len(), rng);
    let mut core = zeros(n, n);
    for k in 0..n {
        if eig.values[k].abs() > floor {
            core[(k, k)] = c64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0);
        }
    }
    for (a, &ka) in kernel.iter().enumerate() {
        for (b, &kb) in kernel.iter().enumerate() {
            core[(ka, kb)] = kernel_unitary[(a, b)];
        }
    }
    Ok(&eig.vectors * core * adjoint(&eig.vectors))
}

/// Random valid Γ_P parameter `U = V*K`, with `K` a random unitary satisfying
/// the constraint against `V P₁ ≥ 0`.
pub fn sample_gamma_param<R: Rng + ?Sized>(p: &Idempotent, rng: &mut R) -> Result<GammaParam> {
    let bf = ensure_balanced(p)?;
    let tol = p.tolerance();
    let u0 = adjoint(&corner_adjoint_polar_unitary(bf, tol)?);
    let h0 = adjoint(&u0) * bf.corner();
    let k = random_commutant_factor(&h0, tol, rng)?;
    Ok(GammaParam { u: &u0 * k })
}

/// Random valid Δ_P parameter `U = K V`.
pub fn sample_delta_param<R: Rng + ?Sized>(p: &Idempotent, rng: &mut R) -> Result<DeltaParam> {
    let bf = ensure_balanced(p)?;
    let tol = p.tolerance();
    let u0 = corner_adjoint_polar_unitary(bf, tol)?;
    let g0 = &u0 * bf.corner();
    let k = random_commutant_factor(&g0, tol, rng)?;
    Ok(DeltaParam { u: k * &u0 })
}

/// Random subprojection of `P_{N(P₁)}` of the given rank.
pub fn sample_positive_param<R: Rng + ?Sized>(
    p: &Idempotent,
    rank: usize,
    rng: &mut R,
) -> Result<PositiveParam> {
    let kernel = corner_kernel_basis(p)?;
    let k = kernel.ncols();
    if rank > k {
        return Err(Error::BadParam(format!(
            "subprojection rank {rank} exceeds dim N(P1) = {k}"
        )));
    }
    let rotated = &kernel * random_unitary_with(k, rng);
    let basis = columns(&rotated, 0, rank);
    let e = if basis.nrows() == 0 {
        zeros(0, 0)
    } else {
        projector(&basis)
    };
    Ok(PositiveParam { e })
}

/// Whether some unitary `U` makes `UA` self-adjoint: `dim N(A) = dim N(A*)`.
pub fn factor_exists(a: &ComplexMatrix, tol: &ToleranceConfig) -> bool {
    match svd(a, tol.rank_rtol) {
        Ok(dec) => a.ncols() - dec.rank == a.nrows() - dec.rank,
        Err(_) => false,
    }
}

/// Structure of a unitary `U` relative to `A` when `UA` is self-adjoint.
///
/// The blocks are stored as ambient operators: `v1` is the partial isometry of
/// `A = V₁|A|` (zero on `N(A)`), `j1` is `U V₁` compressed to `N(A)^⊥`, and `u2`
/// is `U` compressed to `R(A)^⊥ → N(A)`.
#[derive(Debug, Clone)]
pub struct FactorAnalysis {
    pub is_selfadjoint: bool,
    pub is_positive: bool,
    pub selfadjoint_residual: f64,
    pub j1: Option<ComplexMatrix>,
    pub v1: Option<ComplexMatrix>,
    pub u2: Option<ComplexMatrix>,
    /// `‖J₁V₁* + U₂ − U‖` when the blocks were extracted.
    pub reassembly_residual: Option<f64>,
}

pub fn analyze_unitary_factor(
    a: &ComplexMatrix,
    u: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<FactorAnalysis> {
    ensure_finite(a)?;
    ensure_finite(u)?;
    if u.nrows() != a.ncols() || u.ncols() != a.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "U must be {}x{} for A of shape {}x{}, got {}x{}",
            a.ncols(),
            a.nrows(),
            a.nrows(),
            a.ncols(),
            u.nrows(),
            u.ncols()
        )));
    }
    crate::linalg::ensure_unitary(u, tol)?;
    let ua = u * a;
    let selfadjoint_residual = hermitian_residual(&ua);
    let is_selfadjoint = selfadjoint_residual <= tol.residual_atol;
    if !is_selfadjoint {
        return Ok(FactorAnalysis {
            is_selfadjoint,
            is_positive: false,
            selfadjoint_residual,
            j1: None,
            v1: None,
            u2: None,
            reassembly_residual: None,
        });
    }
    let n = a.nrows();
    let dec = svd(a, tol.rank_rtol)?;
    let range = projector(&dec.range_basis());
    let coimage = projector(&dec.coimage_basis());
    let kernel = identity(n) - &coimage;
    let cokernel = identity(n) - &range;
    let w = polar_decompose(a, tol, false)?.partial_isometry;
    let j1 = &coimage * u * &range * &w;
    let u2 = &kernel * u * &cokernel;
    let reassembly_residual = dist(&(&j1 * adjoint(&w) + &u2), u);
    let is_positive = dist(&j1, &coimage) <= tol.residual_atol;
    Ok(FactorAnalysis {
        is_selfadjoint,
        is_positive,
        selfadjoint_residual,
        j1: Some(j1),
        v1: Some(w),
        u2: Some(u2),
        reassembly_residual: Some(reassembly_residual),
    })
}
