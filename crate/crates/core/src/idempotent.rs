//! Validated idempotents and their canonical block form.
//!
//! Every idempotent `P` on `ℂⁿ` is unitarily similar to
//!
//! ```text
//!     [ I  P₁ ]
//!     [ 0  0  ]   on  R(P) ⊕ R(P)^⊥,
//! ```
//!
//! where the corner `P₁ : R(P)^⊥ → R(P)` measures how far `P` is from being an
//! orthogonal projection. [`BlockForm`] records orthonormal bases of both
//! summands together with `P₁`; all family constructions in the crate are
//! carried out in these coordinates.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, adjoint, block, block2x2, columns, dist, ensure_finite, ensure_square, hstack,
    identity, op_norm, random_unitary_with, scaled, svd, svd_with_floor, zeros, c64, ComplexMatrix,
    ToleranceConfig,
};

/// Orthonormal coordinates adapted to `R(P) ⊕ R(P)^⊥` and the corner block `P₁`.
#[derive(Debug, Clone)]
pub struct BlockForm {
    rank: usize,
    range_basis: ComplexMatrix,
    perp_basis: ComplexMatrix,
    corner: ComplexMatrix,
}

impl BlockForm {
    /// `dim R(P)`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.range_basis.nrows()
    }

    /// `n - r`, the dimension of `R(P)^⊥`.
    pub fn corank(&self) -> usize {
        self.dim() - self.rank
    }

    /// `n x r` orthonormal basis of `R(P)`.
    pub fn range_basis(&self) -> &ComplexMatrix {
        &self.range_basis
    }

    /// `n x (n-r)` orthonormal basis of `R(P)^⊥`.
    pub fn perp_basis(&self) -> &ComplexMatrix {
        &self.perp_basis
    }

    /// The `r x (n-r)` corner `P₁`.
    pub fn corner(&self) -> &ComplexMatrix {
        &self.corner
    }

    /// The unitary `[range_basis | perp_basis]`.
    pub fn unitary(&self) -> ComplexMatrix {
        hstack(&self.range_basis, &self.perp_basis)
    }

    /// Maps an operator written in block coordinates back to the ambient basis.
    pub fn to_ambient(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let q = self.unitary();
        &q * m * q.adjoint()
    }

    /// Expresses an ambient operator in block coordinates.
    pub fn to_coordinates(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let q = self.unitary();
        q.adjoint() * m * &q
    }

    /// Ambient operator from its four blocks `[[m11, m12], [m21, m22]]`.
    pub fn assemble(
        &self,
        m11: &ComplexMatrix,
        m12: &ComplexMatrix,
        m21: &ComplexMatrix,
        m22: &ComplexMatrix,
    ) -> ComplexMatrix {
        self.to_ambient(&block2x2(m11, m12, m21, m22))
    }

    /// The four blocks of an ambient operator, in the order (1,1), (1,2), (2,1), (2,2).
    pub fn split(
        &self,
        m: &ComplexMatrix,
    ) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        let c = self.to_coordinates(m);
        let (r, s) = (self.rank, self.corank());
        (
            block(&c, 0, 0, r, r),
            block(&c, 0, r, r, s),
            block(&c, r, 0, s, r),
            block(&c, r, r, s, s),
        )
    }

    /// `[[I, P₁], [0, 0]]` conjugated back to the ambient basis.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (r, s) = (self.rank, self.corank());
        self.assemble(&identity(r), &self.corner, &zeros(s, r), &zeros(s, s))
    }
}

/// An `n x n` matrix `P` with `P² = P` to working precision.
#[derive(Debug, Clone)]
pub struct Idempotent {
    matrix: ComplexMatrix,
    tol: ToleranceConfig,
    norm: f64,
    block: OnceLock<BlockForm>,
}

/// `‖M² − M‖ / (1 + ‖M‖)²`.
pub fn idempotency_residual(m: &ComplexMatrix) -> f64 {
    let scale = 1.0 + op_norm(m);
    dist(&(m * m), m) / (scale * scale)
}

/// Wraps `m` as an idempotent if `‖M² − M‖ ≤ residual_atol · (1 + ‖M‖)²`.
pub fn validate_idempotent(m: ComplexMatrix, tol: &ToleranceConfig) -> Result<Idempotent> {
    Idempotent::new(m, tol)
}

impl Idempotent {
    pub fn new(matrix: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        ensure_square(&matrix)?;
        ensure_finite(&matrix)?;
        let norm = op_norm(&matrix);
        let scale = 1.0 + norm;
        let residual = dist(&(&matrix * &matrix), &matrix) / (scale * scale);
        if residual > tol.residual_atol {
            return Err(Error::NotIdempotent { residual });
        }
        Ok(Self::wrap(matrix, *tol, norm))
    }

    fn wrap(matrix: ComplexMatrix, tol: ToleranceConfig, norm: f64) -> Self {
        Self {
            matrix,
            tol,
            norm,
            block: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Tolerances this value was validated under; block data is computed with them.
    pub fn tolerance(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// Spectral norm `‖P‖`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Absolute singular-value floor `rank_rtol · (1 + ‖P‖)` for ranks of
    /// operators derived from `P`.
    pub fn rank_floor(&self) -> f64 {
        self.tol.rank_rtol * (1.0 + self.norm)
    }

    /// The canonical block form, computed on first use.
    pub fn block_form(&self) -> &BlockForm {
        self.block.get_or_init(|| compute_block_form(&self.matrix, &self.tol))
    }

    /// The adjoint idempotent `P*`.
    pub fn adjoint(&self) -> Idempotent {
        Self::wrap(adjoint(&self.matrix), self.tol, self.norm)
    }

    /// The complementary idempotent `I − P`.
    pub fn complement(&self) -> Idempotent {
        let matrix = identity(self.dim()) - &self.matrix;
        let norm = op_norm(&matrix);
        Self::wrap(matrix, self.tol, norm)
    }

    /// `‖P − P*‖ ≤ residual_atol · (1 + ‖P‖)`.
    pub fn is_orthogonal(&self) -> bool {
        dist(&self.matrix, &adjoint(&self.matrix)) <= self.tol.residual_atol * (1.0 + self.norm())
    }

    /// `2P − I`.
    pub fn reflection(&self) -> ComplexMatrix {
        let n = self.dim();
        &self.matrix + &self.matrix - identity(n)
    }

    /// `P + P*`.
    pub fn hermitian_sum(&self) -> ComplexMatrix {
        &self.matrix + adjoint(&self.matrix)
    }
}

fn compute_block_form(p: &ComplexMatrix, tol: &ToleranceConfig) -> BlockForm {
    let n = p.nrows();
    // SVD of a validated finite matrix only fails on non-convergence
    let dec = svd(p, tol.rank_rtol).expect("SVD of a validated idempotent");
    let r = dec.rank;
    let range_basis = columns(&dec.u, 0, r);
    let perp_basis = columns(&dec.u, r, n - r);
    let corner = range_basis.adjoint() * p * &perp_basis;
    BlockForm {
        rank: r,
        range_basis,
        perp_basis,
        corner,
    }
}

/// Block form of `P`; see [`Idempotent::block_form`].
pub fn block_form(p: &Idempotent) -> &BlockForm {
    p.block_form()
}

/// Orthogonal projections onto `R(P)` and `N(P)` obtained from
/// `(P + P* − I)⁻¹ = P_R − P_N`:
/// `P_R = P (P + P* − I)⁻¹` and `P_N = −(I − P)(P + P* − I)⁻¹`.
#[derive(Debug, Clone)]
pub struct RangeKernelProjections {
    pub range: ComplexMatrix,
    pub kernel: ComplexMatrix,
}

/// `P + P* − I` has all singular values at least 1 for a true idempotent.
const SUM_SINGULAR_FLOOR: f64 = 0.5;

pub fn range_kernel_projections(p: &Idempotent) -> Result<RangeKernelProjections> {
    let n = p.dim();
    let sum = p.hermitian_sum() - identity(n);
    let eig = linalg::hermitian_eigen(&sum)?;
    let sigma_min = eig.values.iter().fold(f64::INFINITY, |acc, l| acc.min(l.abs()));
    if n > 0 && sigma_min < SUM_SINGULAR_FLOOR {
        return Err(Error::NearSingular { sigma_min });
    }
    let inverse = eig.map(|l| 1.0 / l);
    let range = p.matrix() * &inverse;
    let kernel = scaled(&((identity(n) - p.matrix()) * &inverse), c64::new(-1.0, 0.0));
    Ok(RangeKernelProjections { range, kernel })
}

/// `dim N(P + P*)` and `dim N(2I − P − P*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct KernelDims {
    pub d_plus: usize,
    pub d_minus: usize,
}

fn nullity(m: &ComplexMatrix, floor: f64) -> Result<usize> {
    Ok(m.ncols() - svd_with_floor(m, floor)?.rank)
}

/// Kernel dimensions computed directly from `P + P*` and `2I − P − P*`.
pub fn kernel_dims_direct(p: &Idempotent) -> Result<KernelDims> {
    let n = p.dim();
    let floor = p.rank_floor();
    let sum = p.hermitian_sum();
    let d_plus = nullity(&sum, floor)?;
    let d_minus = nullity(&(scaled(&identity(n), c64::new(2.0, 0.0)) - &sum), floor)?;
    Ok(KernelDims { d_plus, d_minus })
}

/// Kernel dimensions computed from the corner: `dim N(P₁)` and `dim N(P₁*)`.
pub fn kernel_dims_corner(p: &Idempotent) -> Result<KernelDims> {
    let bf = p.block_form();
    let k = svd_with_floor(bf.corner(), p.rank_floor())?.rank;
    Ok(KernelDims {
        d_plus: bf.corank() - k,
        d_minus: bf.rank() - k,
    })
}

/// Both kernel dimensions, computed directly and through the corner block;
/// the two routes must agree.
pub fn kernel_dims(p: &Idempotent) -> Result<KernelDims> {
    let direct = kernel_dims_direct(p)?;
    let corner = kernel_dims_corner(p)?;
    if direct != corner {
        return Err(Error::InconsistentRank(format!(
            "direct ({}, {}) vs corner ({}, {})",
            direct.d_plus, direct.d_minus, corner.d_plus, corner.d_minus
        )));
    }
    Ok(direct)
}

/// Whether symmetries `J` with `JPJ = I − P` (equivalently `JPJ = I − P*`) exist:
/// `dim N(P + P*) = dim N(2I − P − P*)`.
pub fn gamma_exists(p: &Idempotent) -> bool {
    match kernel_dims(p).or_else(|_| kernel_dims_direct(p)) {
        Ok(d) => d.d_plus == d.d_minus,
        Err(_) => false,
    }
}

/// Random idempotent of rank `r` on `ℂⁿ` with a full-rank corner of norm at most
/// `norm_cap`. See [`random_idempotent_with_corner_rank`].
pub fn random_idempotent(n: usize, r: usize, norm_cap: f64, seed: u64) -> Result<Idempotent> {
    let corner_rank = r.min(n.saturating_sub(r));
    random_idempotent_with_corner_rank(n, r, corner_rank, norm_cap, seed)
}

/// Random idempotent of rank `r` whose corner has rank `corner_rank`.
///
/// The corner is `X diag(s) Y*` with Haar-random isometries `X`, `Y` and
/// singular values drawn uniformly from `[norm_cap / 10, norm_cap]`, so the
/// numerical rank of `P₁` is unambiguous. The assembled block matrix is then
/// conjugated by a Haar-random unitary.
pub fn random_idempotent_with_corner_rank(
    n: usize,
    r: usize,
    corner_rank: usize,
    norm_cap: f64,
    seed: u64,
) -> Result<Idempotent> {
    let s = n.checked_sub(r).ok_or_else(|| {
        Error::BadParam(format!("rank {r} exceeds dimension {n}"))
    })?;
    if corner_rank > r.min(s) {
        return Err(Error::BadParam(format!(
            "corner rank {corner_rank} exceeds min({r}, {s})"
        )));
    }
    if !(norm_cap.is_finite() && norm_cap >= 0.0) {
        return Err(Error::BadParam(format!("norm cap must be finite and >= 0, got {norm_cap}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = columns(&random_unitary_with(r, &mut rng), 0, corner_rank);
    let y = columns(&random_unitary_with(s, &mut rng), 0, corner_rank);
    let values: Vec<f64> = (0..corner_rank)
        .map(|_| norm_cap * rng.gen_range(0.1..=1.0))
        .collect();
    let corner = &x * linalg::diag(&values) * y.adjoint();
    let b = block2x2(&identity(r), &corner, &zeros(s, r), &zeros(s, s));
    let u = random_unitary_with(n, &mut rng);
    let p = &u * &b * u.adjoint();
    Idempotent::new(p, &ToleranceConfig::default())
}
