//! Dense complex linear algebra on which every construction in the crate is
//! built.
//!
//! Matrices are plain [`faer::Mat<c64>`] values. Decompositions go through
//! faer's Hermitian eigensolver and SVD, with a fixed phase convention on
//! every returned eigen/singular vector (first nonzero component real and
//! positive) so that derived bases are reproducible.

mod decomp;
mod random;

pub use decomp::{
    abs_value, hermitian_eigen, hermitian_inv_sqrt, hermitian_sqrt, inverse_abs_value,
    loewner_geq, null_space_basis, null_space_basis_with_floor, numerical_rank, polar_decompose,
    positive_negative_parts, range_projector, svd, svd_with_floor, HermitianEigen, PolarFactors, Svd,
};
pub use random::{random_gaussian, random_unitary, random_unitary_with};

pub use faer::c64;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix, the carrier for every operator in the crate.
pub type ComplexMatrix = Mat<c64>;

/// Thresholds governing every approximate check.
///
/// `residual_atol` bounds residual norms after normalization by `1 + ‖input‖`.
/// `psd_tol` is the (non-positive) eigenvalue floor for positivity tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rank_rtol: f64,
    pub residual_atol: f64,
    pub psd_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rtol: 1e-10,
            residual_atol: 1e-8,
            psd_tol: -1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_rtol: f64, residual_atol: f64, psd_tol: f64) -> Result<Self> {
        let tol = Self {
            rank_rtol,
            residual_atol,
            psd_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.rank_rtol.is_finite()
            && self.residual_atol.is_finite()
            && self.psd_tol.is_finite();
        if !finite || self.rank_rtol < 0.0 || self.residual_atol < 0.0 || self.psd_tol > 0.0 {
            return Err(Error::BadParam(format!(
                "tolerances must satisfy rank_rtol >= 0, residual_atol >= 0, psd_tol <= 0 (got {self:?})"
            )));
        }
        Ok(())
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    Mat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    Mat::zeros(rows, cols)
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint().to_owned()
}

pub fn scaled(m: &ComplexMatrix, s: c64) -> ComplexMatrix {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(values[i], 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Builds a matrix from rows of complex entries. Panics on ragged input.
pub fn from_rows(rows: &[Vec<c64>]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
    Mat::from_fn(nrows, ncols, |i, j| rows[i][j])
}

/// Builds a matrix from rows of real entries.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
    Mat::from_fn(nrows, ncols, |i, j| c64::new(rows[i][j], 0.0))
}

/// Assembles `[[a, b], [c, d]]` from conforming blocks (zero-width blocks allowed).
pub fn block2x2(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
) -> ComplexMatrix {
    let (r1, c1) = (a.nrows(), a.ncols());
    let (r2, c2) = (d.nrows(), d.ncols());
    assert!(b.nrows() == r1 && b.ncols() == c2, "block (1,2) shape");
    assert!(c.nrows() == r2 && c.ncols() == c1, "block (2,1) shape");
    Mat::from_fn(r1 + r2, c1 + c2, |i, j| match (i < r1, j < c1) {
        (true, true) => a[(i, j)],
        (true, false) => b[(i, j - c1)],
        (false, true) => c[(i - r1, j)],
        (false, false) => d[(i - r1, j - c1)],
    })
}

/// Horizontal concatenation `[a | b]`.
pub fn hstack(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let ca = a.ncols();
    Mat::from_fn(a.nrows(), ca + b.ncols(), |i, j| {
        if j < ca {
            a[(i, j)]
        } else {
            b[(i, j - ca)]
        }
    })
}

/// Copies columns `start..start + count`.
pub fn columns(m: &ComplexMatrix, start: usize, count: usize) -> ComplexMatrix {
    assert!(start + count <= m.ncols(), "column range out of bounds");
    Mat::from_fn(m.nrows(), count, |i, j| m[(i, start + j)])
}

/// Copies the `rows x cols` block starting at `(row, col)`.
pub fn block(m: &ComplexMatrix, row: usize, col: usize, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(row + rows <= m.nrows() && col + cols <= m.ncols(), "block out of bounds");
    Mat::from_fn(rows, cols, |i, j| m[(row + i, col + j)])
}

/// Orthogonal projector `B B*` onto the span of orthonormal columns `B`.
pub fn projector(basis: &ComplexMatrix) -> ComplexMatrix {
    basis * basis.adjoint()
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    match m.singular_values() {
        Ok(s) => s.first().copied().unwrap_or(0.0),
        // Frobenius bounds the spectral norm from above
        Err(_) => m.norm_l2(),
    }
}

/// Spectral norm of `a - b`.
pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert!(a.nrows() == b.nrows() && a.ncols() == b.ncols(), "dist shape mismatch");
    op_norm(&(a - b))
}

pub fn is_square(m: &ComplexMatrix) -> bool {
    m.nrows() == m.ncols()
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if is_square(m) {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// `‖A - A*‖ / (1 + ‖A‖)`.
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    if !is_square(m) {
        return f64::INFINITY;
    }
    dist(m, &adjoint(m)) / (1.0 + op_norm(m))
}

/// `max(‖U*U - I‖, ‖UU* - I‖)`; infinite for non-square input.
pub fn unitary_residual(u: &ComplexMatrix) -> f64 {
    if !is_square(u) {
        return f64::INFINITY;
    }
    let n = u.nrows();
    let left = dist(&(u.adjoint() * u), &identity(n));
    let right = dist(&(u * u.adjoint()), &identity(n));
    left.max(right)
}

pub fn ensure_unitary(u: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    let residual = unitary_residual(u);
    if residual <= tol.residual_atol {
        Ok(())
    } else {
        Err(Error::NotUnitary { residual })
    }
}

pub fn ensure_hermitian(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    ensure_square(m)?;
    let residual = hermitian_residual(m);
    if residual <= tol.residual_atol {
        Ok(())
    } else {
        Err(Error::NotHermitian { residual })
    }
}

/// Hermitian part `(A + A*) / 2`.
pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances_are_valid() {
        let tol = ToleranceConfig::default();
        assert!(tol.validate().is_ok());
        assert_eq!(tol.rank_rtol, 1e-10);
        assert_eq!(tol.residual_atol, 1e-8);
        assert_eq!(tol.psd_tol, -1e-10);
    }

    #[test]
    fn positive_psd_floor_is_rejected() {
        assert!(matches!(
            ToleranceConfig::new(1e-10, 1e-8, 1e-3),
            Err(Error::BadParam(_))
        ));
        assert!(ToleranceConfig::new(-1.0, 1e-8, 0.0).is_err());
        assert!(ToleranceConfig::new(f64::NAN, 1e-8, 0.0).is_err());
    }

    #[test]
    fn block_assembly_accepts_zero_width_blocks() {
        let a = identity(2);
        let b = zeros(2, 0);
        let c = zeros(0, 2);
        let d = zeros(0, 0);
        let m = block2x2(&a, &b, &c, &d);
        assert_eq!((m.nrows(), m.ncols()), (2, 2));
        assert_eq!(dist(&m, &identity(2)), 0.0);
    }

    #[test]
    fn op_norm_of_empty_is_zero() {
        assert_eq!(op_norm(&zeros(0, 3)), 0.0);
        assert_eq!(op_norm(&zeros(0, 0)), 0.0);
    }

    #[test]
    fn non_finite_entry_reported_with_position() {
        let mut m = identity(3);
        m[(1, 2)] = c64::new(f64::NAN, 0.0);
        assert_eq!(ensure_finite(&m), Err(Error::NonFinite { row: 1, col: 2 }));
    }
}
