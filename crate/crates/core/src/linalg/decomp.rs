use faer::{Mat, Side};

use super::{
    c64, columns, ensure_finite, scaled, ensure_hermitian, ensure_square, identity,
    symmetrize, ComplexMatrix, ToleranceConfig,
};
use crate::error::{Error, Result};

/// Components below this magnitude are skipped when fixing vector phases.
const PHASE_FLOOR: f64 = 1e-10;

/// Unit scalar that makes the first non-negligible component of `col` real positive.
fn leading_phase(m: &ComplexMatrix, col: usize) -> c64 {
    for i in 0..m.nrows() {
        let z = m[(i, col)];
        let a = z.norm();
        if a > PHASE_FLOOR {
            return z.conj() / a;
        }
    }
    c64::new(1.0, 0.0)
}

fn scale_column(m: &mut ComplexMatrix, col: usize, s: c64) {
    for i in 0..m.nrows() {
        m[(i, col)] *= s;
    }
}

fn normalize_columns(m: &mut ComplexMatrix) {
    for j in 0..m.ncols() {
        let s = leading_phase(m, j);
        scale_column(m, j, s);
    }
}

/// Eigendecomposition `A = V diag(values) V*` of a Hermitian matrix, values ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.vectors;
        let n = v.nrows();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let scaled = Mat::from_fn(n, n, |i, j| v[(i, j)] * fv[j]);
        &scaled * v.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, l| acc.max(l.abs()))
    }
}

/// Eigendecomposition of the Hermitian part of `a`. The caller is responsible
/// for checking that `a` is Hermitian to begin with.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: identity(0),
        });
    }
    let h = symmetrize(a);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence("Hermitian eigensolver"))?;
    let values: Vec<f64> = (0..n).map(|i| evd.S()[i].re).collect();
    let mut vectors = evd.U().to_owned();
    normalize_columns(&mut vectors);
    Ok(HermitianEigen { values, vectors })
}

/// Full singular value decomposition `A = U Σ V*` with square unitary `U`, `V`,
/// singular values in nonincreasing order and the numerical rank under the
/// threshold it was computed with.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
    pub rank: usize,
}

impl Svd {
    /// Orthonormal basis of the numerical range: the leading left vectors.
    pub fn range_basis(&self) -> ComplexMatrix {
        columns(&self.u, 0, self.rank)
    }

    /// Orthonormal basis of `R(A)^⊥`: trailing left vectors.
    pub fn cokernel_basis(&self) -> ComplexMatrix {
        columns(&self.u, self.rank, self.u.ncols() - self.rank)
    }

    /// Orthonormal basis of `N(A)^⊥`.
    pub fn coimage_basis(&self) -> ComplexMatrix {
        columns(&self.v, 0, self.rank)
    }

    /// Orthonormal basis of `N(A)`, trailing right vectors in index order.
    pub fn kernel_basis(&self) -> ComplexMatrix {
        columns(&self.v, self.rank, self.v.ncols() - self.rank)
    }
}

/// Full SVD with the crate's phase convention. Inside the numerical rank
/// (singular values above `rank_rtol · σ_max`) each left vector gets its first
/// nonzero component real positive and the paired right vector follows the
/// same phase, leaving the factorization unchanged. Kernel and cokernel
/// vectors are normalized independently.
pub fn svd(a: &ComplexMatrix, rank_rtol: f64) -> Result<Svd> {
    svd_impl(a, |s| numerical_rank(s, rank_rtol))
}

/// [`svd`] with the numerical rank counted against an absolute floor: singular
/// values strictly above `floor`.
pub fn svd_with_floor(a: &ComplexMatrix, floor: f64) -> Result<Svd> {
    svd_impl(a, |s| s.iter().filter(|&&x| x > floor).count())
}

fn svd_impl(a: &ComplexMatrix, rank_of: impl Fn(&[f64]) -> usize) -> Result<Svd> {
    ensure_finite(a)?;
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || n == 0 {
        return Ok(Svd {
            u: identity(m),
            s: Vec::new(),
            v: identity(n),
            rank: 0,
        });
    }
    let dec = a.svd().map_err(|_| Error::NoConvergence("SVD"))?;
    let p = m.min(n);
    let s: Vec<f64> = (0..p).map(|i| dec.S()[i].re).collect();
    let rank = rank_of(&s);
    let mut u = dec.U().to_owned();
    let mut v = dec.V().to_owned();
    for j in 0..m {
        let ph = leading_phase(&u, j);
        scale_column(&mut u, j, ph);
        if j < rank {
            scale_column(&mut v, j, ph);
        }
    }
    for j in rank..n {
        let ph = leading_phase(&v, j);
        scale_column(&mut v, j, ph);
    }
    Ok(Svd { u, s, v, rank })
}

/// Count of singular values strictly above `rtol * σ_max` (values sorted descending).
pub fn numerical_rank(singular_values: &[f64], rtol: f64) -> usize {
    let smax = singular_values.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > rtol * smax).count()
}

/// Positive square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[psd_tol, 0)` are treated as roundoff and clamped to zero.
pub fn hermitian_sqrt(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    ensure_hermitian(a, tol)?;
    let eig = hermitian_eigen(a)?;
    let min = eig.min();
    if min < tol.psd_tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(eig.map(|l| l.max(0.0).sqrt()))
}

/// `A^{-1/2}` for Hermitian positive definite `A`.
pub fn hermitian_inv_sqrt(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    ensure_hermitian(a, tol)?;
    let eig = hermitian_eigen(a)?;
    let min = eig.min();
    if min < tol.psd_tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    if a.nrows() > 0 && min <= tol.rank_rtol * eig.spectral_radius() {
        return Err(Error::Singular {
            min_eigenvalue: min,
        });
    }
    Ok(eig.map(|l| 1.0 / l.sqrt()))
}

/// Absolute value `|A| = (A*A)^{1/2}`, assembled as `V Σ V*` from the SVD.
pub fn abs_value(a: &ComplexMatrix, _tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let dec = svd(a, 0.0)?;
    Ok(gram_root(&dec, a.ncols(), |s| s))
}

/// `|A|^{-1}` for invertible square `A`.
pub fn inverse_abs_value(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    let dec = svd(a, tol.rank_rtol)?;
    let n = a.ncols();
    if dec.rank < n {
        return Err(Error::Singular {
            min_eigenvalue: dec.s[n - 1],
        });
    }
    Ok(gram_root(&dec, n, |s| 1.0 / s))
}

/// `V diag(f(σ)) V*` over the right singular vectors; indices beyond the
/// singular value list count as σ = 0 and are dropped.
fn gram_root(dec: &Svd, n: usize, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let v = &dec.v;
    let p = dec.s.len();
    let weights: Vec<f64> = (0..n).map(|j| if j < p { f(dec.s[j]) } else { 0.0 }).collect();
    let scaled = Mat::from_fn(n, n, |i, j| v[(i, j)] * weights[j]);
    &scaled * v.adjoint()
}

/// Positive and negative parts `S± = (|S| ± S) / 2` of a Hermitian matrix.
pub fn positive_negative_parts(
    s: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    ensure_hermitian(s, tol)?;
    let h = symmetrize(s);
    let abs = abs_value(&h, tol)?;
    let plus = symmetrize(&scaled(&(&abs + &h), c64::new(0.5, 0.0)));
    let minus = symmetrize(&scaled(&(&abs - &h), c64::new(0.5, 0.0)));
    Ok((plus, minus))
}

/// Factors of a polar decomposition `A = W |A|`.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    /// Partial isometry from `N(A)^⊥` onto `R(A)`, vanishing on `N(A)`.
    pub partial_isometry: ComplexMatrix,
    /// `|A|`, Hermitian positive semidefinite.
    pub positive_factor: ComplexMatrix,
    /// Unitary extension of the partial isometry mapping `N(A)` onto `N(A*)`.
    pub unitary_completion: Option<ComplexMatrix>,
}

/// Polar decomposition through the SVD.
///
/// With `complete` set, the kernel `N(A)` is mapped onto `N(A*)` by pairing the
/// trailing right and left singular vectors in index order. That requires
/// `dim N(A) = dim N(A*)`, i.e. a square matrix.
pub fn polar_decompose(
    a: &ComplexMatrix,
    tol: &ToleranceConfig,
    complete: bool,
) -> Result<PolarFactors> {
    let (m, n) = (a.nrows(), a.ncols());
    let dec = svd(a, tol.rank_rtol)?;
    let k = dec.rank;
    if complete && m != n {
        return Err(Error::CompletionImpossible {
            kernel: n - k,
            cokernel: m - k,
        });
    }
    let partial_isometry = dec.range_basis() * dec.coimage_basis().adjoint();
    let positive_factor = gram_root(&dec, n, |s| s);
    let unitary_completion = complete.then(|| &dec.u * dec.v.adjoint());
    Ok(PolarFactors {
        partial_isometry,
        positive_factor,
        unitary_completion,
    })
}

/// Orthonormal basis of the numerical kernel (singular values at most
/// `rank_rtol · σ_max`), taken from the right singular vectors with the
/// largest index first.
pub fn null_space_basis(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    kernel_columns(svd(a, tol.rank_rtol)?, a.ncols())
}

/// [`null_space_basis`] for singular values at most an absolute `floor`.
pub fn null_space_basis_with_floor(a: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    kernel_columns(svd_with_floor(a, floor)?, a.ncols())
}

fn kernel_columns(dec: Svd, n: usize) -> Result<ComplexMatrix> {
    let k = dec.rank;
    let mut basis = Mat::from_fn(n, n - k, |i, j| dec.v[(i, n - 1 - j)]);
    normalize_columns(&mut basis);
    Ok(basis)
}

/// Orthogonal projector onto the span of eigenvectors of Hermitian `h` whose
/// eigenvalue is strictly above `floor`.
pub fn range_projector(h: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(h)?;
    Ok(eig.map(|l| if l > floor { 1.0 } else { 0.0 }))
}

/// Loewner order test `A ≥ B`: smallest eigenvalue of `A - B` at least `psd_tol`.
pub fn loewner_geq(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<bool> {
    ensure_hermitian(a, tol)?;
    ensure_hermitian(b, tol)?;
    if a.nrows() != b.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "loewner comparison of {}x{} with {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let eig = hermitian_eigen(&(a - b))?;
    Ok(eig.min() >= tol.psd_tol)
}
