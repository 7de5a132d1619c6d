//! Dense complex linear algebra.
//!
//! Everything else in the crate is built on [`ComplexMatrix`], a thin,
//! finite-checked wrapper over `nalgebra::DMatrix<Complex64>`. Hamiltonians
//! are exponentiated through their Hermitian eigendecomposition, so the same
//! spectrum can be reused for many evolution angles.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on the row count of any dense operator (2^14).
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Environment variable overriding [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "DFSFORGE_DIM_CAP";

/// Relative Hermiticity tolerance enforced by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default relative singular-value threshold for [`nullspace_basis`].
pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The active dimension cap, read once from `DFSFORGE_DIM_CAP`.
pub fn dim_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(DIM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_DIM_CAP)
    })
}

pub(crate) fn check_dim(requested: usize) -> Result<()> {
    let cap = dim_cap();
    if requested > cap {
        return Err(Error::DimensionCap { requested, cap });
    }
    Ok(())
}

/// A dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Convenience constructor from real rows, mostly for literals in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(rows.len(), cols, entries)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if let Some(idx) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            // column-major storage
            let (row, col) = (idx % m.nrows(), idx / m.nrows());
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_dmatrix_unchecked(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self(DMatrix::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj()))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "distance: shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_F ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_residual() <= tol
    }

    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        Self(prod).distance(&Self::identity(self.rows()))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "mul_vec: dimension mismatch");
        (&self.0 * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    /// `self^n` by binary exponentiation.
    pub fn pow(&self, mut n: usize) -> Self {
        assert!(self.is_square(), "pow: matrix must be square");
        let mut result = DMatrix::identity(self.rows(), self.cols());
        let mut base = self.0.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        Self(result)
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        Self(&a.0 * &b.0 - &b.0 * &a.0)
    }

    /// `ab + ba`.
    pub fn anticommutator(a: &Self, b: &Self) -> Self {
        Self(&a.0 * &b.0 + &b.0 * &a.0)
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        self.0.column(col).iter().copied().collect()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(c)) => {
            check_dim(r.max(c))?;
        }
        _ => {
            return Err(Error::DimensionCap {
                requested: usize::MAX,
                cap: dim_cap(),
            })
        }
    }
    Ok(ComplexMatrix(a.0.kronecker(&b.0)))
}

/// A Hermitian matrix, checked at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if `‖m − m†‖_F ≤ 1e-12·‖m‖_F`; the stored matrix is
    /// symmetrized.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let norm = m.frobenius_norm();
        let residual = m.hermiticity_residual();
        if residual > HERMITIAN_TOL * norm {
            return Err(Error::NotHermitian {
                residual: if norm > 0.0 { residual / norm } else { residual },
            });
        }
        let sym = (&m + &m.adjoint()).scale(C64::new(0.5, 0.0));
        Ok(Self(sym))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(C64::new(factor, 0.0)))
    }

    /// Real linear combination of Hermitian matrices.
    pub fn linear_combination(terms: &[(f64, &HermitianMatrix)]) -> Result<Self> {
        let (first, rest) = terms
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let mut acc = first.1.0.scale(C64::new(first.0, 0.0));
        for (w, h) in rest {
            if h.dim() != acc.rows() {
                return Err(Error::Shape("linear combination of mismatched dims".into()));
            }
            acc = &acc + &h.0.scale(C64::new(*w, 0.0));
        }
        Ok(Self(acc))
    }

    pub fn spectral(&self) -> Result<Spectral> {
        Spectral::new(self)
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.0
    }
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectral {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Spectral {
    pub fn new(h: &HermitianMatrix) -> Result<Self> {
        let m = h.0.0.clone();
        let scale = h.0.frobenius_norm().max(1.0);
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or(Error::Numeric {
            what: "Hermitian eigendecomposition",
            residual: f64::NAN,
        })?;
        let spectral = Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        };
        let residual = spectral.reconstruct().distance(&h.0);
        if !residual.is_finite() || residual > 1e-10 * scale {
            return Err(Error::Numeric {
                what: "Hermitian eigendecomposition",
                residual,
            });
        }
        Ok(spectral)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> ComplexMatrix {
        ComplexMatrix(self.vectors.clone())
    }

    fn apply_function(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        ComplexMatrix(scaled * self.vectors.adjoint())
    }

    fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|l| C64::new(l, 0.0))
    }

    /// `exp(iθH)`.
    pub fn expm(&self, theta: f64) -> ComplexMatrix {
        self.apply_function(|l| (I * theta * l).exp())
    }
}

/// `exp(iθH)` via the Hermitian eigendecomposition of `h`.
pub fn hermitian_expm(h: &HermitianMatrix, theta: f64) -> Result<ComplexMatrix> {
    Ok(h.spectral()?.expm(theta))
}

/// General matrix exponential `exp(m)` by scaling and squaring with a
/// truncated Taylor series. Only used where the generator is not Hermitian
/// (complex stabilizer parameters).
pub fn expm_general(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape("expm of a non-square matrix".into()));
    }
    let one_norm = (0..m.cols())
        .map(|c| m.0.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if one_norm > 0.5 {
        (one_norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = &m.0 / C64::new(2f64.powi(squarings as i32), 0.0);
    let n = m.rows();
    let mut term: DMatrix<C64> = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = (&term * &a) / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    ComplexMatrix::from_dmatrix(sum).map_err(|_| Error::Numeric {
        what: "matrix exponential",
        residual: f64::INFINITY,
    })
}

/// Orthonormal basis of the nullspace of `m`.
///
/// A right singular vector belongs to the nullspace when its singular value
/// is at most `rel_tol · σ_max` (every singular value counts when `m = 0`).
/// Requires `rows ≥ cols`, so the thin SVD carries the full right basis.
pub fn nullspace_basis(m: &ComplexMatrix, rel_tol: f64) -> Result<Vec<Vec<C64>>> {
    if m.rows() < m.cols() {
        return Err(Error::Shape(format!(
            "nullspace_basis needs rows >= cols, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(Error::InvalidArgument("nullspace tolerance must be > 0".into()));
    }
    let svd = SVD::try_new(m.0.clone(), false, true, f64::EPSILON, 0).ok_or(Error::Numeric {
        what: "singular value decomposition",
        residual: f64::NAN,
    })?;
    let v_t = svd.v_t.ok_or(Error::Numeric {
        what: "singular value decomposition",
        residual: f64::NAN,
    })?;
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = rel_tol * sigma_max;
    let basis = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= threshold)
        .map(|(k, _)| v_t.row(k).iter().map(|z| z.conj()).collect())
        .collect();
    Ok(basis)
}

/// Stacks matrices with equal column counts vertically.
pub fn vstack(blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let cols = blocks
        .first()
        .ok_or_else(|| Error::InvalidArgument("vstack of nothing".into()))?
        .cols();
    if blocks.iter().any(|b| b.cols() != cols) {
        return Err(Error::Shape("vstack: column counts differ".into()));
    }
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        out.rows_mut(r0, b.rows()).copy_from(&b.0);
        r0 += b.rows();
    }
    Ok(ComplexMatrix(out))
}

/// Pauli matrices and other fixed small operators.
pub mod paulis {
    use super::*;

    pub fn identity2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix(DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]))
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix(DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]))
    }

    /// The two-qubit SWAP.
    pub fn swap() -> ComplexMatrix {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 2)] = ONE;
        m[(2, 1)] = ONE;
        m[(3, 3)] = ONE;
        ComplexMatrix(m)
    }
}
