//! Dense complex matrices with Hermitian, positive-definite and contraction
//! invariants enforced at construction.

mod json;
mod random;
mod spectral;

pub use json::{MatrixJson, MatrixList};
pub use random::{
    random_contraction_tuple, random_contraction_tuple_with, random_hermitian, random_hermitian_with, random_pd,
    random_pd_with, random_unitary_with, RngSeed, TrialRng,
};
pub use spectral::{
    matrix_exp, matrix_function, matrix_log, matrix_power, operator_norm, spectral_decompose, SpectralDecomposition,
};

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Relative asymmetry tolerated when a matrix is accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default lower bound on the spectrum of a positive-definite matrix.
pub const PD_FLOOR: f64 = 1e-10;
/// Slack on the operator norm of a contraction.
pub const CONTRACTION_TOL: f64 = 1e-10;

pub(crate) type CMat<T> = DMatrix<Complex<T>>;

pub(crate) fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub(crate) fn max_abs_diff<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).modulus()))
}

fn all_finite<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| z.re.is_finite_value() && z.im.is_finite_value())
}

/// `(M + M*) / 2`. The diagonal becomes exactly real and idempotent on
/// matrices that are already exactly Hermitian.
fn symmetrize<T: Real>(m: &CMat<T>) -> CMat<T> {
    let n = m.nrows();
    let half = T::lit(0.5);
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(m[(i, i)].re, T::zero())
        } else {
            (m[(i, j)] + m[(j, i)].conj()).scale(half)
        }
    })
}

/// Rectangular dense complex matrix with finite entries and at least one row
/// and one column.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    data: CMat<T>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(data: CMat<T>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if !all_finite(&data) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { data })
    }

    /// Builds a matrix from entries listed in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Self::new(CMat::from_row_iterator(rows, cols, entries))
    }

    /// Builds a real-valued matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[T]) -> Result<Self> {
        Self::from_row_major(
            rows,
            cols,
            entries.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: CMat::identity(n, n),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: CMat::zeros(rows, cols),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn as_matrix(&self) -> &CMat<T> {
        &self.data
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, t: T) -> Self {
        Self {
            data: self.data.map(|z| z.scale(t)),
        }
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<T> {
        operator_norm(self)
    }

    /// Fails with [`Error::NotAContraction`] when the operator norm exceeds
    /// `1 + CONTRACTION_TOL`.
    pub fn ensure_contraction(&self) -> Result<()> {
        let norm = self.operator_norm()?;
        if norm > T::one() + T::lit(CONTRACTION_TOL) {
            return Err(Error::NotAContraction {
                norm: norm.as_f64(),
                tolerance: CONTRACTION_TOL,
            });
        }
        Ok(())
    }
}

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction always stores `(M + M*) / 2`, so round-off asymmetry never
/// survives into downstream computations.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian<T: Real> {
    data: CMat<T>,
}

impl<T: Real> Hermitian<T> {
    /// Accepts `m` if its asymmetry is within [`HERMITIAN_TOL`], relative to
    /// `1 + max |m_ij|`.
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        let data = m.into_matrix();
        if data.nrows() != data.ncols() {
            return Err(Error::Dimension(format!(
                "Hermitian matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let asymmetry = max_abs_diff(&data, &data.adjoint());
        let tolerance = T::lit(HERMITIAN_TOL) * (T::one() + max_abs(&data));
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry: asymmetry.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        Ok(Self {
            data: symmetrize(&data),
        })
    }

    /// Symmetrizes a computed result whose Hermitian character is guaranteed
    /// analytically.
    pub(crate) fn from_computed(data: CMat<T>) -> Result<Self> {
        debug_assert_eq!(data.nrows(), data.ncols());
        if !all_finite(&data) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self {
            data: symmetrize(&data),
        })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Result<Self> {
        let n = diag.len();
        let data = CMat::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(diag[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        Self::new(ComplexMatrix::new(data)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: CMat::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: CMat::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &CMat<T> {
        &self.data
    }

    pub fn to_complex(&self) -> ComplexMatrix<T> {
        ComplexMatrix {
            data: self.data.clone(),
        }
    }

    /// Diagonal sum; exactly real by construction.
    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.data[(i, i)].re)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn scale(&self, t: T) -> Self {
        Self {
            data: self.data.map(|z| z.scale(t)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn combination(&self, lambda: T, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        let mu = T::one() - lambda;
        let data = self.data.zip_map(&other.data, |x, y| x.scale(lambda) + y.scale(mu));
        Ok(Self { data })
    }

    /// `K* self K` for a `dim x c` matrix `K`.
    pub fn congruence(&self, k: &ComplexMatrix<T>) -> Result<Self> {
        if k.rows() != self.dim() {
            return Err(Error::Dimension(format!(
                "congruence by a {}x{} matrix on a {}x{} matrix",
                k.rows(),
                k.cols(),
                self.dim(),
                self.dim()
            )));
        }
        Self::from_computed(k.as_matrix().adjoint() * &self.data * k.as_matrix())
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition<T>> {
        spectral_decompose(self)
    }

    /// Frobenius inner product `Re Tr(self * other)`.
    pub fn inner(&self, other: &Self) -> Result<T> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |acc, (x, y)| acc + (x.conj() * y).re))
    }
}

pub(crate) fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("{a}x{a} vs {b}x{b}")));
    }
    Ok(())
}

/// Hermitian matrix whose smallest eigenvalue exceeds a positive floor.
///
/// The spectral decomposition computed during validation is kept, so `log`,
/// powers and traces of matrix functions reuse it.
#[derive(Clone, Debug)]
pub struct PositiveDefinite<T: Real> {
    base: Hermitian<T>,
    spectrum: SpectralDecomposition<T>,
}

impl<T: Real> PartialEq for PositiveDefinite<T> {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl<T: Real> PositiveDefinite<T> {
    pub fn new(base: Hermitian<T>) -> Result<Self> {
        Self::with_floor(base, T::lit(PD_FLOOR))
    }

    pub fn with_floor(base: Hermitian<T>, floor: T) -> Result<Self> {
        let spectrum = spectral_decompose(&base)?;
        let min_eigenvalue = spectrum.min_eigenvalue();
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(min_eigenvalue > floor) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min_eigenvalue.as_f64(),
                floor: floor.as_f64(),
            });
        }
        Ok(Self { base, spectrum })
    }

    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        Self::new(Hermitian::from_real_diagonal(diag)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Hermitian::identity(n)).expect("identity is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn as_hermitian(&self) -> &Hermitian<T> {
        &self.base
    }

    pub fn into_hermitian(self) -> Hermitian<T> {
        self.base
    }

    pub fn as_matrix(&self) -> &CMat<T> {
        self.base.as_matrix()
    }

    pub fn spectral(&self) -> &SpectralDecomposition<T> {
        &self.spectrum
    }

    pub fn min_eigenvalue(&self) -> T {
        self.spectrum.min_eigenvalue()
    }

    pub fn trace(&self) -> T {
        self.base.trace()
    }

    pub fn log(&self) -> Hermitian<T> {
        self.spectrum
            .map(|x| x.ln())
            .expect("logarithm is finite on a positive spectrum")
    }

    /// `A^p` for `p` in `[0, 1]`.
    pub fn power(&self, p: T) -> Result<PositiveDefinite<T>> {
        matrix_power(self, p)
    }

    /// `Tr(A log A)`, evaluated on the spectrum.
    pub fn entropy_trace(&self) -> T {
        self.spectrum
            .eigenvalues()
            .iter()
            .fold(T::zero(), |acc, &x| acc + x * x.ln())
    }

    /// `lambda * self + (1 - lambda) * other` for `lambda` in `[0, 1]`.
    pub fn combination(&self, lambda: T, other: &Self) -> Result<Self> {
        Self::new(self.base.combination(lambda, &other.base)?)
    }

    pub fn scale(&self, t: T) -> Result<Self> {
        Self::new(self.base.scale(t))
    }
}

/// Tuple of `m x n` blocks `H_1, ..., H_k` with `sum H_i* H_i <= I_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionTuple<T: Real> {
    blocks: Vec<ComplexMatrix<T>>,
    m: usize,
    n: usize,
    sum_is_identity: bool,
}

impl<T: Real> ContractionTuple<T> {
    /// Validates block shapes and the contraction condition; with
    /// `sum_is_identity` also requires `sum H_i* H_i = I_n` to within
    /// [`CONTRACTION_TOL`].
    pub fn new(blocks: Vec<ComplexMatrix<T>>, sum_is_identity: bool) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Dimension("contraction tuple needs at least one block".into()))?;
        let (m, n) = (first.rows(), first.cols());
        if let Some(bad) = blocks.iter().find(|b| b.rows() != m || b.cols() != n) {
            return Err(Error::Dimension(format!(
                "blocks must all be {m}x{n}, found {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        let tuple = Self {
            blocks,
            m,
            n,
            sum_is_identity,
        };
        let gram = tuple.gram();
        let top = *gram
            .spectral()?
            .eigenvalues()
            .iter()
            .last()
            .expect("non-empty spectrum");
        if top > T::one() + T::lit(CONTRACTION_TOL) {
            return Err(Error::NotAContraction {
                norm: top.max(T::zero()).sqrt().as_f64(),
                tolerance: CONTRACTION_TOL,
            });
        }
        if sum_is_identity {
            let deviation = max_abs_diff(gram.as_matrix(), &CMat::identity(n, n));
            if deviation > T::lit(CONTRACTION_TOL) {
                return Err(Error::NotAnIsometry {
                    deviation: deviation.as_f64(),
                });
            }
        }
        Ok(tuple)
    }

    /// A single contraction `H` as a tuple with `k = 1`.
    pub fn single(h: ComplexMatrix<T>) -> Result<Self> {
        Self::new(vec![h], false)
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sum_is_identity(&self) -> bool {
        self.sum_is_identity
    }

    pub fn blocks(&self) -> &[ComplexMatrix<T>] {
        &self.blocks
    }

    /// `sum_i H_i* H_i`.
    pub fn gram(&self) -> Hermitian<T> {
        let mut acc = CMat::zeros(self.n, self.n);
        for h in &self.blocks {
            acc += h.as_matrix().adjoint() * h.as_matrix();
        }
        Hermitian::from_computed(acc).expect("finite blocks give a finite Gram matrix")
    }

    /// Every block scaled by `t`; the identity flag is dropped unless `t == 1`.
    pub fn scale(&self, t: T) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| b.scale(t)).collect();
        Self::new(blocks, self.sum_is_identity && t == T::one())
    }
}
