use nalgebra::{DVector, SymmetricEigen};

use super::{CMat, ComplexMatrix, Hermitian, PositiveDefinite};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS_PER_DIM: usize = 1000;

/// Eigen-decomposition `M = U diag(lambda) U*` of a Hermitian matrix, with the
/// eigenvalues in ascending order and the eigenvectors as the columns of `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition<T: Real> {
    eigenvalues: DVector<T>,
    eigenvectors: CMat<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMat<T> {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn max_abs_eigenvalue(&self) -> T {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// `U diag(lambda) U*`.
    pub fn reconstruct(&self) -> CMat<T> {
        self.weighted(self.eigenvalues.as_slice())
    }

    /// `U diag(f(lambda)) U*`, symmetrized. Fails with [`Error::Domain`] at the
    /// first eigenvalue where `f` is not finite.
    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Result<Hermitian<T>> {
        let mut values = Vec::with_capacity(self.eigenvalues.len());
        for &x in self.eigenvalues.iter() {
            let y = f(x);
            if !y.is_finite_value() {
                return Err(Error::Domain { eigenvalue: x.as_f64() });
            }
            values.push(y);
        }
        Hermitian::from_computed(self.weighted(&values))
    }

    /// Sum of `f` over the spectrum, i.e. `Tr f(M)`.
    pub fn trace_of<F: Fn(T) -> T>(&self, f: F) -> Result<T> {
        let mut acc = T::zero();
        for &x in self.eigenvalues.iter() {
            let y = f(x);
            if !y.is_finite_value() {
                return Err(Error::Domain { eigenvalue: x.as_f64() });
            }
            acc += y;
        }
        Ok(acc)
    }

    fn weighted(&self, weights: &[T]) -> CMat<T> {
        let mut scaled = self.eigenvectors.clone();
        for (j, &w) in weights.iter().enumerate() {
            scaled.column_mut(j).iter_mut().for_each(|z| *z = z.scale(w));
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Ascending eigen-decomposition of a Hermitian matrix.
pub fn spectral_decompose<T: Real>(m: &Hermitian<T>) -> Result<SpectralDecomposition<T>> {
    let dim = m.dim();
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), T::default_epsilon(), MAX_SWEEPS_PER_DIM * dim)
        .ok_or(Error::ConvergenceFailure { dim })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("eigenvalues of a finite matrix are not NaN")
    });
    if order.iter().any(|&x| !eig.eigenvalues[x].is_finite_value()) {
        return Err(Error::ConvergenceFailure { dim });
    }
    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = CMat::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `f(M)` through the spectral decomposition of `M`.
pub fn matrix_function<T: Real, F: Fn(T) -> T>(m: &Hermitian<T>, f: F) -> Result<Hermitian<T>> {
    spectral_decompose(m)?.map(f)
}

pub fn matrix_log<T: Real>(a: &PositiveDefinite<T>) -> Hermitian<T> {
    a.log()
}

/// `exp(M)`; fails if the smallest eigenvalue of the result underflows the
/// positive-definite floor.
pub fn matrix_exp<T: Real>(m: &Hermitian<T>) -> Result<PositiveDefinite<T>> {
    PositiveDefinite::new(matrix_function(m, |x| x.exp())?)
}

/// `A^p` for `p` in `[0, 1]`. The endpoints return `I` and `A` exactly.
pub fn matrix_power<T: Real>(a: &PositiveDefinite<T>, p: T) -> Result<PositiveDefinite<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidArgument(format!("power {p} outside [0, 1]")));
    }
    if p == T::zero() {
        return Ok(PositiveDefinite::identity(a.dim()));
    }
    if p == T::one() {
        return Ok(a.clone());
    }
    PositiveDefinite::new(a.spectral().map(|x| x.powf(p))?)
}

/// Largest singular value, from the smaller of the two Gram matrices.
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let a = m.as_matrix();
    let gram = if a.nrows() >= a.ncols() {
        a.adjoint() * a
    } else {
        a * a.adjoint()
    };
    let top = spectral_decompose(&Hermitian::from_computed(gram)?)?.max_eigenvalue();
    Ok(top.max(T::zero()).sqrt())
}
