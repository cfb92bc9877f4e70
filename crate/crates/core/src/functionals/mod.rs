//! Trace functionals of Hermitian and positive-definite matrices.
//!
//! Shape convention for a contraction `H` paired with two arguments: `H` has
//! as many rows as the first argument and as many columns as the second, so
//! `H* A H` lives on the space of `B` in the reduced entropy and
//! `H* log(A) H` lives on the space of `L` in the exponential functionals.

mod instance;

pub use instance::{Arguments, BlockLift, InstanceFile, MultiInstance};

use crate::error::{Error, Result};
use crate::matrix::{matrix_power, same_dim, CMat, ComplexMatrix, Hermitian, PositiveDefinite};
use crate::scalar::Real;

/// Largest imaginary part of a trace tolerated before it is discarded,
/// relative to `1 + |real part|`. Lower precisions use `1e3 * epsilon`
/// when that is larger.
pub const TRACE_IMAG_TOL: f64 = 1e-10;

/// Real part of `Tr m`, rejecting a non-negligible imaginary part.
pub(crate) fn real_trace<T: Real>(m: &CMat<T>) -> Result<T> {
    let t = m.trace();
    if !(t.re.is_finite_value() && t.im.is_finite_value()) {
        return Err(Error::NumericalInconsistency("trace is not finite".into()));
    }
    let tol = T::lit(TRACE_IMAG_TOL).max(T::lit(1e3) * T::default_epsilon());
    if t.im.abs() > tol * (T::one() + t.re.abs()) {
        return Err(Error::NumericalInconsistency(format!(
            "trace of a Hermitian product has imaginary part {:e}",
            t.im
        )));
    }
    Ok(t.re)
}

/// `Tr(P Q)` without forming the product.
pub(crate) fn trace_product<T: Real>(p: &CMat<T>, q: &CMat<T>) -> Result<T> {
    debug_assert_eq!(p.ncols(), q.nrows());
    debug_assert_eq!(p.nrows(), q.ncols());
    let mut acc = crate::scalar::Complex::new(T::zero(), T::zero());
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            acc += p[(i, j)] * q[(j, i)];
        }
    }
    real_trace(&CMat::from_element(1, 1, acc))
}

fn check_shape<T: Real>(h: &ComplexMatrix<T>, rows: usize, cols: usize) -> Result<()> {
    if h.rows() != rows || h.cols() != cols {
        return Err(Error::Dimension(format!(
            "contraction is {}x{}, expected {rows}x{cols}",
            h.rows(),
            h.cols()
        )));
    }
    Ok(())
}

/// `Tr(A log A) - Tr(C log B) - Tr A + Tr B` where `C` is `A` itself for the
/// relative entropy and `H* A H` for the reduced one.
fn entropy_with_cross_term<T: Real>(a: &PositiveDefinite<T>, b: &PositiveDefinite<T>, cross: &CMat<T>) -> Result<T> {
    let cross_log = trace_product(cross, b.log().as_matrix())?;
    Ok(a.entropy_trace() - cross_log - a.trace() + b.trace())
}

/// `S(A|B) = Tr(A log A - A log B - A + B)`.
pub fn relative_entropy<T: Real>(a: &PositiveDefinite<T>, b: &PositiveDefinite<T>) -> Result<T> {
    same_dim(a.dim(), b.dim())?;
    entropy_with_cross_term(a, b, a.as_matrix())
}

/// `S_H(A|B) = Tr(A log A - H* A H log B - A + B)` for a contraction `H`
/// mapping the space of `B` into the space of `A`.
pub fn reduced_relative_entropy<T: Real>(
    a: &PositiveDefinite<T>,
    b: &PositiveDefinite<T>,
    h: &ComplexMatrix<T>,
) -> Result<T> {
    check_shape(h, a.dim(), b.dim())?;
    h.ensure_contraction()?;
    let hm = h.as_matrix();
    let cross = hm.adjoint() * a.as_matrix() * hm;
    entropy_with_cross_term(a, b, &cross)
}

/// `Tr(H B^p H* A^(1-p))` for `p` in `[0, 1]`.
pub fn lieb_trace<T: Real>(a: &PositiveDefinite<T>, b: &PositiveDefinite<T>, h: &ComplexMatrix<T>, p: T) -> Result<T> {
    check_shape(h, a.dim(), b.dim())?;
    let bp = matrix_power(b, p)?;
    let aq = matrix_power(a, T::one() - p)?;
    let hm = h.as_matrix();
    trace_product(&(hm * bp.as_matrix() * hm.adjoint()), aq.as_matrix())
}

/// Derivative of [`lieb_trace`] in `p` at `p = 0`:
/// `Tr(H log(B) H* A) - Tr(H H* A log A)`.
pub fn lieb_trace_derivative_at_zero<T: Real>(
    a: &PositiveDefinite<T>,
    b: &PositiveDefinite<T>,
    h: &ComplexMatrix<T>,
) -> Result<T> {
    check_shape(h, a.dim(), b.dim())?;
    let hm = h.as_matrix();
    let first = trace_product(&(hm * b.log().as_matrix() * hm.adjoint()), a.as_matrix())?;
    let second = trace_product(&(hm * hm.adjoint()), &(a.as_matrix() * a.log().as_matrix()))?;
    Ok(first - second)
}

/// `Tr exp(M)` from the spectrum of `M`.
pub fn trace_exp<T: Real>(m: &Hermitian<T>) -> Result<T> {
    m.spectral()?.trace_of(|x| x.exp())
}

/// `L + H* log(A) H`.
fn exponent<T: Real>(a: &PositiveDefinite<T>, l: &Hermitian<T>, h: &ComplexMatrix<T>) -> Result<Hermitian<T>> {
    check_shape(h, a.dim(), l.dim())?;
    l.add(&a.log().congruence(h)?)
}

/// `phi(A) = Tr exp(L + H* log(A) H)` with `A` `m x m`, `H` an `m x n`
/// contraction and `L` `n x n`.
pub fn trace_exp_functional<T: Real>(a: &PositiveDefinite<T>, l: &Hermitian<T>, h: &ComplexMatrix<T>) -> Result<T> {
    let m = exponent(a, l, h)?;
    h.ensure_contraction()?;
    trace_exp(&m)
}

/// Closed-form maximizer `exp(L + H* log(A) H)` of [`phi_objective`].
pub fn phi_maximizer<T: Real>(
    a: &PositiveDefinite<T>,
    l: &Hermitian<T>,
    h: &ComplexMatrix<T>,
) -> Result<PositiveDefinite<T>> {
    crate::matrix::matrix_exp(&exponent(a, l, h)?)
}

/// `L + sum_i H_i* X_i H_i` for per-block Hermitian `X_i`.
fn multi_exponent<T: Real>(inst: &MultiInstance<T>, xs: &[Hermitian<T>]) -> Result<Hermitian<T>> {
    let mut acc = inst.l().clone();
    for (x, h) in xs.iter().zip(inst.h().blocks()) {
        acc = acc.add(&x.congruence(h)?)?;
    }
    Ok(acc)
}

fn log_list<T: Real>(inst: &MultiInstance<T>) -> Result<Vec<Hermitian<T>>> {
    Ok(inst.a_list()?.iter().map(PositiveDefinite::log).collect())
}

/// `Tr exp(L + sum_i H_i* log(A_i) H_i)`.
pub fn multi_trace_exp<T: Real>(inst: &MultiInstance<T>) -> Result<T> {
    trace_exp(&multi_exponent(inst, &log_list(inst)?)?)
}

pub fn block_lift<T: Real>(inst: &MultiInstance<T>) -> Result<BlockLift<T>> {
    BlockLift::from_instance(inst)
}

fn exp_hermitian<T: Real>(m: &Hermitian<T>) -> Result<Hermitian<T>> {
    m.spectral()?.map(|x| x.exp())
}

/// Left side of the exponential bound: `Tr exp(L + sum_i H_i* B_i H_i)`.
pub fn gt_jensen_lhs<T: Real>(inst: &MultiInstance<T>) -> Result<T> {
    trace_exp(&multi_exponent(inst, inst.b_list()?)?)
}

/// `Tr(exp(L) sum_i H_i* exp(B_i) H_i)`.
pub fn gt_jensen_rhs<T: Real>(inst: &MultiInstance<T>) -> Result<T> {
    let n = inst.h().n();
    let mut mixed = CMat::<T>::zeros(n, n);
    for (b, h) in inst.b_list()?.iter().zip(inst.h().blocks()) {
        mixed += exp_hermitian(b)?.congruence(h)?.as_matrix();
    }
    trace_product(exp_hermitian(inst.l())?.as_matrix(), &mixed)
}

/// Bound obtained by applying Golden-Thompson first:
/// `Tr(exp(L) exp(sum_i H_i* B_i H_i))`.
pub fn gt_route_bound<T: Real>(inst: &MultiInstance<T>) -> Result<T> {
    let mut inner = Hermitian::zeros(inst.h().n());
    for (b, h) in inst.b_list()?.iter().zip(inst.h().blocks()) {
        inner = inner.add(&b.congruence(h)?)?;
    }
    trace_product(exp_hermitian(inst.l())?.as_matrix(), exp_hermitian(&inner)?.as_matrix())
}

/// `Tr(X log B - X log X + X)`, maximized over `X > 0` at `X = B`.
pub fn gibbs_objective<T: Real>(x: &PositiveDefinite<T>, b: &PositiveDefinite<T>) -> Result<T> {
    same_dim(x.dim(), b.dim())?;
    Ok(trace_product(x.as_matrix(), b.log().as_matrix())? - x.entropy_trace() + x.trace())
}

/// `-S_{H*}(X|A) + Tr(X L + A)` for the `m x n` contraction `H` of
/// [`trace_exp_functional`]; `X` and `L` are `n x n`, `A` is `m x m`.
pub fn phi_objective<T: Real>(
    x: &PositiveDefinite<T>,
    a: &PositiveDefinite<T>,
    l: &Hermitian<T>,
    h: &ComplexMatrix<T>,
) -> Result<T> {
    same_dim(x.dim(), l.dim())?;
    let s = reduced_relative_entropy(x, a, &h.adjoint())?;
    Ok(-s + trace_product(x.as_matrix(), l.as_matrix())? + a.trace())
}

#[cfg(test)]
mod tests;
