//! Seeded generators for random Hermitian, positive-definite and contraction
//! instances.

use nalgebra::ComplexField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{CMat, ComplexMatrix, ContractionTuple, Hermitian, PositiveDefinite};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Generator used for every random instance in the crate.
pub type TrialRng = ChaCha8Rng;

/// Seed for the instance generators. Equal seeds give bit-identical output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> TrialRng {
        TrialRng::seed_from_u64(self.0)
    }

    /// Independent child seed for stream `index`, a pure function of
    /// `(self, index)`.
    pub fn derive(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)),
        ))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * s), T::lit(im * s))
    })
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::Dimension(format!("dimensions must be >= 1, got {dims:?}")));
    }
    Ok(())
}

/// `rows x cols` matrix (`rows >= cols`) with orthonormal columns: the Q
/// factor of a complex Gaussian matrix with the phases of `diag(R)` moved
/// into Q, so the distribution is Haar.
fn isometry<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    debug_assert!(rows >= cols);
    let qr = complex_gaussian::<T, R>(rows, cols, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let d = r[(j, j)];
        let norm = d.modulus();
        let phase = if norm > T::zero() {
            d.unscale(norm)
        } else {
            Complex::new(T::one(), T::zero())
        };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

pub fn random_unitary_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix<T>> {
    check_dims(&[dim])?;
    ComplexMatrix::new(isometry(dim, dim, rng))
}

/// Hermitian matrix `scale * (G + G*) / 2` for a complex Gaussian `G`.
pub fn random_hermitian_with<T: Real, R: Rng + ?Sized>(dim: usize, scale: T, rng: &mut R) -> Result<Hermitian<T>> {
    check_dims(&[dim])?;
    let g = complex_gaussian::<T, R>(dim, dim, rng);
    let half = T::lit(0.5) * scale;
    Hermitian::from_computed((&g + g.adjoint()).map(|z| z.scale(half)))
}

pub fn random_hermitian<T: Real>(dim: usize, scale: T, seed: RngSeed) -> Result<Hermitian<T>> {
    random_hermitian_with(dim, scale, &mut seed.rng())
}

/// `U diag(lambda) U*` with `lambda_i` uniform in `[lo, hi]` and Haar `U`.
pub fn random_pd_with<T: Real, R: Rng + ?Sized>(
    dim: usize,
    eig_range: [T; 2],
    rng: &mut R,
) -> Result<PositiveDefinite<T>> {
    check_dims(&[dim])?;
    let [lo, hi] = eig_range;
    if !(lo > T::zero() && lo <= hi) {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue range [{lo}, {hi}] must satisfy 0 < lo <= hi"
        )));
    }
    let (lo_f, hi_f) = (lo.as_f64(), hi.as_f64());
    let eigenvalues: Vec<T> = (0..dim)
        .map(|_| T::lit(lo_f + (hi_f - lo_f) * rng.random::<f64>()))
        .collect();
    let mut u = isometry::<T, R>(dim, dim, rng);
    let v = u.adjoint();
    for (j, &w) in eigenvalues.iter().enumerate() {
        u.column_mut(j).iter_mut().for_each(|z| *z = z.scale(w));
    }
    PositiveDefinite::new(Hermitian::from_computed(u * v)?)
}

pub fn random_pd<T: Real>(dim: usize, eig_range: [T; 2], seed: RngSeed) -> Result<PositiveDefinite<T>> {
    random_pd_with(dim, eig_range, &mut seed.rng())
}

/// Random `k`-tuple of `m x n` blocks.
///
/// With `sum_is_identity` the blocks are the row-slices of a `(k m) x n`
/// isometry, so `sum H_i* H_i = I_n`; this needs `k m >= n`. Otherwise the
/// stacked matrix is additionally scaled by a uniform factor in `(0, 1)`.
pub fn random_contraction_tuple_with<T: Real, R: Rng + ?Sized>(
    k: usize,
    m: usize,
    n: usize,
    sum_is_identity: bool,
    rng: &mut R,
) -> Result<ContractionTuple<T>> {
    check_dims(&[k, m, n])?;
    let rows = k * m;
    if sum_is_identity && rows < n {
        return Err(Error::Dimension(format!(
            "an isometry needs k*m >= n, got k={k}, m={m}, n={n}"
        )));
    }
    let mut stacked: CMat<T> = if rows >= n {
        isometry(rows, n, rng)
    } else {
        let g = complex_gaussian::<T, R>(rows, n, rng);
        let norm = super::operator_norm(&ComplexMatrix::new(g.clone())?)?;
        g.map(|z| z.unscale(norm))
    };
    if !sum_is_identity {
        let u = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break T::lit(u);
            }
        };
        stacked.iter_mut().for_each(|z| *z = z.scale(u));
    }
    let blocks = (0..k)
        .map(|i| ComplexMatrix::new(stacked.rows(i * m, m).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    ContractionTuple::new(blocks, sum_is_identity)
}

pub fn random_contraction_tuple<T: Real>(
    k: usize,
    m: usize,
    n: usize,
    sum_is_identity: bool,
    seed: RngSeed,
) -> Result<ContractionTuple<T>> {
    random_contraction_tuple_with(k, m, n, sum_is_identity, &mut seed.rng())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{max_abs_diff, operator_norm};

    #[test]
    fn isometry_tuple_sums_to_identity() {
        let t = random_contraction_tuple::<f64>(2, 2, 2, true, RngSeed(9)).unwrap();
        let dev = max_abs_diff(t.gram().as_matrix(), &CMat::identity(2, 2));
        assert!(dev <= 1e-12, "{dev}");
        for (k, m, n) in [(3, 2, 2), (1, 4, 3), (4, 1, 4), (2, 3, 5)] {
            let t = random_contraction_tuple::<f64>(k, m, n, true, RngSeed(1)).unwrap();
            assert!(max_abs_diff(t.gram().as_matrix(), &CMat::identity(n, n)) <= 1e-12);
        }
    }

    #[test]
    fn isometry_needs_enough_rows() {
        assert!(matches!(
            random_contraction_tuple::<f64>(1, 2, 3, true, RngSeed(0)),
            Err(Error::Dimension(_))
        ));
        // a strict contraction is still available
        let t = random_contraction_tuple::<f64>(1, 2, 3, false, RngSeed(0)).unwrap();
        assert!(operator_norm(&t.blocks()[0]).unwrap() < 1.0);
    }

    #[test]
    fn strict_tuple_is_scaled_below_one() {
        let t = random_contraction_tuple::<f64>(3, 2, 2, false, RngSeed(4)).unwrap();
        let top = t.gram().spectral().unwrap().max_eigenvalue();
        assert!(top < 1.0);
        assert!(!t.sum_is_identity());
    }

    #[test]
    fn pd_eigenvalues_in_range() {
        for s in 0..20 {
            let a = random_pd::<f64>(3, [0.5, 2.0], RngSeed(s)).unwrap();
            let spec = a.spectral();
            assert!(spec.min_eigenvalue() >= 0.5 - 1e-12);
            assert!(spec.max_eigenvalue() <= 2.0 + 1e-12);
        }
        assert!(random_pd::<f64>(2, [0.0, 1.0], RngSeed(0)).is_err());
        assert!(random_pd::<f64>(0, [1.0, 2.0], RngSeed(0)).is_err());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = random_pd::<f64>(4, [0.1, 5.0], RngSeed(77)).unwrap();
        let b = random_pd::<f64>(4, [0.1, 5.0], RngSeed(77)).unwrap();
        assert_eq!(a.as_matrix(), b.as_matrix());
        let c = random_pd::<f64>(4, [0.1, 5.0], RngSeed(78)).unwrap();
        assert_ne!(a.as_matrix(), c.as_matrix());
        let h1 = random_contraction_tuple::<f64>(2, 3, 2, false, RngSeed(5)).unwrap();
        let h2 = random_contraction_tuple::<f64>(2, 3, 2, false, RngSeed(5)).unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary_with::<f64, _>(5, &mut RngSeed(2).rng()).unwrap();
        let prod = u.as_matrix() * u.as_matrix().adjoint();
        assert!(max_abs_diff(&prod, &CMat::identity(5, 5)) <= 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        let s = RngSeed(7);
        assert_ne!(s.derive(0), s.derive(1));
        assert_eq!(s.derive(3), RngSeed(7).derive(3));
    }
}
