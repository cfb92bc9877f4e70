//! Seeded instance families, one per check.

use rand::Rng;

use super::config::CheckConfig;
use super::instances::{
    DerivativeInstance, GibbsInstance, GtFamily, GtInstance, HomogeneityInstance, Instance, MultiSegment, PhiSegment,
    RouteInstance, ShSegment,
};
use super::CheckKind;
use crate::error::Result;
use crate::functionals::MultiInstance;
use crate::matrix::{
    matrix_exp, random_contraction_tuple_with, random_hermitian_with, random_pd_with, ComplexMatrix, ContractionTuple,
    Hermitian, PositiveDefinite, TrialRng,
};
use crate::scalar::Real;

/// Weight of the rank-one tilt of `L` in the witness search.
pub const ROUTE_TILT: f64 = 10.0;
/// Upper bound on `||sum H_i* H_i||` for the strict-contraction control.
pub const STRICT_GRAM_BOUND: f64 = 0.9;
/// Scalings applied in the homogeneity check.
pub const HOMOGENEITY_TS: [f64; 3] = [0.5, 2.0, 10.0];

struct Sampler<'a> {
    cfg: &'a CheckConfig,
    rng: TrialRng,
}

impl Sampler<'_> {
    fn pd<T: Real>(&mut self, dim: usize) -> Result<PositiveDefinite<T>> {
        let [lo, hi] = self.cfg.eig_range;
        random_pd_with(dim, [T::lit(lo), T::lit(hi)], &mut self.rng)
    }

    fn pds<T: Real>(&mut self, count: usize, dim: usize) -> Result<Vec<PositiveDefinite<T>>> {
        (0..count).map(|_| self.pd(dim)).collect()
    }

    fn hermitian<T: Real>(&mut self, dim: usize) -> Result<Hermitian<T>> {
        random_hermitian_with(dim, T::lit(self.cfg.hermitian_scale), &mut self.rng)
    }

    fn hermitians<T: Real>(&mut self, count: usize, dim: usize) -> Result<Vec<Hermitian<T>>> {
        (0..count).map(|_| self.hermitian(dim)).collect()
    }

    fn tuple<T: Real>(&mut self, k: usize, m: usize, n: usize, identity: bool) -> Result<ContractionTuple<T>> {
        random_contraction_tuple_with(k, m, n, identity, &mut self.rng)
    }

    fn contraction<T: Real>(&mut self, m: usize, n: usize) -> Result<ComplexMatrix<T>> {
        Ok(self.tuple::<T>(1, m, n, false)?.blocks()[0].clone())
    }

    /// Configured weights plus one uniform draw in `(0, 1)`.
    fn lambdas(&mut self) -> Vec<f64> {
        let extra = loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                break u;
            }
        };
        let mut out = self.cfg.lambda_samples.clone();
        out.push(extra);
        out
    }

    fn unit(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }
}

/// Draws the instance of `trial` for `kind`; a pure function of
/// `(cfg.seed, trial)`.
pub fn sample<T: Real>(kind: CheckKind, cfg: &CheckConfig, trial: usize) -> Result<Instance<T>> {
    let mut s = Sampler {
        cfg,
        rng: cfg.seed.derive(trial as u64).rng(),
    };
    let d = cfg.dims_for_trial(trial);
    Ok(match kind {
        CheckKind::ShConvexity => Instance::Sh(ShSegment {
            h: s.contraction(d.m, d.n)?,
            a1: s.pd(d.m)?,
            b1: s.pd(d.n)?,
            a2: s.pd(d.m)?,
            b2: s.pd(d.n)?,
            lambdas: s.lambdas(),
        }),
        CheckKind::PhiConcavity => Instance::Phi(PhiSegment {
            h: s.contraction(d.m, d.n)?,
            l: s.hermitian(d.n)?,
            a1: s.pd(d.m)?,
            a2: s.pd(d.m)?,
            lambdas: s.lambdas(),
        }),
        CheckKind::MultiConcavity => {
            let h = s.tuple(d.k, d.m, d.n, false)?;
            let l = s.hermitian(d.n)?;
            let first = MultiInstance::positive(l, h, s.pds(d.k, d.m)?)?;
            Instance::Multi(MultiSegment {
                first,
                second: s.pds(d.k, d.m)?,
                lambdas: s.lambdas(),
            })
        }
        CheckKind::GtJensen => {
            let family = GtFamily::for_trial(trial);
            let (k, m, n) = match family {
                GtFamily::GoldenThompson => (1, d.n, d.n),
                _ => (d.k, d.m, d.n),
            };
            let h = match family {
                GtFamily::GoldenThompson => ContractionTuple::new(vec![ComplexMatrix::identity(n)], true)?,
                _ => s.tuple(k, m, n, true)?,
            };
            let l = match family {
                GtFamily::Jensen => Hermitian::zeros(n),
                _ => s.hermitian(n)?,
            };
            let b = s.hermitians(k, m)?;
            Instance::Gt(GtInstance {
                inst: MultiInstance::hermitian(l, h, b)?,
                family,
            })
        }
        CheckKind::GibbsIdentity => Instance::Gibbs(GibbsInstance {
            x: s.pd(d.m)?,
            b: s.pd(d.m)?,
        }),
        CheckKind::DerivativeLimit => Instance::Derivative(DerivativeInstance {
            h: s.contraction(d.m, d.n)?,
            a: s.pd(d.m)?,
            b: s.pd(d.n)?,
        }),
        CheckKind::GtRouteGap => {
            let h = s.tuple::<T>(d.k, d.m, d.n, true)?;
            let b = s.hermitians(d.k, d.m)?;
            let l = s.hermitian(d.n)?.add(&route_tilt(&h, &b)?)?;
            Instance::Route(RouteInstance {
                inst: MultiInstance::hermitian(l, h, b)?,
            })
        }
        CheckKind::Homogeneity => {
            let h = s.tuple(d.k, d.m, d.n, true)?;
            let l = s.hermitian(d.n)?;
            let a = s.pds(d.k, d.m)?;
            let strict_factor = (STRICT_GRAM_BOUND * s.unit()).sqrt();
            Instance::Homogeneity(HomogeneityInstance {
                inst: MultiInstance::positive(l, h, a)?,
                strict_factor,
                ts: HOMOGENEITY_TS.to_vec(),
            })
        }
    })
}

/// `ROUTE_TILT * v v*` for the top eigenvector `v` of
/// `exp(sum H_i* B_i H_i) - sum H_i* exp(B_i) H_i`, or zero when that
/// difference has no positive direction. Weighting `exp(L)` toward the
/// direction where the first exponential dominates is what lets the
/// Golden-Thompson-first bound overshoot.
fn route_tilt<T: Real>(h: &ContractionTuple<T>, b: &[Hermitian<T>]) -> Result<Hermitian<T>> {
    let n = h.n();
    let mut inner = Hermitian::zeros(n);
    let mut mixed = Hermitian::zeros(n);
    for (bi, hi) in b.iter().zip(h.blocks()) {
        inner = inner.add(&bi.congruence(hi)?)?;
        mixed = mixed.add(&matrix_exp(bi)?.as_hermitian().congruence(hi)?)?;
    }
    let diff = matrix_exp(&inner)?.as_hermitian().sub(&mixed)?;
    let spec = diff.spectral()?;
    if spec.max_eigenvalue() <= T::zero() {
        return Ok(Hermitian::zeros(n));
    }
    let v = spec.eigenvectors().column(n - 1).into_owned();
    let outer = ComplexMatrix::new(&v * v.adjoint())?;
    Ok(Hermitian::new(outer)?.scale(T::lit(ROUTE_TILT)))
}
