use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RngSeed;

/// Seed used when none is supplied (`0xC0FFEE`).
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// `(k, m, n)`: number of blocks, rows per block (argument dimension), and
/// columns (dimension of `L`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub k: usize,
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub const fn new(k: usize, m: usize, n: usize) -> Self {
        Self { k, m, n }
    }

    /// Parses `"k,m,n"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidConfig(format!("dims \"{s}\": {e}")))?;
        match parts[..] {
            [k, m, n] => Ok(Self::new(k, m, n)),
            _ => Err(Error::InvalidConfig(format!("dims \"{s}\" must be k,m,n"))),
        }
    }

    pub fn admits_isometry(&self) -> bool {
        self.k * self.m >= self.n
    }
}

/// Absolute plus scale-relative tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub trials: usize,
    pub seed: RngSeed,
    pub dims: Vec<Dims>,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Fixed convex-combination weights; every trial adds one uniform draw.
    pub lambda_samples: Vec<f64>,
    /// Eigenvalue range of sampled positive-definite matrices.
    pub eig_range: [f64; 2],
    /// Scale of sampled Hermitian matrices (`L` and `B_i`).
    pub hermitian_scale: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: RngSeed(DEFAULT_SEED),
            dims: (1..=4).map(|d| Dims::new(1, d, d)).collect(),
            tol_abs: 1e-9,
            tol_rel: 1e-9,
            lambda_samples: vec![0.25, 0.5, 0.75],
            eig_range: [0.05, 5.0],
            hermitian_scale: 1.0,
        }
    }
}

impl CheckConfig {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: self.tol_abs,
            rel: self.tol_rel,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.dims.is_empty() {
            return bad("at least one (k, m, n) triple is required".into());
        }
        if let Some(d) = self.dims.iter().find(|d| d.k == 0 || d.m == 0 || d.n == 0) {
            return bad(format!("dimensions must be >= 1, got {d:?}"));
        }
        if !(self.tol_abs > 0.0 && self.tol_rel > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if let Some(l) = self.lambda_samples.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
            return bad(format!("lambda {l} outside (0, 1)"));
        }
        let [lo, hi] = self.eig_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("eigenvalue range [{lo}, {hi}] must satisfy 0 < lo <= hi"));
        }
        if !(self.hermitian_scale > 0.0 && self.hermitian_scale.is_finite()) {
            return bad("hermitian_scale must be positive".into());
        }
        Ok(())
    }

    pub fn dims_for_trial(&self, trial: usize) -> Dims {
        self.dims[trial % self.dims.len()]
    }

    pub fn require_isometries(&self) -> Result<()> {
        match self.dims.iter().find(|d| !d.admits_isometry()) {
            Some(d) => Err(Error::InvalidConfig(format!(
                "dims {d:?} cannot carry blocks summing to the identity (need k*m >= n)"
            ))),
            None => Ok(()),
        }
    }
}
