//! Concave maximization over the positive-definite cone.
//!
//! Iterates are parameterized as `X = exp(Y)` with `Y` Hermitian, so every
//! iterate is positive definite without projection. The update is
//! `Y <- Y + step * G` where `G` is the Euclidean gradient of the objective at
//! `X`; an Armijo backtracking search on the objective itself keeps the
//! sequence of values monotone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{gibbs_objective, phi_maximizer, phi_objective, trace_exp_functional};
use crate::matrix::{ComplexMatrix, Hermitian, MatrixJson, PositiveDefinite};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub initial_step: f64,
    pub backtrack_factor: f64,
    pub armijo_c: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-8,
            initial_step: 1.0,
            backtrack_factor: 0.5,
            armijo_c: 1e-4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.grad_tol > 0.0 && self.initial_step > 0.0) {
            return bad("grad_tol and initial_step must be positive");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack_factor must lie in (0, 1)");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        Ok(())
    }
}

/// `log B - log X`, the gradient of `X -> Tr(X log B - X log X + X)`.
pub fn gibbs_gradient<T: Real>(x: &PositiveDefinite<T>, b: &PositiveDefinite<T>) -> Result<Hermitian<T>> {
    b.log().sub(&x.log())
}

/// `L + H* log(A) H - log X`, the gradient of
/// `X -> -S_{H*}(X|A) + Tr(X L + A)`.
pub fn phi_gradient<T: Real>(
    x: &PositiveDefinite<T>,
    a: &PositiveDefinite<T>,
    l: &Hermitian<T>,
    h: &ComplexMatrix<T>,
) -> Result<Hermitian<T>> {
    l.add(&a.log().congruence(h)?)?.sub(&x.log())
}

/// The two variational objectives.
#[derive(Clone, Copy, Debug)]
pub enum Objective<'a, T: Real> {
    /// `X -> Tr(X log B - X log X + X)`.
    Gibbs { b: &'a PositiveDefinite<T> },
    /// `X -> -S_{H*}(X|A) + Tr(X L + A)`.
    Phi {
        a: &'a PositiveDefinite<T>,
        l: &'a Hermitian<T>,
        h: &'a ComplexMatrix<T>,
    },
}

impl<T: Real> Objective<'_, T> {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::Gibbs { .. } => "gibbs",
            Objective::Phi { .. } => "phi",
        }
    }

    /// Dimension of the optimization variable `X`.
    pub fn dim(&self) -> usize {
        match self {
            Objective::Gibbs { b } => b.dim(),
            Objective::Phi { l, .. } => l.dim(),
        }
    }

    pub fn value(&self, x: &PositiveDefinite<T>) -> Result<T> {
        match *self {
            Objective::Gibbs { b } => gibbs_objective(x, b),
            Objective::Phi { a, l, h } => phi_objective(x, a, l, h),
        }
    }

    pub fn gradient(&self, x: &PositiveDefinite<T>) -> Result<Hermitian<T>> {
        match *self {
            Objective::Gibbs { b } => gibbs_gradient(x, b),
            Objective::Phi { a, l, h } => phi_gradient(x, a, l, h),
        }
    }

    /// Closed-form maximizer: `B`, or `exp(L + H* log(A) H)`.
    pub fn closed_form_argmax(&self) -> Result<PositiveDefinite<T>> {
        match *self {
            Objective::Gibbs { b } => Ok(b.clone()),
            Objective::Phi { a, l, h } => phi_maximizer(a, l, h),
        }
    }

    /// Closed-form maximum: `Tr B`, or `Tr exp(L + H* log(A) H)`.
    pub fn closed_form_max(&self) -> Result<T> {
        match *self {
            Objective::Gibbs { b } => Ok(b.trace()),
            Objective::Phi { a, l, h } => trace_exp_functional(a, l, h),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Objective::Phi { a, l, h } = *self {
            if h.rows() != a.dim() || h.cols() != l.dim() {
                return Err(Error::Dimension(format!(
                    "H is {}x{}, expected {}x{}",
                    h.rows(),
                    h.cols(),
                    a.dim(),
                    l.dim()
                )));
            }
            h.ensure_contraction()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult<T: Real> {
    pub argmax: PositiveDefinite<T>,
    pub value: T,
    pub iterations: usize,
    pub final_grad_norm: T,
    pub converged: bool,
    /// Objective value at the start point and after every accepted step.
    pub history: Vec<T>,
}

/// JSON form of a [`SolverResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub objective: String,
    pub value: f64,
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub converged: bool,
    pub argmax: MatrixJson,
    pub history: Vec<f64>,
}

impl<T: Real> SolverResult<T> {
    pub fn report(&self, objective: &str) -> SolverReport {
        SolverReport {
            objective: objective.to_string(),
            value: self.value.as_f64(),
            iterations: self.iterations,
            final_grad_norm: self.final_grad_norm.as_f64(),
            converged: self.converged,
            argmax: MatrixJson::from(&self.argmax),
            history: self.history.iter().map(|v| v.as_f64()).collect(),
        }
    }
}

fn exp_iterate<T: Real>(y: &Hermitian<T>) -> Result<PositiveDefinite<T>> {
    PositiveDefinite::with_floor(y.spectral()?.map(|v| v.exp())?, T::zero())
}

/// Evaluates a trial point, mapping overflow or underflow to `None`.
fn try_point<T: Real>(objective: &Objective<'_, T>, y: &Hermitian<T>) -> Option<(PositiveDefinite<T>, T)> {
    let x = exp_iterate(y).ok()?;
    let f = objective.value(&x).ok()?;
    f.is_finite_value().then_some((x, f))
}

/// Gradient ascent from `X = I`. Stops once the Frobenius norm of the
/// gradient is at most `grad_tol`, after `max_iters` accepted steps, or when
/// the line search cannot make progress.
pub fn maximize<T: Real>(objective: Objective<'_, T>, cfg: &SolverConfig) -> Result<SolverResult<T>> {
    cfg.validate()?;
    objective.validate()?;
    let grad_tol = T::lit(cfg.grad_tol);
    let beta = T::lit(cfg.backtrack_factor);
    let c = T::lit(cfg.armijo_c);
    let min_step = T::lit(cfg.initial_step * 1e-14);

    let mut y = Hermitian::zeros(objective.dim());
    let mut x = PositiveDefinite::identity(objective.dim());
    let mut f = objective.value(&x)?;
    let mut g = objective.gradient(&x)?;
    let mut history = vec![f];
    let mut iterations = 0;

    loop {
        let gnorm = g.frobenius_norm();
        if !(f.is_finite_value() && gnorm.is_finite_value()) {
            return Err(Error::NonFiniteObjective { iteration: iterations });
        }
        if gnorm <= grad_tol || iterations >= cfg.max_iters {
            return Ok(SolverResult {
                argmax: x,
                value: f,
                iterations,
                final_grad_norm: gnorm,
                converged: gnorm <= grad_tol,
                history,
            });
        }

        let slope = gnorm * gnorm;
        // below this predicted gain the objective cannot resolve the Armijo test
        let noise = T::lit(64.0) * T::default_epsilon() * (T::one() + f.abs());
        let mut step = T::lit(cfg.initial_step);
        let mut saw_non_finite = false;
        let accepted = loop {
            let y_try = y.add(&g.scale(step))?;
            let predicted = c * step * slope;
            match try_point(&objective, &y_try) {
                Some((x_try, f_try)) if predicted > noise => {
                    if f_try >= f + predicted {
                        break Some((y_try, x_try, f_try));
                    }
                }
                // gradient norm is the merit function once gains drop into round-off
                Some((x_try, f_try)) => {
                    let shrinks = objective
                        .gradient(&x_try)
                        .is_ok_and(|g_try| g_try.frobenius_norm() < gnorm);
                    if f_try >= f - noise && shrinks {
                        break Some((y_try, x_try, f_try));
                    }
                }
                None => saw_non_finite = true,
            }
            step *= beta;
            if step < min_step {
                break None;
            }
        };

        match accepted {
            Some((y_new, x_new, f_new)) => {
                y = y_new;
                x = x_new;
                f = f_new;
                g = objective.gradient(&x)?;
                history.push(f);
                iterations += 1;
            }
            None if saw_non_finite => return Err(Error::NonFiniteObjective { iteration: iterations }),
            None => {
                return Ok(SolverResult {
                    argmax: x,
                    value: f,
                    iterations,
                    final_grad_norm: gnorm,
                    converged: false,
                    history,
                })
            }
        }
    }
}
