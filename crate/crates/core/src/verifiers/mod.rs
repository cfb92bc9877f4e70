//! Randomized checks of the trace inequalities on seeded instance families.
//!
//! Each check draws `trials` independent instances (trial `i` seeded by
//! `cfg.seed.derive(i)`), evaluates them in parallel and reports every
//! offending comparison together with a JSON dump of its instance. Reports
//! are identical for identical configurations regardless of thread count.

mod config;
mod instances;
mod report;
mod sampling;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{CheckConfig, Dims, Tolerance, DEFAULT_SEED};
pub use instances::{
    Aggregate, DerivativeInstance, Evaluation, GibbsInstance, GtFamily, GtInstance, HomogeneityInstance, Instance,
    InstanceDump, Measure, MultiSegment, Note, PhiSegment, RouteInstance, ShSegment, DERIVATIVE_STEPS,
    STRICT_DEVIATION,
};
pub use report::{CheckReport, Outcome, Summary, SummaryLine, Violation};
pub use sampling::{sample, HOMOGENEITY_TS, ROUTE_TILT, STRICT_GRAM_BOUND};

use crate::error::{Error, Result};
use crate::functionals::{self, MultiInstance};
use crate::matrix::{ComplexMatrix, Hermitian, PositiveDefinite, RngSeed};
use crate::scalar::Real;

/// The functionals a check calls. The defaults forward to
/// [`crate::functionals`]; overriding one yields a corrupted evaluator,
/// which is how the harness is tested against vacuous passes.
pub trait Evaluator<T: Real>: Sync {
    fn reduced_relative_entropy(
        &self,
        a: &PositiveDefinite<T>,
        b: &PositiveDefinite<T>,
        h: &ComplexMatrix<T>,
    ) -> Result<T> {
        functionals::reduced_relative_entropy(a, b, h)
    }

    fn lieb_trace(&self, a: &PositiveDefinite<T>, b: &PositiveDefinite<T>, h: &ComplexMatrix<T>, p: T) -> Result<T> {
        functionals::lieb_trace(a, b, h, p)
    }

    fn lieb_trace_derivative_at_zero(
        &self,
        a: &PositiveDefinite<T>,
        b: &PositiveDefinite<T>,
        h: &ComplexMatrix<T>,
    ) -> Result<T> {
        functionals::lieb_trace_derivative_at_zero(a, b, h)
    }

    fn trace_exp_functional(&self, a: &PositiveDefinite<T>, l: &Hermitian<T>, h: &ComplexMatrix<T>) -> Result<T> {
        functionals::trace_exp_functional(a, l, h)
    }

    fn multi_trace_exp(&self, inst: &MultiInstance<T>) -> Result<T> {
        functionals::multi_trace_exp(inst)
    }

    /// `Tr exp(L^ + H^* log(A^) H^)` of the block lift.
    fn lifted_trace_exp(&self, inst: &MultiInstance<T>) -> Result<T> {
        functionals::block_lift(inst)?.trace_exp()
    }

    fn gt_jensen_lhs(&self, inst: &MultiInstance<T>) -> Result<T> {
        functionals::gt_jensen_lhs(inst)
    }

    fn gt_jensen_rhs(&self, inst: &MultiInstance<T>) -> Result<T> {
        functionals::gt_jensen_rhs(inst)
    }

    fn gt_route_bound(&self, inst: &MultiInstance<T>) -> Result<T> {
        functionals::gt_route_bound(inst)
    }

    fn gibbs_objective(&self, x: &PositiveDefinite<T>, b: &PositiveDefinite<T>) -> Result<T> {
        functionals::gibbs_objective(x, b)
    }
}

/// The uncorrupted evaluator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Reference;

impl<T: Real> Evaluator<T> for Reference {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ShConvexity,
    PhiConcavity,
    MultiConcavity,
    GtJensen,
    GibbsIdentity,
    DerivativeLimit,
    GtRouteGap,
    Homogeneity,
}

const SEMANTICS_STANDARD: &str =
    "passed is true iff no comparison exceeded its tolerance; each violation is one offending comparison";

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::ShConvexity,
        CheckKind::PhiConcavity,
        CheckKind::MultiConcavity,
        CheckKind::GtJensen,
        CheckKind::GibbsIdentity,
        CheckKind::DerivativeLimit,
        CheckKind::GtRouteGap,
        CheckKind::Homogeneity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::ShConvexity => "sh_convexity",
            CheckKind::PhiConcavity => "phi_concavity",
            CheckKind::MultiConcavity => "multi_concavity",
            CheckKind::GtJensen => "gt_jensen",
            CheckKind::GibbsIdentity => "gibbs_identity",
            CheckKind::DerivativeLimit => "derivative_limit",
            CheckKind::GtRouteGap => "gt_route_gap",
            CheckKind::Homogeneity => "homogeneity",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check \"{name}\"")))
    }

    pub fn semantics(self) -> &'static str {
        match self {
            CheckKind::GtRouteGap => {
                "witness search: violations list instances where Tr(exp(L) exp(sum H_i* B_i H_i)) exceeds \
                 Tr(exp(L) sum H_i* exp(B_i) H_i) + tol; passed is true iff at least one witness was found, \
                 and an empty search is inconclusive rather than failed"
            }
            CheckKind::Homogeneity => {
                "passed is true iff homogeneity held within tolerance on every identity-sum instance and \
                 failed (deviation > 1e-3) for at least one strict-contraction control"
            }
            _ => SEMANTICS_STANDARD,
        }
    }

    /// Configuration used when the caller supplies none.
    pub fn default_config(self) -> CheckConfig {
        let square = |hi: usize| (1..=hi).map(|d| Dims::new(1, d, d)).collect::<Vec<_>>();
        let grid = |ks: std::ops::RangeInclusive<usize>, hi: usize, isometric: bool| {
            let mut out = Vec::new();
            for k in ks {
                for m in 1..=hi {
                    for n in 1..=hi {
                        let d = Dims::new(k, m, n);
                        if !isometric || d.admits_isometry() {
                            out.push(d);
                        }
                    }
                }
            }
            out
        };
        let base = CheckConfig::default();
        match self {
            CheckKind::ShConvexity => CheckConfig {
                trials: 500,
                dims: square(6),
                ..base
            },
            CheckKind::PhiConcavity => CheckConfig {
                trials: 500,
                dims: grid(1..=1, 6, false),
                ..base
            },
            CheckKind::MultiConcavity => CheckConfig {
                trials: 200,
                dims: grid(1..=4, 4, false),
                ..base
            },
            CheckKind::GtJensen => CheckConfig {
                trials: 500,
                dims: grid(1..=3, 4, true),
                ..base
            },
            CheckKind::GibbsIdentity => CheckConfig {
                trials: 200,
                dims: square(5),
                ..base
            },
            CheckKind::DerivativeLimit => CheckConfig {
                trials: 100,
                dims: square(4),
                ..base
            },
            CheckKind::GtRouteGap => CheckConfig {
                trials: 2000,
                dims: vec![Dims::new(2, 2, 2)],
                tol_abs: 1e-6,
                hermitian_scale: 4.0,
                ..base
            },
            CheckKind::Homogeneity => CheckConfig {
                trials: 200,
                dims: grid(1..=3, 3, true),
                ..base
            },
        }
    }

    fn needs_isometries(self) -> bool {
        matches!(
            self,
            CheckKind::GtJensen | CheckKind::GtRouteGap | CheckKind::Homogeneity
        )
    }

    fn validate(self, cfg: &CheckConfig) -> Result<()> {
        cfg.validate()?;
        if self.needs_isometries() {
            cfg.require_isometries()?;
        }
        if self == CheckKind::GtRouteGap && cfg.dims.iter().any(|d| d.k < 2) {
            return Err(Error::InvalidConfig("the witness search needs k >= 2".into()));
        }
        Ok(())
    }

    /// Metrics reported even when no trial contributes to them.
    fn declared_metrics(self) -> &'static [&'static str] {
        match self {
            CheckKind::MultiConcavity => &["max_lift_discrepancy_rel"],
            CheckKind::GtJensen => &["family_general", "family_golden_thompson", "family_jensen"],
            CheckKind::DerivativeLimit => &["flat_instances", "max_error_at_smallest_step"],
            CheckKind::GtRouteGap => &["max_replay_discrepancy", "witnesses_with_inequality_intact"],
            CheckKind::Homogeneity => &["strict_counterexamples", "strict_max_deviation"],
            _ => &[],
        }
    }
}

/// Command-line style overrides applied on top of a check's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol_abs: Option<f64>,
    pub tol_rel: Option<f64>,
    pub dims: Vec<Dims>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: CheckConfig) -> CheckConfig {
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = RngSeed(s);
        }
        if let Some(t) = self.tol_abs {
            cfg.tol_abs = t;
        }
        if let Some(t) = self.tol_rel {
            cfg.tol_rel = t;
        }
        if !self.dims.is_empty() {
            cfg.dims = self.dims.clone();
        }
        cfg
    }
}

/// Runs `kind` with an arbitrary scalar type and evaluator.
///
/// Configuration errors are returned; errors inside a trial become
/// violations with condition `"error"`.
pub fn run_with<T: Real, E: Evaluator<T>>(kind: CheckKind, cfg: &CheckConfig, eval: &E) -> Result<CheckReport> {
    kind.validate(cfg)?;
    let tol = cfg.tolerance();
    let outcomes: Vec<Result<(Instance<T>, Evaluation)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let inst = sample::<T>(kind, cfg, i)?;
            let eval = inst.evaluate(eval, tol)?;
            Ok((inst, eval))
        })
        .collect();

    let mut metrics: BTreeMap<String, f64> = kind
        .declared_metrics()
        .iter()
        .map(|&name| (name.to_string(), 0.0))
        .collect();
    let mut violations = Vec::new();
    let mut comparisons = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let (inst, evaluation) = match outcome {
            Ok(v) => v,
            Err(e) => {
                violations.push(Violation {
                    trial,
                    condition: "error".into(),
                    instance: sample::<T>(kind, cfg, trial).ok().map(|i| i.dump()),
                    lhs: 0.0,
                    rhs: 0.0,
                    gap: 0.0,
                    tol: 0.0,
                    detail: Some(format!("trial {trial}: {e}")),
                });
                continue;
            }
        };
        for note in &evaluation.notes {
            let slot = metrics.entry(note.name.to_string()).or_insert(0.0);
            match note.aggregate {
                Aggregate::Max => *slot = slot.max(note.value),
                Aggregate::Sum => *slot += note.value,
            }
        }
        comparisons += evaluation.measures.len();
        let mut dump = None;
        for m in evaluation.measures {
            worst_gap = worst_gap.max(m.gap);
            if !m.violated {
                continue;
            }
            let dump = dump.get_or_insert_with(|| inst.dump()).clone();
            let discrepancy = replay_discrepancy::<T, E>(&dump, eval, tol, &m);
            let slot = metrics.entry("max_replay_discrepancy".into()).or_insert(0.0);
            *slot = slot.max(discrepancy);
            violations.push(Violation {
                trial,
                condition: m.condition,
                instance: Some(dump),
                lhs: m.lhs,
                rhs: m.rhs,
                gap: m.gap,
                tol: m.tol,
                detail: None,
            });
        }
    }
    if !worst_gap.is_finite() {
        worst_gap = 0.0;
    }

    let (outcome, passed) = match kind {
        CheckKind::GtRouteGap => {
            let found = violations.iter().any(|v| v.condition != "error");
            (if found { Outcome::Passed } else { Outcome::Inconclusive }, found)
        }
        CheckKind::Homogeneity => {
            if metrics.get("strict_counterexamples").copied().unwrap_or(0.0) == 0.0 {
                violations.push(Violation {
                    trial: cfg.trials,
                    condition: "strict_contraction_control".into(),
                    instance: None,
                    lhs: metrics.get("strict_max_deviation").copied().unwrap_or(0.0),
                    rhs: STRICT_DEVIATION,
                    gap: 0.0,
                    tol: 0.0,
                    detail: Some("no strict-contraction instance broke homogeneity".into()),
                });
            }
            let ok = violations.is_empty();
            (if ok { Outcome::Passed } else { Outcome::Failed }, ok)
        }
        _ => {
            let ok = violations.is_empty();
            (if ok { Outcome::Passed } else { Outcome::Failed }, ok)
        }
    };

    Ok(CheckReport {
        check_name: kind.name().into(),
        semantics: kind.semantics().into(),
        outcome,
        passed,
        trials_run: cfg.trials,
        comparisons,
        worst_gap,
        violations,
        metrics,
        config: cfg.clone(),
    })
}

/// Re-parses a dump from its JSON text, re-evaluates it from scratch and
/// returns how far the recomputed gap moved.
fn replay_discrepancy<T: Real, E: Evaluator<T>>(dump: &InstanceDump, eval: &E, tol: Tolerance, m: &Measure) -> f64 {
    let text = serde_json::to_string(dump).expect("dump serializes");
    let replayed = serde_json::from_str::<InstanceDump>(&text)
        .map_err(|e| Error::Parse(e.to_string()))
        .and_then(|d| d.replay_gap::<T, E>(eval, tol, &m.condition));
    match replayed {
        Ok(gap) => (gap - m.gap).abs(),
        Err(_) => f64::INFINITY,
    }
}

/// Runs `kind` in `f64` against the reference functionals.
pub fn run_check(kind: CheckKind, cfg: &CheckConfig) -> Result<CheckReport> {
    run_with::<f64, _>(kind, cfg, &Reference)
}

/// Runs every check with its default configuration modified by `overrides`.
pub fn run_all(overrides: &Overrides) -> Result<Vec<CheckReport>> {
    CheckKind::ALL
        .into_iter()
        .map(|kind| run_check(kind, &overrides.apply(kind.default_config())))
        .collect()
}

pub fn check_sh_convexity(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::ShConvexity, cfg)
}

pub fn check_phi_concavity(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::PhiConcavity, cfg)
}

pub fn check_multi_concavity(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::MultiConcavity, cfg)
}

pub fn check_gt_jensen(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::GtJensen, cfg)
}

pub fn check_gibbs_identity(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::GibbsIdentity, cfg)
}

pub fn check_derivative_limit(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::DerivativeLimit, cfg)
}

/// Witness search; see [`CheckKind::semantics`] for how to read the report.
pub fn search_gt_route_gap(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::GtRouteGap, cfg)
}

pub fn check_homogeneity(cfg: &CheckConfig) -> Result<CheckReport> {
    run_check(CheckKind::Homogeneity, cfg)
}
