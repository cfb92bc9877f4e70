//! Typed check instances, their JSON dumps, and the comparisons each one
//! produces. A dump re-evaluates to bit-identical comparisons in `f64`.

use serde::{Deserialize, Serialize};

use super::config::Tolerance;
use super::Evaluator;
use crate::error::{Error, Result};
use crate::functionals::{Arguments, InstanceFile, MultiInstance};
use crate::matrix::{ComplexMatrix, Hermitian, MatrixJson, PositiveDefinite};
use crate::scalar::Real;

/// Tolerated deviation between the lifted and the direct evaluation,
/// relative to `1 + |direct|`, as a multiple of `tol_rel`.
const LIFT_REL_FACTOR: f64 = 1.0;
/// Step sizes of the difference quotients for the derivative at zero.
pub const DERIVATIVE_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Difference-quotient errors below this fraction of the instance scale
/// carry no curvature signal; only the limit bound is checked then.
const DERIVATIVE_FLAT: f64 = 1e-8;
/// Departure from homogeneity that counts as a counterexample when the
/// blocks are a strict contraction.
pub const STRICT_DEVIATION: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub condition: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tol: f64,
    pub violated: bool,
}

// Negated comparisons are deliberate: a NaN gap must count as a violation.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
impl Measure {
    /// `lhs <= rhs + tol`.
    fn at_most(condition: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = lhs - rhs;
        Self {
            condition,
            lhs,
            rhs,
            gap,
            tol,
            violated: !(gap <= tol),
        }
    }

    /// `|lhs - rhs| <= tol`.
    fn close(condition: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = (lhs - rhs).abs();
        Self {
            condition,
            lhs,
            rhs,
            gap,
            tol,
            violated: !(gap <= tol),
        }
    }

    /// `lhs < rhs`.
    fn below(condition: String, lhs: f64, rhs: f64) -> Self {
        Self {
            condition,
            lhs,
            rhs,
            gap: lhs - rhs,
            tol: 0.0,
            violated: !(lhs < rhs),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregate {
    Max,
    Sum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Note {
    pub name: &'static str,
    pub value: f64,
    pub aggregate: Aggregate,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evaluation {
    pub measures: Vec<Measure>,
    pub notes: Vec<Note>,
}

impl Evaluation {
    fn max(&mut self, name: &'static str, value: f64) {
        self.notes.push(Note {
            name,
            value,
            aggregate: Aggregate::Max,
        });
    }

    fn count(&mut self, name: &'static str) {
        self.notes.push(Note {
            name,
            value: 1.0,
            aggregate: Aggregate::Sum,
        });
    }
}

fn lambda_label(lambda: f64) -> String {
    format!("lambda={lambda}")
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Segment instance for joint convexity of the reduced relative entropy.
#[derive(Clone, Debug, PartialEq)]
pub struct ShSegment<T: Real> {
    pub a1: PositiveDefinite<T>,
    pub b1: PositiveDefinite<T>,
    pub a2: PositiveDefinite<T>,
    pub b2: PositiveDefinite<T>,
    pub h: ComplexMatrix<T>,
    pub lambdas: Vec<f64>,
}

/// Segment instance for concavity of `A -> Tr exp(L + H* log(A) H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSegment<T: Real> {
    pub a1: PositiveDefinite<T>,
    pub a2: PositiveDefinite<T>,
    pub l: Hermitian<T>,
    pub h: ComplexMatrix<T>,
    pub lambdas: Vec<f64>,
}

/// Segment between two k-tuples sharing `L` and the blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSegment<T: Real> {
    pub first: MultiInstance<T>,
    pub second: Vec<PositiveDefinite<T>>,
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GtFamily {
    General,
    /// `k = 1`, `H = I`.
    GoldenThompson,
    /// `L = 0`.
    Jensen,
}

impl GtFamily {
    pub fn for_trial(trial: usize) -> Self {
        match trial % 3 {
            0 => GtFamily::General,
            1 => GtFamily::GoldenThompson,
            _ => GtFamily::Jensen,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GtInstance<T: Real> {
    pub inst: MultiInstance<T>,
    pub family: GtFamily,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GibbsInstance<T: Real> {
    pub x: PositiveDefinite<T>,
    pub b: PositiveDefinite<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeInstance<T: Real> {
    pub a: PositiveDefinite<T>,
    pub b: PositiveDefinite<T>,
    pub h: ComplexMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouteInstance<T: Real> {
    pub inst: MultiInstance<T>,
}

/// Scaling test on an instance whose blocks sum to the identity; the same
/// blocks times `strict_factor` give the strict-contraction control.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneityInstance<T: Real> {
    pub inst: MultiInstance<T>,
    pub strict_factor: f64,
    pub ts: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance<T: Real> {
    Sh(ShSegment<T>),
    Phi(PhiSegment<T>),
    Multi(MultiSegment<T>),
    Gt(GtInstance<T>),
    Gibbs(GibbsInstance<T>),
    Derivative(DerivativeInstance<T>),
    Route(RouteInstance<T>),
    Homogeneity(HomogeneityInstance<T>),
}

/// JSON form of an [`Instance`]; matrices use the matrix JSON format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceDump {
    ShSegment {
        a1: MatrixJson,
        b1: MatrixJson,
        a2: MatrixJson,
        b2: MatrixJson,
        h: MatrixJson,
        lambdas: Vec<f64>,
    },
    PhiSegment {
        a1: MatrixJson,
        a2: MatrixJson,
        l: MatrixJson,
        h: MatrixJson,
        lambdas: Vec<f64>,
    },
    MultiSegment {
        first: InstanceFile,
        second: Vec<MatrixJson>,
        lambdas: Vec<f64>,
    },
    GtJensen {
        instance: InstanceFile,
        family: GtFamily,
    },
    Gibbs {
        x: MatrixJson,
        b: MatrixJson,
    },
    Derivative {
        a: MatrixJson,
        b: MatrixJson,
        h: MatrixJson,
    },
    RouteGap {
        instance: InstanceFile,
    },
    Homogeneity {
        instance: InstanceFile,
        strict_factor: f64,
        ts: Vec<f64>,
    },
}

fn pd_list<T: Real>(list: &[MatrixJson]) -> Result<Vec<PositiveDefinite<T>>> {
    list.iter().map(MatrixJson::to_pd).collect()
}

fn combine<T: Real>(
    lambda: f64,
    x: &[PositiveDefinite<T>],
    y: &[PositiveDefinite<T>],
) -> Result<Vec<PositiveDefinite<T>>> {
    x.iter().zip(y).map(|(p, q)| p.combination(T::lit(lambda), q)).collect()
}

impl<T: Real> Instance<T> {
    pub fn dump(&self) -> InstanceDump {
        match self {
            Instance::Sh(s) => InstanceDump::ShSegment {
                a1: (&s.a1).into(),
                b1: (&s.b1).into(),
                a2: (&s.a2).into(),
                b2: (&s.b2).into(),
                h: (&s.h).into(),
                lambdas: s.lambdas.clone(),
            },
            Instance::Phi(s) => InstanceDump::PhiSegment {
                a1: (&s.a1).into(),
                a2: (&s.a2).into(),
                l: (&s.l).into(),
                h: (&s.h).into(),
                lambdas: s.lambdas.clone(),
            },
            Instance::Multi(s) => InstanceDump::MultiSegment {
                first: InstanceFile::from_multi(&s.first),
                second: s.second.iter().map(MatrixJson::from).collect(),
                lambdas: s.lambdas.clone(),
            },
            Instance::Gt(g) => InstanceDump::GtJensen {
                instance: InstanceFile::from_multi(&g.inst),
                family: g.family,
            },
            Instance::Gibbs(g) => InstanceDump::Gibbs {
                x: (&g.x).into(),
                b: (&g.b).into(),
            },
            Instance::Derivative(d) => InstanceDump::Derivative {
                a: (&d.a).into(),
                b: (&d.b).into(),
                h: (&d.h).into(),
            },
            Instance::Route(r) => InstanceDump::RouteGap {
                instance: InstanceFile::from_multi(&r.inst),
            },
            Instance::Homogeneity(h) => InstanceDump::Homogeneity {
                instance: InstanceFile::from_multi(&h.inst),
                strict_factor: h.strict_factor,
                ts: h.ts.clone(),
            },
        }
    }

    pub fn from_dump(dump: &InstanceDump) -> Result<Self> {
        Ok(match dump {
            InstanceDump::ShSegment {
                a1,
                b1,
                a2,
                b2,
                h,
                lambdas,
            } => Instance::Sh(ShSegment {
                a1: a1.to_pd()?,
                b1: b1.to_pd()?,
                a2: a2.to_pd()?,
                b2: b2.to_pd()?,
                h: h.to_complex()?,
                lambdas: lambdas.clone(),
            }),
            InstanceDump::PhiSegment { a1, a2, l, h, lambdas } => Instance::Phi(PhiSegment {
                a1: a1.to_pd()?,
                a2: a2.to_pd()?,
                l: l.to_hermitian()?,
                h: h.to_complex()?,
                lambdas: lambdas.clone(),
            }),
            InstanceDump::MultiSegment { first, second, lambdas } => Instance::Multi(MultiSegment {
                first: first.multi_positive()?,
                second: pd_list(second)?,
                lambdas: lambdas.clone(),
            }),
            InstanceDump::GtJensen { instance, family } => Instance::Gt(GtInstance {
                inst: instance.multi_hermitian()?,
                family: *family,
            }),
            InstanceDump::Gibbs { x, b } => Instance::Gibbs(GibbsInstance {
                x: x.to_pd()?,
                b: b.to_pd()?,
            }),
            InstanceDump::Derivative { a, b, h } => Instance::Derivative(DerivativeInstance {
                a: a.to_pd()?,
                b: b.to_pd()?,
                h: h.to_complex()?,
            }),
            InstanceDump::RouteGap { instance } => Instance::Route(RouteInstance {
                inst: instance.multi_hermitian()?,
            }),
            InstanceDump::Homogeneity {
                instance,
                strict_factor,
                ts,
            } => Instance::Homogeneity(HomogeneityInstance {
                inst: instance.multi_positive()?,
                strict_factor: *strict_factor,
                ts: ts.clone(),
            }),
        })
    }

    /// Runs every comparison of the instance.
    pub fn evaluate<E: Evaluator<T> + ?Sized>(&self, eval: &E, tol: Tolerance) -> Result<Evaluation> {
        let mut out = Evaluation::default();
        match self {
            Instance::Sh(s) => {
                let s1 = eval.reduced_relative_entropy(&s.a1, &s.b1, &s.h)?.as_f64();
                let s2 = eval.reduced_relative_entropy(&s.a2, &s.b2, &s.h)?.as_f64();
                for &lambda in &s.lambdas {
                    let a = s.a1.combination(T::lit(lambda), &s.a2)?;
                    let b = s.b1.combination(T::lit(lambda), &s.b2)?;
                    let mid = eval.reduced_relative_entropy(&a, &b, &s.h)?.as_f64();
                    let chord = lambda * s1 + (1.0 - lambda) * s2;
                    let scale = scale_of(&[mid, s1, s2]);
                    out.measures
                        .push(Measure::at_most(lambda_label(lambda), mid, chord, tol.bound(scale)));
                }
            }
            Instance::Phi(s) => {
                let p1 = eval.trace_exp_functional(&s.a1, &s.l, &s.h)?.as_f64();
                let p2 = eval.trace_exp_functional(&s.a2, &s.l, &s.h)?.as_f64();
                for &lambda in &s.lambdas {
                    let a = s.a1.combination(T::lit(lambda), &s.a2)?;
                    let mid = eval.trace_exp_functional(&a, &s.l, &s.h)?.as_f64();
                    let chord = lambda * p1 + (1.0 - lambda) * p2;
                    let scale = scale_of(&[mid, p1, p2]);
                    out.measures
                        .push(Measure::at_most(lambda_label(lambda), chord, mid, tol.bound(scale)));
                }
            }
            Instance::Multi(s) => {
                let second = s.first.with_args(Arguments::Positive(s.second.clone()))?;
                let p1 = multi_with_lift(eval, &s.first, "endpoint=1", tol, &mut out)?;
                let p2 = multi_with_lift(eval, &second, "endpoint=2", tol, &mut out)?;
                for &lambda in &s.lambdas {
                    let mid_args = combine(lambda, s.first.a_list()?, &s.second)?;
                    let mid_inst = s.first.with_args(Arguments::Positive(mid_args))?;
                    let label = lambda_label(lambda);
                    let mid = multi_with_lift(eval, &mid_inst, &label, tol, &mut out)?;
                    let chord = lambda * p1 + (1.0 - lambda) * p2;
                    let scale = scale_of(&[mid, p1, p2]);
                    out.measures.push(Measure::at_most(label, chord, mid, tol.bound(scale)));
                }
            }
            Instance::Gt(g) => {
                let lhs = eval.gt_jensen_lhs(&g.inst)?.as_f64();
                let rhs = eval.gt_jensen_rhs(&g.inst)?.as_f64();
                let scale = scale_of(&[lhs, rhs]);
                let label = serde_json::to_value(g.family).expect("family serializes");
                let label = format!("family={}", label.as_str().unwrap_or_default());
                out.measures.push(Measure::at_most(label, lhs, rhs, tol.bound(scale)));
                out.count(match g.family {
                    GtFamily::General => "family_general",
                    GtFamily::GoldenThompson => "family_golden_thompson",
                    GtFamily::Jensen => "family_jensen",
                });
            }
            Instance::Gibbs(g) => {
                let trace = g.b.trace().as_f64();
                let at_x = eval.gibbs_objective(&g.x, &g.b)?.as_f64();
                let at_b = eval.gibbs_objective(&g.b, &g.b)?.as_f64();
                out.measures.push(Measure::at_most(
                    "bound".into(),
                    at_x,
                    trace,
                    tol.bound(scale_of(&[at_x, trace])),
                ));
                out.measures.push(Measure::close(
                    "equality".into(),
                    at_b,
                    trace,
                    tol.bound(scale_of(&[at_b, trace])),
                ));
            }
            Instance::Derivative(d) => {
                let f0 = eval.lieb_trace(&d.a, &d.b, &d.h, T::zero())?.as_f64();
                let slope = eval.lieb_trace_derivative_at_zero(&d.a, &d.b, &d.h)?.as_f64();
                let mut errors = [0.0; 3];
                for (e, &p) in errors.iter_mut().zip(&DERIVATIVE_STEPS) {
                    let fp = eval.lieb_trace(&d.a, &d.b, &d.h, T::lit(p))?.as_f64();
                    *e = ((fp - f0) / p - slope).abs();
                }
                let [e2, e3, e4] = errors;
                let scale = scale_of(&[f0, slope]);
                out.max("max_error_at_smallest_step", e4);
                if e2 <= DERIVATIVE_FLAT * scale {
                    out.count("flat_instances");
                } else {
                    out.measures.push(Measure::below("decrease".into(), e3, e2));
                    out.measures
                        .push(Measure::below("round_off_floor".into(), e4, 10.0 * e3));
                    out.max("error_ratio_coarse_to_mid", e2 / e3);
                }
                out.measures
                    .push(Measure::at_most("limit".into(), e4, 1e-2 * scale, tol.abs));
            }
            Instance::Route(r) => {
                let route = eval.gt_route_bound(&r.inst)?.as_f64();
                let rhs = eval.gt_jensen_rhs(&r.inst)?.as_f64();
                let lhs = eval.gt_jensen_lhs(&r.inst)?.as_f64();
                let scale = scale_of(&[route, rhs]);
                let m = Measure::at_most("route_bound_exceeds_rhs".into(), route, rhs, tol.bound(scale));
                // inequality itself at the same instance
                out.max("max_inequality_gap", lhs - rhs);
                if m.violated && lhs - rhs <= tol.bound(scale_of(&[lhs, rhs])) {
                    out.count("witnesses_with_inequality_intact");
                }
                out.max("max_route_gap", m.gap);
                out.measures.push(m);
            }
            Instance::Homogeneity(h) => {
                let strict = h.inst.h().scale(T::lit(h.strict_factor))?;
                let strict_inst = MultiInstance::new(h.inst.l().clone(), strict, h.inst.args().clone())?;
                let phi = eval.multi_trace_exp(&h.inst)?.as_f64();
                let phi_strict = eval.multi_trace_exp(&strict_inst)?.as_f64();
                let mut strict_dev: f64 = 0.0;
                for &t in &h.ts {
                    let scaled = Arguments::Positive(
                        h.inst
                            .a_list()?
                            .iter()
                            .map(|a| a.scale(T::lit(t)))
                            .collect::<Result<_>>()?,
                    );
                    let value = eval.multi_trace_exp(&h.inst.with_args(scaled.clone())?)?.as_f64();
                    out.measures.push(Measure::close(
                        format!("t={t}"),
                        value,
                        t * phi,
                        tol.abs + tol.rel * t * phi.abs(),
                    ));
                    let value_strict = eval.multi_trace_exp(&strict_inst.with_args(scaled)?)?.as_f64();
                    strict_dev = strict_dev.max((value_strict - t * phi_strict).abs());
                }
                out.max("strict_max_deviation", strict_dev);
                if strict_dev > STRICT_DEVIATION {
                    out.count("strict_counterexamples");
                }
            }
        }
        Ok(out)
    }
}

/// Evaluates the k-variable functional and cross-checks it against the
/// block-lifted single-variable form.
fn multi_with_lift<T: Real, E: Evaluator<T> + ?Sized>(
    eval: &E,
    inst: &MultiInstance<T>,
    label: &str,
    tol: Tolerance,
    out: &mut Evaluation,
) -> Result<f64> {
    let direct = eval.multi_trace_exp(inst)?.as_f64();
    let lifted = eval.lifted_trace_exp(inst)?.as_f64();
    let offset = ((inst.k() - 1) * inst.h().n()) as f64;
    let denom = 1.0 + direct.abs();
    let m = Measure::close(
        format!("block_lift,{label}"),
        lifted,
        direct + offset,
        LIFT_REL_FACTOR * tol.rel * denom,
    );
    out.max("max_lift_discrepancy_rel", m.gap / denom);
    out.measures.push(m);
    Ok(direct)
}

impl InstanceDump {
    /// Rebuilds the typed instance and re-runs its comparisons.
    pub fn replay<T: Real, E: Evaluator<T> + ?Sized>(&self, eval: &E, tol: Tolerance) -> Result<Evaluation> {
        Instance::<T>::from_dump(self)?.evaluate(eval, tol)
    }

    /// Gap of the comparison labelled `condition` after a replay.
    pub fn replay_gap<T: Real, E: Evaluator<T> + ?Sized>(
        &self,
        eval: &E,
        tol: Tolerance,
        condition: &str,
    ) -> Result<f64> {
        self.replay::<T, E>(eval, tol)?
            .measures
            .into_iter()
            .find(|m| m.condition == condition)
            .map(|m| m.gap)
            .ok_or_else(|| Error::InvalidArgument(format!("no comparison labelled {condition}")))
    }
}
