use std::f64::consts::{E, FRAC_1_SQRT_2, LN_2, SQRT_2};

use proptest::prelude::*;

use super::instance::block_is_zero;
use super::*;
use crate::matrix::{random_contraction_tuple, random_hermitian, random_pd, ContractionTuple, RngSeed};
use crate::scalar::Complex;

fn pd(v: &[f64]) -> PositiveDefinite<f64> {
    PositiveDefinite::from_diagonal(v).unwrap()
}

fn scalar(x: f64) -> ComplexMatrix<f64> {
    ComplexMatrix::from_real(1, 1, &[x]).unwrap()
}

fn herm(v: &[f64]) -> Hermitian<f64> {
    Hermitian::from_real_diagonal(v).unwrap()
}

fn random_instance(k: usize, m: usize, n: usize, identity: bool, seed: u64) -> MultiInstance<f64> {
    let s = RngSeed(seed);
    let l = random_hermitian::<f64>(n, 1.0, s.derive(0)).unwrap();
    let h = random_contraction_tuple::<f64>(k, m, n, identity, s.derive(1)).unwrap();
    let a = (0..k)
        .map(|i| random_pd::<f64>(m, [0.05, 5.0], s.derive(2 + i as u64)).unwrap())
        .collect();
    MultiInstance::positive(l, h, a).unwrap()
}

#[test]
fn relative_entropy_vanishes_on_the_diagonal() {
    let a = random_pd::<f64>(4, [0.05, 5.0], RngSeed(1)).unwrap();
    assert!(relative_entropy(&a, &a).unwrap().abs() <= 1e-10);
}

#[test]
fn relative_entropy_scalar() {
    // 2 ln 2 - 2 ln 1 - 2 + 1
    let v = relative_entropy(&pd(&[2.0]), &pd(&[1.0])).unwrap();
    assert!((v - (2.0 * LN_2 - 1.0)).abs() < 1e-15);
    assert!((v - 0.386294).abs() < 1e-6);
}

#[test]
fn relative_entropy_dimension_mismatch() {
    assert!(matches!(
        relative_entropy(&pd(&[1.0]), &pd(&[1.0, 2.0])),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn reduced_entropy_with_identity_is_relative_entropy() {
    for seed in 0..20 {
        let a = random_pd::<f64>(4, [0.05, 5.0], RngSeed(seed)).unwrap();
        let b = random_pd::<f64>(4, [0.05, 5.0], RngSeed(seed + 100)).unwrap();
        let s = relative_entropy(&a, &b).unwrap();
        let sh = reduced_relative_entropy(&a, &b, &ComplexMatrix::identity(4)).unwrap();
        assert_eq!(s, sh);
    }
}

#[test]
fn reduced_entropy_with_zero_contraction() {
    let a = random_pd::<f64>(3, [0.05, 5.0], RngSeed(2)).unwrap();
    let b = random_pd::<f64>(3, [0.05, 5.0], RngSeed(3)).unwrap();
    let expected: f64 = a.spectral().eigenvalues().iter().map(|x| x * x.ln() - x).sum::<f64>() + b.trace();
    let v = reduced_relative_entropy(&a, &b, &ComplexMatrix::zeros(3, 3)).unwrap();
    assert!((v - expected).abs() < 1e-12);
}

#[test]
fn reduced_entropy_scalar() {
    // e ln e - (1/4) e ln e - e + e = 3e/4
    let v = reduced_relative_entropy(&pd(&[E]), &pd(&[E]), &scalar(0.5)).unwrap();
    assert!((v - 0.75 * E).abs() < 1e-14);
    assert!((v - 2.038711).abs() < 1e-6);
}

#[test]
fn reduced_entropy_rejects_expansions_and_bad_shapes() {
    assert!(matches!(
        reduced_relative_entropy(&pd(&[1.0]), &pd(&[1.0]), &scalar(1.5)),
        Err(Error::NotAContraction { .. })
    ));
    assert!(matches!(
        reduced_relative_entropy(&pd(&[1.0]), &pd(&[1.0, 1.0]), &scalar(0.5)),
        Err(Error::Dimension(_))
    ));
    // rectangular: A is 1x1, B is 2x2, H is 1x2
    let h = ComplexMatrix::from_real(1, 2, &[0.6, 0.0]).unwrap();
    assert!(reduced_relative_entropy(&pd(&[2.0]), &pd(&[1.0, 3.0]), &h).is_ok());
}

#[test]
fn lieb_trace_endpoints() {
    let a = random_pd::<f64>(3, [0.05, 5.0], RngSeed(4)).unwrap();
    let b = random_pd::<f64>(3, [0.05, 5.0], RngSeed(5)).unwrap();
    let id = ComplexMatrix::identity(3);
    assert!((lieb_trace(&a, &b, &id, 0.0).unwrap() - a.trace()).abs() < 1e-12);
    assert!((lieb_trace(&b, &b, &id, 1.0).unwrap() - b.trace()).abs() < 1e-12);
    assert!(matches!(lieb_trace(&a, &b, &id, -0.1), Err(Error::InvalidArgument(_))));
}

#[test]
fn lieb_trace_scalar() {
    let (a, b) = (2.5_f64, 0.7_f64);
    for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
        let v = lieb_trace(&pd(&[a]), &pd(&[b]), &scalar(1.0), p).unwrap();
        assert!((v - b.powf(p) * a.powf(1.0 - p)).abs() < 1e-14);
    }
}

#[test]
fn derivative_at_zero_examples() {
    let a = random_pd::<f64>(3, [0.05, 5.0], RngSeed(6)).unwrap();
    assert!(
        lieb_trace_derivative_at_zero(&a, &a, &ComplexMatrix::identity(3))
            .unwrap()
            .abs()
            < 1e-12
    );

    // d/dp b^p a^(1-p) at 0 = a ln(b / a)
    let (x, y) = (2.5_f64, 0.7_f64);
    let v = lieb_trace_derivative_at_zero(&pd(&[x]), &pd(&[y]), &scalar(1.0)).unwrap();
    assert!((v - x * (y / x).ln()).abs() < 1e-14);
}

#[test]
fn derivative_matches_finite_difference() {
    let a = random_pd::<f64>(3, [0.05, 5.0], RngSeed(7)).unwrap();
    let b = random_pd::<f64>(3, [0.05, 5.0], RngSeed(8)).unwrap();
    let h = random_contraction_tuple::<f64>(1, 3, 3, false, RngSeed(9))
        .unwrap()
        .blocks()[0]
        .clone();
    let p = 1e-4;
    let slope = (lieb_trace(&a, &b, &h, p).unwrap() - lieb_trace(&a, &b, &h, 0.0).unwrap()) / p;
    let d = lieb_trace_derivative_at_zero(&a, &b, &h).unwrap();
    assert!((slope - d).abs() <= 1e-3, "{slope} vs {d}");
}

#[test]
fn trace_exp_functional_examples() {
    let a = random_pd::<f64>(3, [0.05, 5.0], RngSeed(10)).unwrap();
    let v = trace_exp_functional(&a, &Hermitian::zeros(3), &ComplexMatrix::identity(3)).unwrap();
    assert!((v - a.trace()).abs() <= 1e-12 * a.trace());

    // exp(0 + (1/4) ln 4) = sqrt(2)
    let v = trace_exp_functional(&pd(&[4.0]), &herm(&[0.0]), &scalar(0.5)).unwrap();
    assert!((v - SQRT_2).abs() < 1e-15);

    let inst = random_instance(1, 3, 2, false, 11);
    let v = trace_exp_functional(&inst.a_list().unwrap()[0], inst.l(), &inst.h().blocks()[0]).unwrap();
    assert!(v > 0.0);

    assert!(matches!(
        trace_exp_functional(&pd(&[4.0]), &herm(&[0.0]), &scalar(1.1)),
        Err(Error::NotAContraction { .. })
    ));
    assert!(matches!(
        trace_exp_functional(&pd(&[4.0]), &herm(&[0.0, 0.0]), &scalar(0.5)),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn multi_trace_exp_reduces_to_single() {
    let inst = random_instance(1, 3, 3, false, 12);
    let single = trace_exp_functional(&inst.a_list().unwrap()[0], inst.l(), &inst.h().blocks()[0]).unwrap();
    assert!((multi_trace_exp(&inst).unwrap() - single).abs() <= 1e-12 * single);
}

fn scalar_pair() -> MultiInstance<f64> {
    let h = ContractionTuple::new(vec![scalar(FRAC_1_SQRT_2), scalar(FRAC_1_SQRT_2)], true).unwrap();
    MultiInstance::positive(herm(&[0.0]), h, vec![pd(&[4.0]), pd(&[9.0])]).unwrap()
}

#[test]
fn multi_trace_exp_scalar_pair() {
    // exp((ln 4 + ln 9) / 2) = sqrt(36)
    assert!((multi_trace_exp(&scalar_pair()).unwrap() - 6.0).abs() < 1e-13);
}

#[test]
fn block_lift_scalar_pair() {
    let lift = block_lift(&scalar_pair()).unwrap();
    assert_eq!(lift.offset(), 1.0);
    assert!((lift.trace_exp().unwrap() - 7.0).abs() < 1e-13);
}

#[test]
fn block_lift_single_block_is_the_instance() {
    let inst = random_instance(1, 2, 3, false, 13);
    let lift = block_lift(&inst).unwrap();
    assert_eq!(lift.a_hat, inst.a_list().unwrap()[0]);
    assert_eq!(&lift.l_hat, inst.l());
    assert_eq!(&lift.h_hat, &inst.h().blocks()[0]);
    assert_eq!(lift.offset(), 0.0);
}

#[test]
fn block_lift_layout_and_identity() {
    let inst = random_instance(3, 2, 2, false, 14);
    let lift = block_lift(&inst).unwrap();
    let a = lift.a_hat.as_matrix();
    for i in 0..3 {
        for j in 0..3 {
            let block = a.view((2 * i, 2 * j), (2, 2)).into_owned();
            if i == j {
                assert_eq!(&block, inst.a_list().unwrap()[i].as_matrix());
            } else {
                assert!(block_is_zero(&block));
            }
        }
    }
    assert!(block_is_zero(&lift.h_hat.as_matrix().columns(2, 4).into_owned()));
    assert!(lift.h_hat.operator_norm().unwrap() <= 1.0 + 1e-10);

    let direct = multi_trace_exp(&inst).unwrap();
    let lifted = lift.trace_exp().unwrap();
    assert!((lifted - (direct + 2.0 * 2.0)).abs() <= 1e-9 * (1.0 + direct.abs()));
}

#[test]
fn gt_jensen_rhs_examples() {
    let (l, b) = (0.3_f64, -1.2_f64);
    let inst = MultiInstance::hermitian(
        herm(&[l]),
        ContractionTuple::new(vec![scalar(1.0)], true).unwrap(),
        vec![herm(&[b])],
    )
    .unwrap();
    let rhs = gt_jensen_rhs(&inst).unwrap();
    assert!((rhs - (l + b).exp()).abs() < 1e-14);
    assert!((gt_jensen_lhs(&inst).unwrap() - rhs).abs() < 1e-14);

    let bm = random_hermitian::<f64>(3, 1.0, RngSeed(15)).unwrap();
    let inst = MultiInstance::hermitian(
        Hermitian::zeros(3),
        ContractionTuple::new(vec![ComplexMatrix::identity(3)], true).unwrap(),
        vec![bm.clone()],
    )
    .unwrap();
    let expected = trace_exp(&bm).unwrap();
    assert!((gt_jensen_rhs(&inst).unwrap() - expected).abs() <= 1e-12 * expected);
}

#[test]
fn wrong_argument_kind_is_rejected() {
    assert!(gt_jensen_rhs(&scalar_pair()).is_err());
    let inst = MultiInstance::hermitian(
        herm(&[0.0]),
        ContractionTuple::new(vec![scalar(1.0)], true).unwrap(),
        vec![herm(&[1.0])],
    )
    .unwrap();
    assert!(multi_trace_exp(&inst).is_err());
}

#[test]
fn multi_instance_dimension_coherence() {
    let h = ContractionTuple::new(vec![scalar(0.5), scalar(0.5)], false).unwrap();
    assert!(MultiInstance::positive(herm(&[0.0]), h.clone(), vec![pd(&[1.0])]).is_err());
    assert!(MultiInstance::positive(herm(&[0.0, 0.0]), h.clone(), vec![pd(&[1.0]), pd(&[1.0])]).is_err());
    assert!(MultiInstance::positive(herm(&[0.0]), h, vec![pd(&[1.0]), pd(&[1.0, 2.0])]).is_err());
}

#[test]
fn gibbs_objective_bounds() {
    let b = random_pd::<f64>(4, [0.05, 5.0], RngSeed(16)).unwrap();
    assert!((gibbs_objective(&b, &b).unwrap() - b.trace()).abs() <= 1e-12 * b.trace());
    for s in 0..100 {
        let x = random_pd::<f64>(4, [0.05, 5.0], RngSeed(1000 + s)).unwrap();
        assert!(gibbs_objective(&x, &b).unwrap() <= b.trace() + 1e-10);
    }
}

#[test]
fn phi_objective_at_closed_form_maximizer() {
    for seed in 0..10 {
        let inst = random_instance(1, 3, 2, false, 200 + seed);
        let (a, l, h) = (&inst.a_list().unwrap()[0], inst.l(), &inst.h().blocks()[0]);
        let x = phi_maximizer(a, l, h).unwrap();
        let phi = trace_exp_functional(a, l, h).unwrap();
        let obj = phi_objective(&x, a, l, h).unwrap();
        assert!((obj - phi).abs() <= 1e-9 * phi.abs(), "{obj} vs {phi}");
    }
}

#[test]
fn real_trace_rejects_imaginary_residue() {
    let mut m = CMat::<f64>::identity(2, 2);
    m[(0, 0)] = Complex::new(1.0, 1e-3);
    assert!(matches!(real_trace(&m), Err(Error::NumericalInconsistency(_))));
    m[(0, 0)] = Complex::new(1.0, 1e-12);
    assert_eq!(real_trace(&m).unwrap(), 2.0);
}

#[test]
fn instance_file_round_trip() {
    let inst = random_instance(2, 2, 3, true, 17);
    let text = InstanceFile::from_multi(&inst).to_json_string();
    let back: MultiInstance<f64> = InstanceFile::from_json_str(&text).unwrap().multi_positive().unwrap();
    assert_eq!(back, inst);
    assert_eq!(multi_trace_exp(&back).unwrap(), multi_trace_exp(&inst).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn klein_nonnegativity(seed in any::<u64>(), dim in 1usize..7) {
        let a = random_pd::<f64>(dim, [0.05, 5.0], RngSeed(seed)).unwrap();
        let b = random_pd::<f64>(dim, [0.05, 5.0], RngSeed(seed).derive(1)).unwrap();
        prop_assert!(relative_entropy(&a, &b).unwrap() >= -1e-10);
    }

    #[test]
    fn block_lift_identity(seed in any::<u64>(), k in 1usize..5, m in 1usize..5, n in 1usize..5) {
        let inst = random_instance(k, m, n, false, seed);
        let direct = multi_trace_exp(&inst).unwrap();
        let lifted = block_lift(&inst).unwrap().trace_exp().unwrap();
        let offset = ((k - 1) * n) as f64;
        prop_assert!((lifted - (direct + offset)).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn positive_homogeneity_under_isometry(seed in any::<u64>(), k in 1usize..4, m in 1usize..4, n in 1usize..4) {
        prop_assume!(k * m >= n);
        let inst = random_instance(k, m, n, true, seed);
        let phi = multi_trace_exp(&inst).unwrap();
        for t in [0.5, 2.0, 10.0] {
            let scaled = inst
                .a_list()
                .unwrap()
                .iter()
                .map(|a| a.scale(t).unwrap())
                .collect();
            let v = multi_trace_exp(&inst.with_args(Arguments::Positive(scaled)).unwrap()).unwrap();
            prop_assert!((v - t * phi).abs() <= 1e-9 * t * phi.abs());
        }
    }
}
