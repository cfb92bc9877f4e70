use entropylab::verifiers::*;
use entropylab::RngSeed;
use proptest::prelude::*;

#[test]
fn sh_convexity_seed_42() {
    let cfg = CheckConfig {
        seed: RngSeed(42),
        ..CheckKind::ShConvexity.default_config()
    };
    let report = check_sh_convexity(&cfg).unwrap();
    assert!(report.passed);
    assert_eq!(report.trials_run, 500);
}

#[test]
fn k_one_multi_matches_phi_family() {
    let cfg = CheckConfig {
        dims: vec![Dims::new(1, 3, 2)],
        trials: 30,
        ..CheckKind::MultiConcavity.default_config()
    };
    let report = check_multi_concavity(&cfg).unwrap();
    assert!(report.passed);
    assert!(report.metric("max_lift_discrepancy_rel") <= 1e-12);
}

#[test]
fn reports_round_trip_through_json() {
    let report = check_gibbs_identity(&CheckConfig {
        trials: 5,
        ..CheckKind::GibbsIdentity.default_config()
    })
    .unwrap();
    let back: CheckReport = serde_json::from_str(&report.to_json_pretty()).unwrap();
    assert_eq!(back, report);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // trial i depends only on (seed, i): not on the trial count or on other trials
    #[test]
    fn sampling_is_a_pure_function_of_seed_and_index(seed in any::<u64>(), i in 0usize..50, kind_ix in 0usize..8) {
        let kind = CheckKind::ALL[kind_ix];
        let small = CheckConfig { seed: RngSeed(seed), trials: i + 1, ..kind.default_config() };
        let large = CheckConfig { trials: 1000, ..small.clone() };
        let a = sample::<f64>(kind, &small, i).unwrap().dump();
        let b = sample::<f64>(kind, &large, i).unwrap().dump();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dumps_replay_bit_for_bit(seed in any::<u64>(), i in 0usize..20, kind_ix in 0usize..8) {
        let kind = CheckKind::ALL[kind_ix];
        let cfg = CheckConfig { seed: RngSeed(seed), ..kind.default_config() };
        let inst = sample::<f64>(kind, &cfg, i).unwrap();
        let direct = inst.evaluate(&Reference, cfg.tolerance()).unwrap();
        let text = serde_json::to_string(&inst.dump()).unwrap();
        let dump: InstanceDump = serde_json::from_str(&text).unwrap();
        let replayed = dump.replay::<f64, _>(&Reference, cfg.tolerance()).unwrap();
        prop_assert_eq!(direct.measures, replayed.measures);
    }
}
