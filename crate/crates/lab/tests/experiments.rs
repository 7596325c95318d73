use schedlab::config::{
    CovarianceConfig, CriticalLoadingConfig, HeavyTrafficConfig, LimitDistributionConfig, ModelSpec, ServiceName,
    Sg1FcltConfig,
};
use schedlab::experiments::run;
use schedlab::ExperimentConfig;

fn pareto(alpha: f64) -> ModelSpec {
    ModelSpec::SymmetricPareto { c: 0.25, alpha }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn output_is_independent_of_worker_count() {
    let cfgs = [
        ExperimentConfig::Covariance(CovarianceConfig {
            n_grid: vec![2, 3],
            mc_n: vec![3],
            replications: 300,
            ..Default::default()
        }),
        ExperimentConfig::CriticalLoading(CriticalLoadingConfig { t_grid: vec![1e3, 2e3], ..Default::default() }),
        ExperimentConfig::LimitDistribution(LimitDistributionConfig {
            s_grid: vec![0.25],
            n: 50,
            replications: 300,
            ..Default::default()
        }),
    ];
    for cfg in cfgs {
        let one = in_pool(1, || run(&cfg).unwrap().to_csv());
        let four = in_pool(4, || run(&cfg).unwrap().to_csv());
        assert_eq!(one, four, "{}", cfg.name());
    }
}

#[test]
fn degenerate_covariance_vanishes() {
    let cfg = ExperimentConfig::Covariance(CovarianceConfig {
        model: ModelSpec::Zero,
        mc_n: vec![3],
        replications: 200,
        ..Default::default()
    });
    let res = run(&cfg).unwrap();
    assert_eq!(res.check_passed("degenerate_cov_zero"), Some(true));
    assert_eq!(res.check_passed("cov_nonpositive"), Some(true));
}

#[test]
fn degenerate_critical_workload_never_exceeds_one() {
    let cfg = ExperimentConfig::CriticalLoading(CriticalLoadingConfig {
        model: ModelSpec::Zero,
        t_grid: vec![1e3, 1e4],
        ..Default::default()
    });
    let res = run(&cfg).unwrap();
    assert_eq!(res.check_passed("degenerate_w_at_most_one"), Some(true));
    let scaled = res.value(&["10000"], "scaled_median").unwrap();
    assert!(scaled <= 1.0 * (1e4f64).ln().ln() / (1e4f64).ln());
}

#[test]
fn heavier_tails_give_larger_critical_workload() {
    let median = |alpha: f64| {
        let cfg = ExperimentConfig::CriticalLoading(CriticalLoadingConfig {
            model: pareto(alpha),
            t_grid: vec![1e4],
            ..Default::default()
        });
        run(&cfg).unwrap().value(&["10000"], "scaled_median").unwrap()
    };
    let (heavy, light) = (median(1.5), median(3.0));
    assert!(heavy > light, "alpha 1.5: {heavy}, alpha 3: {light}");
}

#[test]
fn degenerate_heavy_traffic_scaled_values_are_small() {
    let cfg = ExperimentConfig::HeavyTraffic(HeavyTrafficConfig {
        model: ModelSpec::Zero,
        rho_grid: vec![0.9, 0.99],
        replications: 200,
        burnin_check: false,
        ..Default::default()
    });
    let res = run(&cfg).unwrap();
    for rho in ["0.9", "0.99"] {
        let q3 = res.value(&[rho, "20"], "scaled_q3").unwrap();
        let rho_f: f64 = rho.parse().unwrap();
        let x = 1.0 / (1.0 - rho_f);
        assert!(q3 <= x.ln().ln() / x.ln(), "rho {rho}: {q3}");
    }
}

#[test]
fn deterministic_services_statistic_shrinks() {
    let cfg = ExperimentConfig::Sg1Fclt(Sg1FcltConfig {
        service: ServiceName::Deterministic,
        t_grid: vec![1e3, 1e4, 1e5],
        replications: 200,
        variance_replications: 0,
        ..Default::default()
    });
    let res = run(&cfg).unwrap();
    assert_eq!(res.check_passed("median_decreasing"), Some(true));
    // With unit services the statistic is sup|N(s) − s|/√t, bounded by
    // (sup|N(s) − s| + 1)/√t; medians of the bounded count error scale as t^{-1/2}.
    let a = res.value(&["1000"], "sup_median").unwrap();
    let b = res.value(&["100000"], "sup_median").unwrap();
    assert!(b < a / 3.0, "{a} -> {b}");
}

#[test]
fn degenerate_limit_law_is_two_point() {
    let cfg = ExperimentConfig::LimitDistribution(LimitDistributionConfig {
        model: ModelSpec::Zero,
        s_grid: vec![0.5],
        n: 100,
        replications: 2000,
        ..Default::default()
    });
    let res = run(&cfg).unwrap();
    assert_eq!(res.check_passed("ks_accepts_all"), Some(true));
    let m = res.find(&["0.5", "100"], "direct_mean").unwrap();
    let (lo, hi) = m.ci.unwrap();
    assert!(lo <= 0.0 && 0.0 <= hi, "mean of the ±1/2 law");
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let cfg = ExperimentConfig::CriticalLoading(CriticalLoadingConfig { replications: 10, ..Default::default() });
    assert!(run(&cfg).is_err());
    let cfg = ExperimentConfig::HeavyTraffic(HeavyTrafficConfig { horizon_mult: 5.0, ..Default::default() });
    assert!(run(&cfg).is_err());
}
