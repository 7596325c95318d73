use proptest::prelude::*;
use schedlab_core::perturbation::{PerturbationModel, TailParams};
use schedlab_core::rng::StreamFactory;
use schedlab_core::stats::ks_one_sample;

fn models() -> Vec<PerturbationModel> {
    vec![
        PerturbationModel::symmetric_pareto(0.25, 2.0).unwrap(),
        PerturbationModel::pareto(0.1, 1.5, 0.4, 3.0).unwrap(),
        PerturbationModel::pareto(0.5, 2.5, 0.5, 1.2).unwrap(),
        PerturbationModel::laplace(1.0).unwrap(),
        PerturbationModel::two_sided_exp(0.25, 0.5, 1.0, 2.0).unwrap(),
        PerturbationModel::Degenerate,
    ]
}

fn pareto_strategy() -> impl Strategy<Value = PerturbationModel> {
    (0.0..0.5f64, 1.01..6.0f64, 0.0..0.5f64, 1.01..6.0f64)
        .prop_map(|(c1, a1, c2, a2)| PerturbationModel::pareto(c1, a1, c2, a2).unwrap())
}

fn exp_strategy() -> impl Strategy<Value = PerturbationModel> {
    (0.01..0.99f64, 0.1..5.0f64, 0.1..5.0f64).prop_map(|(share, b1, b2)| {
        // d1/β1 = share, d2/β2 = 1 − share.
        PerturbationModel::two_sided_exp(share * b1, b1, (1.0 - share) * b2, b2).unwrap()
    })
}

fn any_model() -> impl Strategy<Value = PerturbationModel> {
    prop_oneof![pareto_strategy(), exp_strategy(), Just(PerturbationModel::Degenerate)]
}

proptest! {
    #[test]
    fn partition_mass_is_one(m in any_model()) {
        let total = m.interval_prob(f64::NEG_INFINITY, -1.0).unwrap()
            + m.interval_prob(-1.0, 1.0).unwrap()
            + m.interval_prob(1.0, f64::INFINITY).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn survival_is_monotone(m in any_model(), lo in -50.0..0.0f64, span in 0.1..100.0f64) {
        let mut prev = f64::INFINITY;
        for k in 0..1000 {
            let x = lo + span * k as f64 / 999.0;
            let s = m.survival(x);
            prop_assert!(s <= prev && (0.0..=1.0).contains(&s));
            prev = s;
        }
    }

    #[test]
    fn interval_prob_is_survival_difference(m in any_model(), a in -20.0..20.0f64, len in 0.0..10.0f64) {
        let b = a + len;
        let p = m.interval_prob(a, b).unwrap();
        prop_assert!(p >= 0.0);
        prop_assert!((p - (m.survival(a) - m.survival(b))).abs() < 1e-13);
    }

    #[test]
    fn density_coefficient_is_exponent_times_survival(m in pareto_strategy()) {
        let TailParams::Power(t) = m.tail_params() else { unreachable!() };
        let (c1, c2) = t.survival_coefficients();
        let (a1, a2) = t.exponents();
        prop_assert_eq!(t.density_coefficients(), (a1 * c1, a2 * c2));
        // …and it is the derivative of the survival function in the tail.
        let x: f64 = 7.0;
        let h = 1e-5;
        let dens = (m.survival(x - h) - m.survival(x + h)) / (2.0 * h);
        prop_assert!((dens / (t.density_coefficients().0 * x.powf(-a1 - 1.0)) - 1.0).abs() < 1e-5 || c1 == 0.0);
    }

    #[test]
    fn mean_abs_is_finite(m in any_model()) {
        prop_assert!(m.mean_abs().is_finite() && m.mean_abs() >= 0.0);
    }
}

#[test]
fn survival_at_two_matches_monte_carlo() {
    // 1e7 inverse-CDF draws against the closed form 0.25·2^-2.
    let m = PerturbationModel::symmetric_pareto(0.25, 2.0).unwrap();
    assert_eq!(m.survival(2.0), 0.0625);
    let mut rng = StreamFactory::new(11, "survival-mc").stream(0);
    let n = 10_000_000;
    let hits = (0..n).filter(|_| m.sample(&mut rng) > 2.0).count();
    let p = hits as f64 / n as f64;
    let se = (0.0625f64 * 0.9375 / n as f64).sqrt();
    assert!((p - 0.0625).abs() < 4.0 * se, "{p}");
}

#[test]
fn sampling_examples() {
    let n = 1_000_000;
    let m = PerturbationModel::symmetric_pareto(0.25, 2.0).unwrap();
    let mut rng = StreamFactory::new(12, "sample").stream(0);
    let p = (0..n).filter(|_| m.sample(&mut rng) > 2.0).count() as f64 / n as f64;
    // 4σ band; σ ≈ 2.4e-4 at this sample size.
    assert!((p - 0.0625).abs() < 4.0 * (0.0625f64 * 0.9375 / n as f64).sqrt(), "{p}");

    let lap = PerturbationModel::laplace(1.0).unwrap();
    let mut rng = StreamFactory::new(12, "sample").stream(1);
    let mean = (0..n).map(|_| lap.sample(&mut rng)).sum::<f64>() / n as f64;
    assert!(mean.abs() < 0.005, "{mean}");

    let mut rng = StreamFactory::new(12, "sample").stream(2);
    assert!((0..1000).all(|_| PerturbationModel::Degenerate.sample(&mut rng) == 0.0));
}

#[test]
fn empirical_cdf_passes_ks() {
    let f = StreamFactory::new(13, "ks");
    for (k, m) in models().into_iter().enumerate() {
        if m == PerturbationModel::Degenerate {
            continue;
        }
        let mut rng = f.stream(k as u64);
        let xs: Vec<f64> = (0..1_000_000).map(|_| m.sample(&mut rng)).collect();
        let r = ks_one_sample(&xs, |x| m.cdf(x), 0.001).unwrap();
        assert!(!r.reject, "{m:?}: D = {} > {}", r.statistic, r.critical);
    }
}

#[test]
fn mean_abs_matches_monte_carlo() {
    let f = StreamFactory::new(14, "mean-abs");
    for (k, m) in models().into_iter().enumerate() {
        let mut rng = f.stream(k as u64);
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| m.sample(&mut rng).abs()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        // Heavy tails: compare on a loose band (α ≥ 1.2 has finite mean only).
        assert!((mean - m.mean_abs()).abs() < 0.1 * m.mean_abs().max(0.1), "{m:?} {mean}");
    }
}
