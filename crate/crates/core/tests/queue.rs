use proptest::prelude::*;
use schedlab_core::perturbation::PerturbationModel;
use schedlab_core::queue::*;
use schedlab_core::rng::StreamFactory;
use schedlab_core::traffic::{generate_path, ArrivalPath, DEFAULT_EPS};

fn path(seed: u64, t: f64) -> ArrivalPath {
    let m = PerturbationModel::symmetric_pareto(0.25, 2.0).unwrap();
    generate_path(&m, 0.0, t, None, &mut StreamFactory::new(seed, "queue").stream(0), DEFAULT_EPS).unwrap()
}

// W(t) = max(0, sup_k {Σ_{j≥k, a_j≤t} V_j − (t − a_k)/ρ}), written out here
// independently of the library.
fn sup_formula(times: &[f64], sizes: &[f64], rho: f64, t: f64) -> f64 {
    let mut best = 0.0f64;
    let mut tail = 0.0;
    let idx: Vec<usize> = (0..times.len()).filter(|&k| times[k] <= t).collect();
    for &k in idx.iter().rev() {
        tail += sizes[k];
        best = best.max(tail - (t - times[k]) / rho);
    }
    best
}

proptest! {
    #[test]
    fn recursion_matches_sup_formula(seed in any::<u64>(), t in 1.0..45.0f64, rho in 0.3..=1.0f64) {
        let p = path(seed, t);
        prop_assume!(p.entries().len() <= 50);
        let mut rng = StreamFactory::new(seed, "sizes").stream(0);
        let sizes = ServiceSpec::Exponential.draw(p.entries().len(), &mut rng);
        let grid: Vec<f64> = (0..=40).map(|k| (t * k as f64 / 40.0).min(t)).collect();
        let tr = workload(&p, rho, &grid, JobSizes::Given(&sizes)).unwrap();
        let times: Vec<f64> = p.times().collect();
        for &(s, w) in &tr.grid {
            let want = sup_formula(&times, &sizes, rho, s);
            prop_assert!((w - want).abs() <= 1e-12 * want.max(1.0), "t={} {} vs {}", s, w, want);
            let lib = workload_by_max_formula(&p, rho, s, JobSizes::Given(&sizes)).unwrap();
            prop_assert!((w - lib).abs() <= 1e-12 * lib.max(1.0));
        }
        for &(a, w) in &tr.epochs {
            prop_assert!((w - sup_formula(&times, &sizes, rho, a)).abs() <= 1e-12 * w.max(1.0));
        }
    }

    #[test]
    fn workload_is_monotone_in_rho(seed in any::<u64>(), r1 in 0.2..1.0f64, r2 in 0.2..1.0f64) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let p = path(seed, 30.0);
        let grid: Vec<f64> = (0..=60).map(|k| k as f64 * 0.5).collect();
        let a = workload(&p, lo, &grid, JobSizes::Unit).unwrap();
        let b = workload(&p, hi, &grid, JobSizes::Unit).unwrap();
        for (x, y) in a.grid.iter().zip(&b.grid) {
            prop_assert!(x.1 <= y.1 + 1e-12);
        }
    }

    #[test]
    fn workload_growth_is_bounded_by_arrivals(seed in any::<u64>()) {
        let p = path(seed, 40.0);
        let grid: Vec<f64> = (0..=80).map(|k| k as f64 * 0.5).collect();
        let tr = workload(&p, 1.0, &grid, JobSizes::Unit).unwrap();
        for w in tr.grid.windows(2) {
            let arrived = (p.count(w[1].0).unwrap() - p.count(w[0].0).unwrap()) as f64;
            prop_assert!(w[1].1 - w[0].1 <= arrived + 1e-12);
            prop_assert!(w[1].1 >= 0.0);
            prop_assert!(w[0].1 - w[1].1 <= w[1].0 - w[0].0 + 1e-12);
        }
    }
}

#[test]
fn deterministic_centered_difference() {
    let mut rng = StreamFactory::new(0, "d").stream(0);
    let p = generate_path(&PerturbationModel::Degenerate, 0.0, 100.0, Some(0.5), &mut rng, DEFAULT_EPS).unwrap();
    // Arrivals at k + 1/2 lead the lattice by at most one job.
    let d = sup_centered_diff(&p, JobSizes::Unit, 100.0).unwrap();
    assert!((d - 0.1).abs() < 1e-15);
}

#[test]
fn short_service_sequence_is_an_error() {
    let p = path(3, 20.0);
    let sizes = vec![1.0; 3];
    assert!(matches!(
        workload(&p, 0.9, &[1.0], JobSizes::Given(&sizes)),
        Err(schedlab_core::Error::ShortServiceSequence { .. })
    ));
    assert!(matches!(workload(&p, 1.2, &[1.0], JobSizes::Unit), Err(schedlab_core::Error::InvalidRho(_))));
}

#[test]
fn steady_workload_grows_with_load() {
    let m = PerturbationModel::laplace(1.0).unwrap();
    let f = StreamFactory::new(31, "steady");
    let mean = |rho: f64| {
        (0..400).map(|r| steady_workload_sample(&m, rho, 20.0, &mut f.stream(r), DEFAULT_EPS).unwrap()).sum::<f64>()
            / 400.0
    };
    let (a, b) = (mean(0.5), mean(0.9));
    assert!(a > 0.0 && b > a, "{a} {b}");
}
