use schedlab_core::perturbation::PerturbationModel;
use schedlab_core::queue::{steady_workload_sample, sup_centered_diff, workload, JobSizes};
use schedlab_core::stats::variance_ci;
use schedlab_core::traffic::generate_path;

use super::{p, push_location, replicate, streams};
use crate::config::{CriticalLoadingConfig, HeavyTrafficConfig, ServiceName, Sg1FcltConfig};
use crate::output::ExperimentResult;
use crate::Result;

const CRITICAL_ANCHOR: &str = "workload at critical load grows like log t / log log t with constant 1/alpha";
const HEAVY_ANCHOR: &str =
    "steady-state workload as utilization approaches one, scaled by log log(1/(1-rho)) / log(1/(1-rho))";
const FCLT_ANCHOR: &str = "scheduled and deterministic arrivals carry the same cumulative work up to o(sqrt t)";

/// `log log x / log x`.
fn scaling(x: f64) -> f64 {
    x.ln().ln() / x.ln()
}

pub fn run_critical_loading(cfg: &CriticalLoadingConfig) -> Result<ExperimentResult> {
    let model = cfg.model.build()?;
    let echo = crate::ExperimentConfig::CriticalLoading(cfg.clone()).echo();
    let mut res = ExperimentResult::new("critical_loading", CRITICAL_ANCHOR, echo, &["t"]);
    let t_max = cfg.t_grid.iter().copied().fold(0.0, f64::max);
    let f = streams(cfg.seed, "critical_loading", "paths");
    // One path per replication, read at every grid time.
    let traces = replicate(cfg.replications, |r| {
        let path = generate_path(&model, 0.0, t_max, None, &mut f.stream(r), cfg.eps)?;
        Ok(workload(&path, 1.0, &cfg.t_grid, JobSizes::Unit)?.grid)
    })?;
    let mut prev_median: Option<f64> = None;
    let mut max_w_all = 0.0f64;
    for (k, &t) in cfg.t_grid.iter().enumerate() {
        let params = [p(t)];
        let raw: Vec<f64> = traces.iter().map(|g| g[k].1).collect();
        let max_w = raw.iter().copied().fold(0.0, f64::max);
        max_w_all = max_w_all.max(max_w);
        let scaled: Vec<f64> = raw.iter().map(|w| w * scaling(t)).collect();
        let s = push_location(&mut res, &params, "scaled_", &scaled)?;
        res.push(&params, "max_w", max_w, None, cfg.replications);
        if let Some(prev) = prev_median {
            res.push(&params, "median_ratio_to_previous", s.median / prev, None, cfg.replications);
        }
        prev_median = Some(s.median);
    }
    if matches!(model, PerturbationModel::Degenerate) {
        res.check("degenerate_w_at_most_one", max_w_all <= 1.0);
    }
    Ok(res)
}

pub fn run_heavy_traffic(cfg: &HeavyTrafficConfig) -> Result<ExperimentResult> {
    let model = cfg.model.build()?;
    let echo = crate::ExperimentConfig::HeavyTraffic(cfg.clone()).echo();
    let mut res = ExperimentResult::new("heavy_traffic", HEAVY_ANCHOR, echo, &["rho", "horizon_mult"]);
    let mut burnin_ok = true;
    for &rho in &cfg.rho_grid {
        let scale = scaling(1.0 / (1.0 - rho));
        let sample = |mult: f64| -> Result<Vec<f64>> {
            let f = streams(cfg.seed, "heavy_traffic", &format!("rho={rho},mult={mult}"));
            replicate(cfg.replications, |r| {
                Ok(steady_workload_sample(&model, rho, mult, &mut f.stream(r), cfg.eps)? * scale)
            })
        };
        let base = sample(cfg.horizon_mult)?;
        let s = push_location(&mut res, &[p(rho), p(cfg.horizon_mult)], "scaled_", &base)?;
        if cfg.burnin_check {
            let mult = 2.0 * cfg.horizon_mult;
            let params = [p(rho), p(mult)];
            let d = push_location(&mut res, &params, "scaled_", &sample(mult)?)?;
            let shift = (d.median - s.median).abs();
            let iqr = s.q3 - s.q1;
            res.push(&params, "median_shift", shift, None, cfg.replications);
            res.push(&params, "iqr_at_base_horizon", iqr, None, cfg.replications);
            burnin_ok &= shift < iqr;
        }
    }
    if cfg.burnin_check {
        res.check("burnin_shift_below_iqr", burnin_ok);
    }
    Ok(res)
}

pub fn run_sg1_fclt(cfg: &Sg1FcltConfig) -> Result<ExperimentResult> {
    let model = cfg.model.build()?;
    let service = cfg.service.spec();
    let echo = crate::ExperimentConfig::Sg1Fclt(cfg.clone()).echo();
    let mut res = ExperimentResult::new("sg1_fclt", FCLT_ANCHOR, echo, &["t"]);
    let t_max = cfg.t_grid.iter().copied().fold(0.0, f64::max);
    let f = streams(cfg.seed, "sg1_fclt", "sup");
    let stats = replicate(cfg.replications, |r| {
        let mut rng = f.stream(r);
        let path = generate_path(&model, 0.0, t_max, None, &mut rng, cfg.eps)?;
        let sizes = service.draw(path.entries().len().max(t_max as usize), &mut rng);
        cfg.t_grid
            .iter()
            .map(|&t| Ok(sup_centered_diff(&path, JobSizes::Given(&sizes), t)?))
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut medians = Vec::new();
    for (k, &t) in cfg.t_grid.iter().enumerate() {
        let xs: Vec<f64> = stats.iter().map(|v| v[k]).collect();
        medians.push(push_location(&mut res, &[p(t)], "sup_", &xs)?.median);
    }
    res.check("median_decreasing", medians.windows(2).all(|w| w[1] < w[0]));
    if let (Some(first), Some(last)) = (medians.first(), medians.last()) {
        res.check("last_median_below_half_first", *last < 0.5 * first);
    }

    // n^{-1/2}(Λ(n) − n): its variance should match var V.
    if cfg.variance_replications >= 2 && cfg.service != ServiceName::Deterministic {
        let n = cfg.variance_n;
        let g = streams(cfg.seed, "sg1_fclt", "variance");
        let xs = replicate(cfg.variance_replications, |r| {
            let mut rng = g.stream(r);
            let path = generate_path(&model, 0.0, n as f64, None, &mut rng, cfg.eps)?;
            let count = path.count(n as f64)?;
            let work: f64 = (0..count).map(|_| service.sample(&mut rng)).sum();
            Ok((work - n as f64) / (n as f64).sqrt())
        })?;
        let (var, ci) = variance_ci(&xs)?;
        let params = [n.to_string()];
        res.push(&params, "scaled_work_variance", var, Some(ci), cfg.variance_replications);
        res.push(&params, "service_variance", service.variance(), None, 0);
        res.check("variance_ci_covers_service_variance", ci.0 <= service.variance() && service.variance() <= ci.1);
    }
    Ok(res)
}
