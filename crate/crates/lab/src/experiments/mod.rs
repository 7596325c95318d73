//! The registered experiments.

mod covariance;
mod limit;
mod queueing;
mod tails;

use rayon::prelude::*;
use schedlab_core::rng::StreamFactory;
use schedlab_core::stats::{summarize, Summary};

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_f64, ExperimentResult};
use crate::Result;

pub use covariance::run_covariance;
pub use limit::run_limit_distribution;
pub use queueing::{run_critical_loading, run_heavy_traffic, run_sg1_fclt};
pub use tails::run_bernoulli_tails;

/// Validate and run. Parallelism comes from the ambient rayon pool.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate().map_err(|message| ConfigError::Invalid { path: "<config>".into(), message })?;
    match cfg {
        ExperimentConfig::Covariance(c) => run_covariance(c),
        ExperimentConfig::BernoulliTails(c) => run_bernoulli_tails(c),
        ExperimentConfig::CriticalLoading(c) => run_critical_loading(c),
        ExperimentConfig::HeavyTraffic(c) => run_heavy_traffic(c),
        ExperimentConfig::Sg1Fclt(c) => run_sg1_fclt(c),
        ExperimentConfig::LimitDistribution(c) => run_limit_distribution(c),
    }
}

/// `f(r)` for `r = 0..n` in parallel, collected in index order.
pub(crate) fn replicate<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

pub(crate) fn streams(seed: u64, experiment: &str, cell: &str) -> StreamFactory {
    StreamFactory::new(seed, experiment).derive(cell)
}

/// Median (with its order-statistic interval) and quartiles.
pub(crate) fn push_location(
    res: &mut ExperimentResult,
    params: &[String],
    prefix: &str,
    xs: &[f64],
) -> Result<Summary> {
    let s = summarize(xs)?;
    let n = xs.len() as u64;
    res.push(params, &format!("{prefix}median"), s.median, Some(s.median_ci), n);
    res.push(params, &format!("{prefix}q1"), s.q1, None, n);
    res.push(params, &format!("{prefix}q3"), s.q3, None, n);
    Ok(s)
}

pub(crate) fn p(v: f64) -> String {
    fmt_f64(v)
}
