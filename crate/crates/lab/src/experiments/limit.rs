use schedlab_core::stats::{ks_two_sample, summarize};
use schedlab_core::traffic::{direct_centered_count, sample_limit_rv};

use super::{p, replicate, streams};
use crate::config::LimitDistributionConfig;
use crate::output::ExperimentResult;
use crate::Result;

const ANCHOR: &str = "centered count N(n+s)-(n+s) against its limit law -s + 1{U<=s} + (E'(s)-L'(s)) - (E(0)-L(0))";

pub fn run_limit_distribution(cfg: &LimitDistributionConfig) -> Result<ExperimentResult> {
    let model = cfg.model.build()?;
    let echo = crate::ExperimentConfig::LimitDistribution(cfg.clone()).echo();
    let mut res = ExperimentResult::new("limit_distribution", ANCHOR, echo, &["s", "n"]);
    let mut all_accept = true;
    for &s in &cfg.s_grid {
        let direct_f = streams(cfg.seed, "limit_distribution", &format!("direct,s={s}"));
        let limit_f = streams(cfg.seed, "limit_distribution", &format!("limit,s={s}"));
        let direct = replicate(cfg.replications, |r| {
            Ok(direct_centered_count(&model, cfg.n, s, &mut direct_f.stream(r), cfg.eps)?)
        })?;
        let limit = replicate(cfg.replications, |r| Ok(sample_limit_rv(&model, s, &mut limit_f.stream(r), cfg.eps)?))?;
        let ks = ks_two_sample(&direct, &limit, cfg.level)?;
        let params = [p(s), cfg.n.to_string()];
        let reps = cfg.replications;
        res.push(&params, "ks_statistic", ks.statistic, None, reps);
        res.push(&params, "ks_critical", ks.critical, None, reps);
        res.push(&params, "ks_p_value", ks.p_value, None, reps);
        res.push(&params, "ks_reject", if ks.reject { 1.0 } else { 0.0 }, None, reps);
        let d = summarize(&direct)?;
        let l = summarize(&limit)?;
        res.push(&params, "direct_mean", d.mean, Some(d.mean_ci), reps);
        res.push(&params, "limit_mean", l.mean, Some(l.mean_ci), reps);
        res.check(&format!("ks_accepts_s={}", p(s)), !ks.reject);
        all_accept &= !ks.reject;
    }
    res.check("ks_accepts_all", all_accept);
    Ok(res)
}
