use schedlab_core::perturbation::{PerturbationModel, TailParams};
use schedlab_core::quad::gauss_kronrod;
use schedlab_core::stats::Z95;
use schedlab_core::traffic::{conditional_cov, generate_path};

use super::{p, replicate, streams};
use crate::config::CovarianceConfig;
use crate::output::ExperimentResult;
use crate::Result;

const ANCHOR: &str = "conditional covariance of unit-interval arrival counts: non-positive sign and decay in the lag";

/// How `|cov(n)|` is normalized and the constant it should approach.
enum Normalization {
    /// `n^{α+1} |cov|`.
    Power {
        alpha: f64,
        limit: f64,
    },
    /// `|cov| / (n e^{-β(n+1)})` (equal rates).
    ExpEqual {
        beta: f64,
        limit: f64,
    },
    /// `|cov| e^{βn}` (unequal rates).
    ExpUnequal {
        beta: f64,
        limit: f64,
    },
    None,
}

impl Normalization {
    fn new(model: &PerturbationModel, u: f64) -> Result<Self> {
        Ok(match model.tail_params() {
            TailParams::Power(t) => {
                let (a1, a2) = t.exponents();
                let (k1, k2) = t.density_coefficients();
                let (alpha, limit) = if a1 < a2 {
                    (a1, k1)
                } else if a2 < a1 {
                    (a2, k2)
                } else {
                    (a1, k1 + k2)
                };
                Self::Power { alpha, limit }
            }
            TailParams::Exponential { d1, beta1, d2, beta2 } => {
                if beta1 == beta2 {
                    let b = beta1;
                    Self::ExpEqual { beta: b, limit: d1 * d2 / (b * b) * (1.0 - (-b).exp()).powi(2) }
                } else if beta1 < beta2 {
                    let s = weighted_sum(model, u, |j| -beta1 * (j - u))?;
                    Self::ExpUnequal { beta: beta1, limit: d1 / beta1 * beta1.exp_m1() * s }
                } else {
                    let s = weighted_sum(model, u, |j| -beta2 * (j + u))?;
                    Self::ExpUnequal { beta: beta2, limit: d2 / beta2 * (1.0 - (-beta2).exp()) * s }
                }
            }
            TailParams::NoTail => Self::None,
        })
    }

    fn apply(&self, n: u64, cov: f64) -> f64 {
        let n = n as f64;
        match *self {
            Self::Power { alpha, .. } => n.powf(alpha + 1.0) * cov.abs(),
            Self::ExpEqual { beta, .. } => cov.abs() / (n * (-beta * (n + 1.0)).exp()),
            Self::ExpUnequal { beta, .. } => cov.abs() * (beta * n).exp(),
            Self::None => cov.abs(),
        }
    }

    fn limit(&self) -> f64 {
        match *self {
            Self::Power { limit, .. } | Self::ExpEqual { limit, .. } | Self::ExpUnequal { limit, .. } => limit,
            Self::None => 0.0,
        }
    }
}

// Σ_j e^{ln_weight(j)} P(ξ + u ∈ (j−1, j]) over the integers where it matters.
fn weighted_sum(model: &PerturbationModel, u: f64, ln_weight: impl Fn(f64) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for j in -600i32..=600 {
        let j = f64::from(j);
        let prob = model.interval_prob(j - 1.0 - u, j - u)?;
        if prob > 0.0 {
            total += (ln_weight(j) + prob.ln()).exp();
        }
    }
    Ok(total)
}

/// Sample covariance of `(ΔN(1), ΔN(n))`, `ΔN(t) = N(t) − N(t−1)`, with a
/// normal interval from the spread of the centred products.
fn mc_cov(
    model: &PerturbationModel,
    u: Option<f64>,
    n: u64,
    reps: u64,
    seed: u64,
    cell: &str,
    eps: f64,
) -> Result<(f64, f64)> {
    let f = streams(seed, "covariance", cell);
    let t = n as f64;
    let pairs = replicate(reps, |r| {
        let path = generate_path(model, 0.0, t, u, &mut f.stream(r), eps)?;
        let x = path.count(1.0)? as f64;
        let y = (path.count(t)? - path.count(t - 1.0)?) as f64;
        Ok((x, y))
    })?;
    let m = reps as f64;
    let mx = pairs.iter().map(|q| q.0).sum::<f64>() / m;
    let my = pairs.iter().map(|q| q.1).sum::<f64>() / m;
    let prods: Vec<f64> = pairs.iter().map(|q| (q.0 - mx) * (q.1 - my)).collect();
    let cov = prods.iter().sum::<f64>() / (m - 1.0);
    let var = prods.iter().map(|v| (v - cov) * (v - cov)).sum::<f64>() / (m - 1.0);
    Ok((cov, (var / m).sqrt()))
}

pub fn run_covariance(cfg: &CovarianceConfig) -> Result<ExperimentResult> {
    let model = cfg.model.build()?;
    let mut res = ExperimentResult::new(
        "covariance",
        ANCHOR,
        crate::ExperimentConfig::Covariance(cfg.clone()).echo(),
        &["n", "u"],
    );
    let norm = Normalization::new(&model, cfg.u)?;
    let u = p(cfg.u);
    let blank = String::new();
    res.push(&[blank.clone(), u.clone()], "limit_constant", norm.limit(), None, 0);

    let mut all_nonpositive = true;
    for &n in &cfg.n_grid {
        let cov = conditional_cov(&model, cfg.u, n, cfg.eps)?;
        all_nonpositive &= cov <= 0.0;
        let params = [n.to_string(), u.clone()];
        res.push(&params, "cov", cov, None, 0);
        res.push(&params, "normalized", norm.apply(n, cov), None, 0);
    }

    for &n in &cfg.mc_n {
        let exact = conditional_cov(&model, cfg.u, n, cfg.eps)?;
        all_nonpositive &= exact <= 0.0;
        let (cov, se) =
            mc_cov(&model, Some(cfg.u), n, cfg.replications, cfg.seed, &format!("conditional-{n}"), cfg.eps)?;
        let params = [n.to_string(), u.clone()];
        res.push(&params, "mc_cov", cov, Some((cov - Z95 * se, cov + Z95 * se)), cfg.replications);
        res.check(&format!("mc_cov_within_4se_n={n}"), (cov - exact).abs() <= 4.0 * se);

        // E(ΔN(t) | U) = 1 for every U, so the covariance of the conditional
        // means vanishes and the unconditional covariance is the average of
        // the conditional one over U.
        let avg = gauss_kronrod(|v| conditional_cov(&model, v, n, cfg.eps).unwrap_or(f64::NAN), 0.0, 1.0, 1e-9, 200)?;
        let (ucov, use_) = mc_cov(&model, None, n, cfg.replications, cfg.seed, &format!("unconditional-{n}"), cfg.eps)?;
        let params = [n.to_string(), blank.clone()];
        res.push(&params, "cov_averaged_over_u", avg.value, None, 0);
        res.push(&params, "mc_cov", ucov, Some((ucov - Z95 * use_, ucov + Z95 * use_)), cfg.replications);
        res.check(&format!("mc_unconditional_within_4se_n={n}"), (ucov - avg.value).abs() <= 4.0 * use_);
    }
    res.check("cov_nonpositive", all_nonpositive);
    if matches!(model, PerturbationModel::Degenerate) {
        res.check("degenerate_cov_zero", res.rows.iter().filter(|r| r.stat == "cov").all(|r| r.value == 0.0));
    }
    Ok(res)
}
