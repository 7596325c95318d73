//! JSON experiment configs: one document per experiment, tagged by
//! `"experiment"`. Every omitted field takes the documented default, and the
//! echo written into result headers has all of them spelled out.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::de::{self, DeserializeSeed, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use schedlab_core::perturbation::PerturbationModel;
use schedlab_core::queue::ServiceSpec;

/// Master seed used when neither the config nor `--seed` supplies one.
pub const DEFAULT_SEED: u64 = 0x5EED_1DEA;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config {path}: {message}")]
    Invalid { path: String, message: String },
}

/// Perturbation law as written in configs and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Pareto { c1: f64, alpha1: f64, c2: f64, alpha2: f64 },
    SymmetricPareto { c: f64, alpha: f64 },
    TwoSidedExp { d1: f64, beta1: f64, d2: f64, beta2: f64 },
    Laplace { beta: f64 },
    Zero,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self::SymmetricPareto { c: 0.25, alpha: 2.0 }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<PerturbationModel, schedlab_core::Error> {
        match *self {
            Self::Pareto { c1, alpha1, c2, alpha2 } => PerturbationModel::pareto(c1, alpha1, c2, alpha2),
            Self::SymmetricPareto { c, alpha } => PerturbationModel::symmetric_pareto(c, alpha),
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => PerturbationModel::two_sided_exp(d1, beta1, d2, beta2),
            Self::Laplace { beta } => PerturbationModel::laplace(beta),
            Self::Zero => Ok(PerturbationModel::Degenerate),
        }
    }

    /// `zero`, `laplace:β`, `pareto:c,α`, `pareto:c1,α1,c2,α2`, `exp:d1,β1,d2,β2`.
    pub fn parse_cli(s: &str) -> Result<Self, String> {
        let (family, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|e| format!("bad number {a:?} in model {s:?}: {e}")))
                .collect::<Result<_, _>>()?
        };
        let spec = match (family, nums.as_slice()) {
            ("zero", []) => Self::Zero,
            ("laplace", &[beta]) => Self::Laplace { beta },
            ("pareto", &[c, alpha]) => Self::SymmetricPareto { c, alpha },
            ("pareto", &[c1, alpha1, c2, alpha2]) => Self::Pareto { c1, alpha1, c2, alpha2 },
            ("exp", &[d1, beta1, d2, beta2]) => Self::TwoSidedExp { d1, beta1, d2, beta2 },
            _ => {
                return Err(format!(
                    "unknown model {s:?}; expected zero | laplace:B | pareto:C,A | pareto:C1,A1,C2,A2 | exp:D1,B1,D2,B2"
                ))
            }
        };
        spec.build().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceName {
    Deterministic,
    Exponential,
    Uniform,
}

impl ServiceName {
    pub fn spec(self) -> ServiceSpec {
        match self {
            Self::Deterministic => ServiceSpec::Deterministic,
            Self::Exponential => ServiceSpec::Exponential,
            Self::Uniform => ServiceSpec::Uniform,
        }
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_eps() -> f64 {
    schedlab_core::traffic::DEFAULT_EPS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CovarianceConfig {
    pub model: ModelSpec,
    pub u: f64,
    pub eps: f64,
    pub n_grid: Vec<u64>,
    /// Lags with a Monte Carlo cross-check.
    pub mc_n: Vec<u64>,
    pub replications: u64,
    pub seed: u64,
}

impl Default for CovarianceConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            u: 0.5,
            eps: default_eps(),
            n_grid: vec![2, 5, 10, 20, 50, 100, 200],
            mc_n: vec![3, 10],
            replications: 20_000,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BernoulliTailsConfig {
    /// `p_j = c (w + j)^-α`.
    pub c: f64,
    pub w: f64,
    pub alpha: f64,
    pub n_grid: Vec<u64>,
    pub slope_z: Vec<u64>,
    pub eps: f64,
    /// Difference-of-sums cells: `(E′(s) − L′(s)) − (E(0) − L(0))` given `U = u`.
    pub difference_model: ModelSpec,
    pub difference_s: f64,
    pub difference_u: f64,
    pub difference_x: Vec<u64>,
    /// Bernoulli terms kept per side before the remainder is bounded.
    pub difference_terms: u64,
    /// `P(E(0) ≥ n)` against its closed-form approximation.
    pub display_n: Vec<u64>,
    pub display_draws: u64,
    pub seed: u64,
}

impl Default for BernoulliTailsConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            w: 1.0,
            alpha: 2.0,
            n_grid: vec![5, 10, 20, 30, 40],
            slope_z: vec![10, 20, 30],
            eps: 1e-12,
            difference_model: ModelSpec::Pareto { c1: 0.25, alpha1: 2.0, c2: 0.25, alpha2: 3.0 },
            difference_s: 0.25,
            difference_u: 0.5,
            difference_x: vec![5, 10, 15, 20, 25, 30],
            difference_terms: 1_000_000,
            display_n: vec![5, 10, 20],
            display_draws: 10_000,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalLoadingConfig {
    pub model: ModelSpec,
    pub t_grid: Vec<f64>,
    pub replications: u64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for CriticalLoadingConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            t_grid: vec![1e3, 1e4, 1e5, 1e6],
            replications: 200,
            eps: default_eps(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeavyTrafficConfig {
    pub model: ModelSpec,
    pub rho_grid: Vec<f64>,
    /// Burn-in is `horizon_mult / (1 − ρ)`.
    pub horizon_mult: f64,
    pub replications: u64,
    /// Also run with twice the burn-in and compare medians.
    pub burnin_check: bool,
    pub eps: f64,
    pub seed: u64,
}

impl Default for HeavyTrafficConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            rho_grid: vec![0.9, 0.99, 0.999],
            horizon_mult: 20.0,
            replications: 400,
            burnin_check: true,
            eps: default_eps(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sg1FcltConfig {
    pub model: ModelSpec,
    pub service: ServiceName,
    pub t_grid: Vec<f64>,
    pub replications: u64,
    pub variance_n: u64,
    pub variance_replications: u64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for Sg1FcltConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            service: ServiceName::Exponential,
            t_grid: vec![1e4, 1e5, 1e6],
            replications: 200,
            variance_n: 100_000,
            variance_replications: 1000,
            eps: default_eps(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitDistributionConfig {
    pub model: ModelSpec,
    pub s_grid: Vec<f64>,
    pub n: u64,
    pub replications: u64,
    pub level: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for LimitDistributionConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            s_grid: vec![0.0, 0.25, 0.5],
            n: 1000,
            replications: 10_000,
            level: 0.01,
            eps: default_eps(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Covariance(CovarianceConfig),
    BernoulliTails(BernoulliTailsConfig),
    CriticalLoading(CriticalLoadingConfig),
    HeavyTraffic(HeavyTrafficConfig),
    Sg1Fclt(Sg1FcltConfig),
    LimitDistribution(LimitDistributionConfig),
}

impl ExperimentConfig {
    pub const NAMES: [&'static str; 6] =
        ["covariance", "bernoulli_tails", "critical_loading", "heavy_traffic", "sg1_fclt", "limit_distribution"];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Covariance(_) => "covariance",
            Self::BernoulliTails(_) => "bernoulli_tails",
            Self::CriticalLoading(_) => "critical_loading",
            Self::HeavyTraffic(_) => "heavy_traffic",
            Self::Sg1Fclt(_) => "sg1_fclt",
            Self::LimitDistribution(_) => "limit_distribution",
        }
    }

    /// All-defaults config for a registered name.
    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "covariance" => Self::Covariance(Default::default()),
            "bernoulli_tails" => Self::BernoulliTails(Default::default()),
            "critical_loading" => Self::CriticalLoading(Default::default()),
            "heavy_traffic" => Self::HeavyTraffic(Default::default()),
            "sg1_fclt" => Self::Sg1Fclt(Default::default()),
            "limit_distribution" => Self::LimitDistribution(Default::default()),
            _ => return None,
        })
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Covariance(c) => c.seed,
            Self::BernoulliTails(c) => c.seed,
            Self::CriticalLoading(c) => c.seed,
            Self::HeavyTraffic(c) => c.seed,
            Self::Sg1Fclt(c) => c.seed,
            Self::LimitDistribution(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::Covariance(c) => c.seed = seed,
            Self::BernoulliTails(c) => c.seed = seed,
            Self::CriticalLoading(c) => c.seed = seed,
            Self::HeavyTraffic(c) => c.seed = seed,
            Self::Sg1Fclt(c) => c.seed = seed,
            Self::LimitDistribution(c) => c.seed = seed,
        }
    }

    /// Single-line JSON with every default materialized.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("configs always serialize")
    }

    pub fn validate(&self) -> Result<(), String> {
        fn check(ok: bool, msg: &str) -> Result<(), String> {
            if ok {
                Ok(())
            } else {
                Err(msg.to_string())
            }
        }
        fn model(m: &ModelSpec) -> Result<(), String> {
            m.build().map(|_| ()).map_err(|e| e.to_string())
        }
        fn eps(e: f64) -> Result<(), String> {
            check(e > 0.0 && e < 1.0, "eps must lie in (0, 1)")
        }
        fn reps(r: u64, min: u64) -> Result<(), String> {
            check(r >= min, &format!("replications must be at least {min}"))
        }
        match self {
            Self::Covariance(c) => {
                model(&c.model)?;
                check(c.u > 0.0 && c.u < 1.0, "u must lie in (0, 1)")?;
                eps(c.eps)?;
                check(!c.n_grid.is_empty(), "n_grid must be non-empty")?;
                check(c.n_grid.iter().chain(&c.mc_n).all(|&n| n >= 2), "lags must be at least 2")?;
                reps(c.replications, 2)
            }
            Self::BernoulliTails(c) => {
                schedlab_core::bernoulli_tail::ParamSeq::power(c.c, c.w, c.alpha).map_err(|e| e.to_string())?;
                check(!c.n_grid.is_empty(), "n_grid must be non-empty")?;
                check(c.slope_z.iter().all(|&z| z >= 3), "slope_z entries must be at least 3")?;
                check(c.eps > 0.0, "eps must be positive")?;
                model(&c.difference_model)?;
                check(
                    matches!(c.difference_model.build(), Ok(PerturbationModel::TwoSidedPareto { .. })),
                    "difference_model must have power tails",
                )?;
                check((0.0..1.0).contains(&c.difference_s), "difference_s must lie in [0, 1)")?;
                check(c.difference_u > 0.0 && c.difference_u < 1.0, "difference_u must lie in (0, 1)")?;
                check(c.difference_x.iter().all(|&x| x >= 3), "difference_x entries must be at least 3")?;
                check(c.difference_terms >= 1000, "difference_terms must be at least 1000")?;
                check(c.display_n.iter().all(|&n| n >= 1), "display_n entries must be positive")?;
                check(c.display_draws >= 2, "display_draws must be at least 2")
            }
            Self::CriticalLoading(c) => {
                model(&c.model)?;
                eps(c.eps)?;
                check(!c.t_grid.is_empty(), "t_grid must be non-empty")?;
                check(c.t_grid.iter().all(|&t| (1e3..=1e6).contains(&t)), "t_grid must lie in [1e3, 1e6]")?;
                reps(c.replications, 200)
            }
            Self::HeavyTraffic(c) => {
                model(&c.model)?;
                eps(c.eps)?;
                check(!c.rho_grid.is_empty(), "rho_grid must be non-empty")?;
                check(c.rho_grid.iter().all(|&r| r > 0.0 && r < 1.0), "rho_grid must lie in (0, 1)")?;
                check(c.horizon_mult >= 20.0, "horizon_mult must be at least 20")?;
                reps(c.replications, 2)
            }
            Self::Sg1Fclt(c) => {
                model(&c.model)?;
                eps(c.eps)?;
                check(!c.t_grid.is_empty(), "t_grid must be non-empty")?;
                check(c.t_grid.iter().all(|&t| (1.0..=1e8).contains(&t)), "t_grid must lie in [1, 1e8]")?;
                check(
                    c.service != ServiceName::Deterministic || c.variance_replications == 0,
                    "the variance cell needs non-degenerate services (set variance_replications to 0)",
                )?;
                check(c.variance_n >= 1, "variance_n must be positive")?;
                check(c.variance_replications != 1, "variance_replications must be 0 or at least 2")?;
                reps(c.replications, 2)
            }
            Self::LimitDistribution(c) => {
                model(&c.model)?;
                eps(c.eps)?;
                check(!c.s_grid.is_empty(), "s_grid must be non-empty")?;
                check(c.s_grid.iter().all(|s| (0.0..1.0).contains(s)), "s_grid must lie in [0, 1)")?;
                check(c.n >= 1, "n must be positive")?;
                check(c.level > 0.0 && c.level < 1.0, "level must lie in (0, 1)")?;
                reps(c.replications, 2)
            }
        }
    }
}

/// Parse and validate a config document; `origin` names it in errors.
pub fn parse_config(text: &str, origin: &str) -> Result<ExperimentConfig, ConfigError> {
    let parse_err = |message: String| ConfigError::Parse { path: origin.to_string(), message };
    let mut de = serde_json::Deserializer::from_str(text);
    NoDuplicates.deserialize(&mut de).map_err(|e| parse_err(e.to_string()))?;
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    cfg.validate().map_err(|message| ConfigError::Invalid { path: origin.to_string(), message })?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
    parse_config(&text, &shown)
}

// Walks a JSON document and fails on any object with a repeated key;
// serde_json itself keeps the last occurrence silently in some positions.
struct NoDuplicates;

impl<'de> DeserializeSeed<'de> for NoDuplicates {
    type Value = ();

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> Result<(), D::Error> {
        d.deserialize_any(self)
    }
}

impl<'de> Visitor<'de> for NoDuplicates {
    type Value = ();

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("any JSON value")
    }

    fn visit_bool<E>(self, _: bool) -> Result<(), E> {
        Ok(())
    }
    fn visit_i64<E>(self, _: i64) -> Result<(), E> {
        Ok(())
    }
    fn visit_u64<E>(self, _: u64) -> Result<(), E> {
        Ok(())
    }
    fn visit_f64<E>(self, _: f64) -> Result<(), E> {
        Ok(())
    }
    fn visit_str<E>(self, _: &str) -> Result<(), E> {
        Ok(())
    }
    fn visit_unit<E>(self) -> Result<(), E> {
        Ok(())
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<(), A::Error> {
        while seq.next_element_seed(NoDuplicates)?.is_some() {}
        Ok(())
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<(), A::Error> {
        let mut seen = HashSet::new();
        while let Some(key) = map.next_key::<String>()? {
            if !seen.insert(key.clone()) {
                return Err(de::Error::custom(format!("duplicate key {key:?}")));
            }
            map.next_value_seed(NoDuplicates)?;
        }
        Ok(())
    }
}
