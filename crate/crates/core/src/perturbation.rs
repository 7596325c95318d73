//! Laws for the perturbation `ξ` of an arrival from its scheduled slot.
//!
//! All probabilities are closed-form. Both tails are exposed separately
//! (`survival` for `P(ξ > x)`, `cdf` for `P(ξ ≤ x)`) so that far-tail values
//! never suffer from `1 − (1 − ε)` cancellation.

use crate::math::{exp, exp_m1, ln, ln_1p, powf};
use crate::rng::uniform;
use crate::{Error, Result};
use rand_chacha::rand_core::RngCore;

const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationModel {
    /// `P(ξ > x) = c1 x^-α1` and `P(ξ < -x) = c2 x^-α2` for `x ≥ 1`; the
    /// remaining mass `1 − c1 − c2` is uniform on `[-1, 1]`.
    TwoSidedPareto { c1: f64, alpha1: f64, c2: f64, alpha2: f64 },
    /// Density `d1 e^{-β1 x}` on `x > 0` and `d2 e^{β2 x}` on `x < 0`.
    TwoSidedExp { d1: f64, beta1: f64, d2: f64, beta2: f64 },
    /// `ξ ≡ 0`.
    Degenerate,
}

/// Tail description in both the survival and the density convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailParams {
    Power(PowerTails),
    Exponential {
        d1: f64,
        beta1: f64,
        d2: f64,
        beta2: f64,
    },
    /// Bounded support: neither polynomial nor exponential tails.
    NoTail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTails {
    pub c1: f64,
    pub alpha1: f64,
    pub c2: f64,
    pub alpha2: f64,
}

impl PowerTails {
    /// `(c1, c2)` with `P(ξ > x) ~ c1 x^-α1`, `P(ξ < -x) ~ c2 x^-α2`.
    pub fn survival_coefficients(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    /// `(α1 c1, α2 c2)` with `f(x) ~ α1 c1 x^{-α1-1}` (and mirrored).
    pub fn density_coefficients(&self) -> (f64, f64) {
        (self.alpha1 * self.c1, self.alpha2 * self.c2)
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.alpha1, self.alpha2)
    }
}

impl PerturbationModel {
    pub fn pareto(c1: f64, alpha1: f64, c2: f64, alpha2: f64) -> Result<Self> {
        let m = Self::TwoSidedPareto { c1, alpha1, c2, alpha2 };
        m.validate()?;
        Ok(m)
    }

    pub fn symmetric_pareto(c: f64, alpha: f64) -> Result<Self> {
        Self::pareto(c, alpha, c, alpha)
    }

    pub fn two_sided_exp(d1: f64, beta1: f64, d2: f64, beta2: f64) -> Result<Self> {
        let m = Self::TwoSidedExp { d1, beta1, d2, beta2 };
        m.validate()?;
        Ok(m)
    }

    /// Laplace law with rate `beta`: `d1 = d2 = β/2`.
    pub fn laplace(beta: f64) -> Result<Self> {
        Self::two_sided_exp(beta / 2.0, beta, beta / 2.0, beta)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                if !(c1 >= 0.0 && c2 >= 0.0 && c1.is_finite() && c2.is_finite()) {
                    return Err(Error::InvalidParameter("pareto coefficients must be non-negative"));
                }
                if c1 + c2 > 1.0 {
                    return Err(Error::InvalidParameter("pareto coefficients must satisfy c1 + c2 <= 1"));
                }
                if !(alpha1 > 1.0 && alpha2 > 1.0) || !alpha1.is_finite() || !alpha2.is_finite() {
                    return Err(Error::InvalidParameter("alpha must exceed 1"));
                }
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => {
                if !(beta1 > 0.0 && beta2 > 0.0) || !beta1.is_finite() || !beta2.is_finite() {
                    return Err(Error::InvalidParameter("beta must be positive"));
                }
                if !(d1 >= 0.0 && d2 >= 0.0) {
                    return Err(Error::InvalidParameter("exponential coefficients must be non-negative"));
                }
                if (d1 / beta1 + d2 / beta2 - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidParameter("two-sided exponential must satisfy d1/beta1 + d2/beta2 = 1"));
                }
            }
            Self::Degenerate => {}
        }
        Ok(())
    }

    fn pareto_core(c1: f64, c2: f64) -> f64 {
        1.0 - c1 - c2
    }

    /// `P(ξ > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                if x >= 1.0 {
                    c1 * powf(x, -alpha1)
                } else if x >= -1.0 {
                    c1 + Self::pareto_core(c1, c2) * (1.0 - x) / 2.0
                } else {
                    1.0 - c2 * powf(-x, -alpha2)
                }
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => {
                if x >= 0.0 {
                    d1 / beta1 * exp(-beta1 * x)
                } else {
                    1.0 - d2 / beta2 * exp(beta2 * x)
                }
            }
            Self::Degenerate => {
                if x < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `P(ξ ≤ x)`, accurate in the left tail.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                if x < -1.0 {
                    c2 * powf(-x, -alpha2)
                } else if x < 1.0 {
                    c2 + Self::pareto_core(c1, c2) * (x + 1.0) / 2.0
                } else {
                    1.0 - c1 * powf(x, -alpha1)
                }
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => {
                if x < 0.0 {
                    d2 / beta2 * exp(beta2 * x)
                } else {
                    1.0 - d1 / beta1 * exp(-beta1 * x)
                }
            }
            Self::Degenerate => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `P(a < ξ ≤ b)`.
    pub fn interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        if a > b || a.is_nan() || b.is_nan() {
            return Err(Error::InvalidInterval { lo: a, hi: b });
        }
        if a == b {
            return Ok(0.0);
        }
        // Same-piece tail intervals avoid subtracting two nearly equal powers.
        match *self {
            Self::TwoSidedPareto { c1, alpha1, .. } if a >= 1.0 => {
                return Ok(c1 * powf(a, -alpha1) * power_gap(alpha1, a, b));
            }
            Self::TwoSidedPareto { c2, alpha2, .. } if b <= -1.0 => {
                return Ok(c2 * powf(-b, -alpha2) * power_gap(alpha2, -b, -a));
            }
            Self::TwoSidedExp { d1, beta1, .. } if a >= 0.0 => {
                return Ok(d1 / beta1 * exp(-beta1 * a) * -exp_m1(-beta1 * (b - a)));
            }
            Self::TwoSidedExp { d2, beta2, .. } if b <= 0.0 => {
                return Ok(d2 / beta2 * exp(beta2 * b) * -exp_m1(-beta2 * (b - a)));
            }
            _ => {}
        }
        let p = if b <= 0.0 {
            self.cdf(b) - self.cdf(a)
        } else if a >= 0.0 {
            self.survival(a) - self.survival(b)
        } else {
            (self.cdf(0.0) - self.cdf(a)) + (self.survival(0.0) - self.survival(b))
        };
        Ok(p.max(0.0))
    }

    /// `P(|ξ| > x)` for `x ≥ 0`.
    pub fn abs_tail(&self, x: f64) -> f64 {
        match self {
            Self::Degenerate => 0.0,
            // Continuous laws: P(ξ < -x) = P(ξ ≤ -x).
            _ => self.survival(x) + self.cdf(-x),
        }
    }

    /// `E|ξ|`; finite for every admissible model.
    pub fn mean_abs(&self) -> f64 {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                Self::pareto_core(c1, c2) / 2.0 + c1 * alpha1 / (alpha1 - 1.0) + c2 * alpha2 / (alpha2 - 1.0)
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => d1 / (beta1 * beta1) + d2 / (beta2 * beta2),
            Self::Degenerate => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                c1 * alpha1 / (alpha1 - 1.0) - c2 * alpha2 / (alpha2 - 1.0)
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => d1 / (beta1 * beta1) - d2 / (beta2 * beta2),
            Self::Degenerate => 0.0,
        }
    }

    pub fn tail_params(&self) -> TailParams {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => TailParams::Power(PowerTails { c1, alpha1, c2, alpha2 }),
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => TailParams::Exponential { d1, beta1, d2, beta2 },
            Self::Degenerate => TailParams::NoTail,
        }
    }

    /// Smallest `x` with `P(ξ > x) ≤ q`, for `q ∈ (0, 1]`.
    pub fn inverse_survival(&self, q: f64) -> f64 {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                if q <= c1 {
                    powf(c1 / q, 1.0 / alpha1)
                } else if q <= 1.0 - c2 {
                    1.0 - 2.0 * (q - c1) / Self::pareto_core(c1, c2)
                } else {
                    -powf(c2 / (1.0 - q), 1.0 / alpha2)
                }
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => {
                if q <= d1 / beta1 {
                    ln(d1 / (beta1 * q)) / beta1
                } else {
                    ln((1.0 - q) * beta2 / d2) / beta2
                }
            }
            Self::Degenerate => 0.0,
        }
    }

    /// Smallest `x` with `P(ξ ≤ x) ≥ p`, for `p ∈ (0, 1)`.
    pub fn inverse_cdf(&self, p: f64) -> f64 {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                if p <= c2 {
                    -powf(c2 / p, 1.0 / alpha2)
                } else if p <= 1.0 - c1 {
                    -1.0 + 2.0 * (p - c2) / Self::pareto_core(c1, c2)
                } else {
                    powf(c1 / (1.0 - p), 1.0 / alpha1)
                }
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => {
                if p <= d2 / beta2 {
                    ln(p * beta2 / d2) / beta2
                } else {
                    ln(d1 / (beta1 * (1.0 - p))) / beta1
                }
            }
            Self::Degenerate => 0.0,
        }
    }

    /// One draw by inversion. Each half of the unit interval is mapped
    /// through the tail it resolves best, so extreme draws keep full precision.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        if let Self::Degenerate = self {
            return 0.0;
        }
        let v = uniform(rng);
        if v < 0.5 {
            self.inverse_cdf(v)
        } else {
            self.inverse_survival(1.0 - v)
        }
    }

    /// `ξ − y` given `ξ > y`, from one uniform `v ∈ (0, 1)`.
    pub(crate) fn right_excess(&self, y: f64, v: f64) -> f64 {
        match *self {
            Self::TwoSidedPareto { alpha1, .. } if y >= 1.0 => y * exp_m1(-ln(v) / alpha1),
            Self::TwoSidedExp { beta1, .. } if y >= 0.0 => -ln(v) / beta1,
            _ => self.inverse_survival(self.survival(y) * v) - y,
        }
    }

    /// `−ξ − y` given `ξ ≤ −y`, from one uniform `v ∈ (0, 1)`.
    pub(crate) fn left_excess(&self, y: f64, v: f64) -> f64 {
        match *self {
            Self::TwoSidedPareto { alpha2, .. } if y >= 1.0 => y * exp_m1(-ln(v) / alpha2),
            Self::TwoSidedExp { beta2, .. } if y >= 0.0 => -ln(v) / beta2,
            _ => -self.inverse_cdf(self.cdf(-y) * v) - y,
        }
    }

    /// Upper bound on `∫_y^∞ P(ξ > x) dx`.
    pub(crate) fn right_tail_integral(&self, y: f64) -> f64 {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, .. } => {
                let core = if y < 1.0 { 1.0 - y } else { 0.0 };
                core + c1 * powf(y.max(1.0), 1.0 - alpha1) / (alpha1 - 1.0)
            }
            Self::TwoSidedExp { d1, beta1, .. } => {
                let core = if y < 0.0 { -y } else { 0.0 };
                core + d1 / (beta1 * beta1) * exp(-beta1 * y.max(0.0))
            }
            Self::Degenerate => {
                if y < 0.0 {
                    -y
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper bound on `∫_y^∞ P(ξ ≤ −x) dx`.
    pub(crate) fn left_tail_integral(&self, y: f64) -> f64 {
        self.mirrored().right_tail_integral(y)
    }

    /// The law of `−ξ` (up to the measure-zero boundary convention).
    pub fn mirrored(&self) -> Self {
        match *self {
            Self::TwoSidedPareto { c1, alpha1, c2, alpha2 } => {
                Self::TwoSidedPareto { c1: c2, alpha1: alpha2, c2: c1, alpha2: alpha1 }
            }
            Self::TwoSidedExp { d1, beta1, d2, beta2 } => {
                Self::TwoSidedExp { d1: d2, beta1: beta2, d2: d1, beta2: beta1 }
            }
            Self::Degenerate => Self::Degenerate,
        }
    }
}

// (1 - (a/b)^α) computed without cancellation when b is close to a.
fn power_gap(alpha: f64, a: f64, b: f64) -> f64 {
    if b.is_infinite() {
        return 1.0;
    }
    -exp_m1(-alpha * ln_1p((b - a) / a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;

    fn sym() -> PerturbationModel {
        PerturbationModel::symmetric_pareto(0.25, 2.0).unwrap()
    }

    #[test]
    fn pareto_values() {
        let m = sym();
        assert_eq!(m.survival(2.0), 0.0625);
        // 0.25 right tail + half of the 0.5 core.
        assert_eq!(m.survival(0.0), 0.5);
        assert_eq!(m.interval_prob(0.0, 1.0).unwrap(), 0.25);
        assert_eq!(m.interval_prob(0.7, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_values() {
        let m = PerturbationModel::Degenerate;
        assert_eq!(m.survival(0.0), 0.0);
        assert_eq!(m.survival(-1.0), 1.0);
        assert_eq!(m.interval_prob(-0.5, 0.5).unwrap(), 1.0);
        assert_eq!(m.tail_params(), TailParams::NoTail);
    }

    #[test]
    fn reversed_interval_is_rejected() {
        assert!(matches!(sym().interval_prob(1.0, 0.0), Err(Error::InvalidInterval { .. })));
    }

    #[test]
    fn validation() {
        assert!(PerturbationModel::pareto(0.6, 2.0, 0.6, 2.0).is_err());
        assert!(PerturbationModel::pareto(0.2, 0.9, 0.2, 2.0).is_err());
        assert!(PerturbationModel::two_sided_exp(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PerturbationModel::laplace(1.0).is_ok());
    }

    #[test]
    fn tail_params_both_conventions() {
        let TailParams::Power(t) = sym().tail_params() else { panic!() };
        assert_eq!(t.density_coefficients().0, 0.5);
        assert_eq!(t.survival_coefficients().0, 0.25);
        let e = PerturbationModel::laplace(1.0).unwrap().tail_params();
        assert!(matches!(e, TailParams::Exponential { d1, beta1, .. } if d1 == 0.5 && beta1 == 1.0));
    }

    #[test]
    fn inverses_round_trip() {
        let models = [
            sym(),
            PerturbationModel::pareto(0.1, 1.5, 0.3, 3.0).unwrap(),
            PerturbationModel::two_sided_exp(0.25, 0.5, 1.0, 2.0).unwrap(),
        ];
        for m in models {
            for &x in &[-50.0, -3.0, -1.0, -0.3, 0.0, 0.4, 1.0, 2.5, 80.0] {
                let q = m.survival(x);
                let p = m.cdf(x);
                assert!((q + p - 1.0).abs() < 1e-15);
                // Each inverse is only resolvable away from its own far end.
                if q > 0.0 && q < 0.999 {
                    let back = m.inverse_survival(q);
                    assert!((back - x).abs() < 1e-9 * (1.0 + x.abs()), "{m:?} {x} {back}");
                }
                if p > 0.0 && p < 0.999 {
                    let back = m.inverse_cdf(p);
                    assert!((back - x).abs() < 1e-9 * (1.0 + x.abs()), "{m:?} {x} {back}");
                }
            }
        }
    }

    #[test]
    fn excess_samplers_match_conditional_laws() {
        let m = PerturbationModel::pareto(0.2, 1.5, 0.3, 2.5).unwrap();
        // P(ξ - y > e | ξ > y) = S(y + e)/S(y).
        for &(y, e) in &[(1.0, 0.5), (4.0, 10.0), (0.2, 0.3)] {
            let target = m.survival(y + e) / m.survival(y);
            // right_excess is decreasing in v; solve for the quantile
            let v = target;
            assert!((m.right_excess(y, v) - e).abs() < 1e-9, "{y} {e}");
            let target = m.cdf(-y - e) / m.cdf(-y);
            assert!((m.left_excess(y, target) - e).abs() < 1e-9);
        }
    }

    #[test]
    fn sample_is_deterministic() {
        let f = StreamFactory::new(1, "pert");
        let a = sym().sample(&mut f.stream(0));
        let b = sym().sample(&mut f.stream(0));
        assert_eq!(a, b);
        assert_eq!(PerturbationModel::Degenerate.sample(&mut f.stream(0)), 0.0);
    }
}
