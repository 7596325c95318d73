//! The constants `r*`, `η*` and `γ` of the exact tail asymptotics.
//!
//! Every integral here depends on `c` and `r*` only through `a = c·r*`.
//! Finite pieces are integrated adaptively; the infinite tails are expanded
//! in powers of `a x^-α` and summed exactly (alternating series, so the first
//! omitted term bounds the error).

use crate::math::{abs, exp, ln, ln_1p, powf, sin, PI};
use crate::quad::{bisect_increasing, gauss_kronrod, tanh_sinh, Estimate};
use crate::{Error, Result};

const QUAD_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 4000;

fn check(c: f64, alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain { alpha });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter("c must be positive"));
    }
    Ok(())
}

// Cut-off with a·X^-α ≤ 1/16, so tail series converge fast.
fn cutoff(a: f64, alpha: f64) -> f64 {
    powf(16.0 * a, 1.0 / alpha).max(1.0)
}

// Σ_k (−1)^k coef(k) a^{k+1} X^{1−α(k+1)} / (α(k+1) − 1), with the first
// omitted term as the error.
fn alternating_tail(a: f64, alpha: f64, x: f64, coef: impl Fn(u32) -> f64) -> Estimate {
    let mut sum = 0.0;
    let mut k = 0u32;
    loop {
        let e = f64::from(k + 1);
        let term = coef(k) * powf(a, e) * powf(x, 1.0 - alpha * e) / (alpha * e - 1.0);
        if term < 1e-19 * abs(sum) || k > 200 {
            return Estimate { value: sum, error: term };
        }
        sum += if k.is_multiple_of(2) { term } else { -term };
        k += 1;
    }
}

/// `∫_0^∞ a/(a + x^α) dx` by quadrature.
pub fn defining_integral(a: f64, alpha: f64) -> Result<Estimate> {
    let x = cutoff(a, alpha);
    let body = gauss_kronrod(|t| a / (a + powf(t, alpha)), 0.0, x, QUAD_TOL, MAX_PANELS)?;
    Ok(body + alternating_tail(a, alpha, x, |_| 1.0))
}

/// `c·r* = (α sin(π/α)/π)^α`, from substituting `x = (c r)^{1/α} u`.
pub fn r_star_closed_form(c: f64, alpha: f64) -> Result<f64> {
    check(c, alpha)?;
    Ok(powf(alpha * sin(PI / alpha) / PI, alpha) / c)
}

/// `r*` by bisection on the quadrature of the defining integral.
pub fn r_star_by_quadrature(c: f64, alpha: f64) -> Result<f64> {
    check(c, alpha)?;
    // The integral is increasing in a; widen the bracket until it straddles 1.
    let (mut lo, mut hi) = (-2.0f64, 0.0f64);
    while defining_integral(exp(lo), alpha)?.value > 1.0 {
        lo -= 2.0;
        if lo < -700.0 {
            return Err(Error::InvalidParameter("r* bracket search failed"));
        }
    }
    while defining_integral(exp(hi), alpha)?.value < 1.0 {
        hi += 2.0;
        if hi > 700.0 {
            return Err(Error::InvalidParameter("r* bracket search failed"));
        }
    }
    let ln_a = bisect_increasing(|t| Ok(defining_integral(exp(t), alpha)?.value - 1.0), lo, hi, 1e-15)?;
    Ok(exp(ln_a) / c)
}

/// `|∫_0^∞ c r/(c r + x^α) dx − 1|`.
pub fn r_star_residual(c: f64, alpha: f64, r: f64) -> Result<f64> {
    check(c, alpha)?;
    Ok(abs(defining_integral(c * r, alpha)?.value - 1.0))
}

/// `r*` from the closed form, cross-checked against quadrature bisection
/// (relative agreement `1e-8`, else an error).
pub fn solve_r_star(c: f64, alpha: f64) -> Result<f64> {
    let closed = r_star_closed_form(c, alpha)?;
    let quad = r_star_by_quadrature(c, alpha)?;
    if abs(closed - quad) > 1e-8 * closed {
        return Err(Error::Quadrature { tol: 1e-8, estimate: quad, error: abs(closed - quad) });
    }
    Ok(closed)
}

/// `η* = ∫_0^∞ a x^α/(a + x^α)² dx` with `a = c r*`.
pub fn eta_star_estimate(c: f64, alpha: f64, r_star: f64) -> Result<Estimate> {
    check(c, alpha)?;
    let a = c * r_star;
    let x = cutoff(a, alpha);
    let body = gauss_kronrod(
        |t| {
            let tp = powf(t, alpha);
            a * tp / ((a + tp) * (a + tp))
        },
        0.0,
        x,
        QUAD_TOL,
        MAX_PANELS,
    )?;
    Ok(body + alternating_tail(a, alpha, x, |k| f64::from(k + 1)))
}

pub fn eta_star(c: f64, alpha: f64, r_star: f64) -> Result<f64> {
    Ok(eta_star_estimate(c, alpha, r_star)?.value)
}

/// `γ = ∫_0^1 ln(1 + x^α/a) dx + ∫_1^∞ ln(1 + a x^-α) dx + α + ln c`.
pub fn gamma_estimate(c: f64, alpha: f64, r_star: f64) -> Result<Estimate> {
    check(c, alpha)?;
    let a = c * r_star;
    let x = cutoff(a, alpha).max(4.0);
    let inner = gauss_kronrod(|t| ln_1p(powf(t, alpha) / a), 0.0, 1.0, QUAD_TOL, MAX_PANELS)?;
    let outer = gauss_kronrod(|t| ln_1p(a * powf(t, -alpha)), 1.0, x, QUAD_TOL, MAX_PANELS)?;
    // ln(1 + y) = Σ (−1)^k y^{k+1}/(k+1).
    let tail = alternating_tail(a, alpha, x, |k| 1.0 / f64::from(k + 1));
    let total = inner + outer + tail;
    Ok(Estimate { value: total.value + alpha + ln(c), error: total.error })
}

pub fn gamma_const(c: f64, alpha: f64, r_star: f64) -> Result<f64> {
    let e = gamma_estimate(c, alpha, r_star)?;
    if e.error > 1e-9 {
        return Err(Error::Quadrature { tol: 1e-9, estimate: e.value, error: e.error });
    }
    Ok(e.value)
}

/// Independent evaluation of `γ` by tanh–sinh, with `x ↦ 1/x` mapping the
/// infinite piece onto `(0, 1]`. Used to cross-check [`gamma_const`].
pub fn gamma_tanh_sinh(c: f64, alpha: f64, r_star: f64) -> Result<f64> {
    check(c, alpha)?;
    let a = c * r_star;
    let inner = tanh_sinh(|t| ln_1p(powf(t, alpha) / a), 0.0, 1.0, 1e-13)?;
    let outer = tanh_sinh(|t| ln_1p(a * powf(t, alpha)) / (t * t), 0.0, 1.0, 1e-13)?;
    Ok(inner.value + outer.value + alpha + ln(c))
}

/// All constants of the exact asymptotics for `p_j = c (w + j)^-α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConstants {
    pub c: f64,
    pub alpha: f64,
    pub w: f64,
    pub r_star: f64,
    pub eta_star: f64,
    pub gamma: f64,
}

impl TailConstants {
    pub fn new(c: f64, alpha: f64, w: f64) -> Result<Self> {
        check(c, alpha)?;
        if !(w > 0.0) {
            return Err(Error::InvalidParameter("w must be positive"));
        }
        let r_star = solve_r_star(c, alpha)?;
        Ok(Self { c, alpha, w, r_star, eta_star: eta_star(c, alpha, r_star)?, gamma: gamma_const(c, alpha, r_star)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_star_known_values() {
        let r = solve_r_star(1.0, 2.0).unwrap();
        assert!((r - 4.0 / (PI * PI)).abs() < 1e-12);
        let r4 = solve_r_star(1.0, 4.0).unwrap();
        // (4 sin(π/4)/π)^4 = 0.657023…
        assert!((r4 - 0.65705).abs() < 1e-4, "{r4}");
        assert!((r4 - (4.0 * (PI / 4.0).sin() / PI).powi(4)).abs() < 1e-12, "{r4}");
        let r2 = solve_r_star(2.0, 2.0).unwrap();
        assert!((r2 - 2.0 / (PI * PI)).abs() < 1e-12);
        assert!(r_star_residual(1.0, 2.0, r).unwrap() < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(solve_r_star(1.0, 1.0), Err(Error::Domain { alpha: 1.0 }));
        assert!(eta_star(1.0, 0.5, 1.0).is_err());
        assert!(gamma_const(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_shifts_with_log_c() {
        let a = 2.5;
        let g1 = gamma_const(1.0, a, solve_r_star(1.0, a).unwrap()).unwrap();
        let e = core::f64::consts::E;
        let ge = gamma_const(e, a, solve_r_star(e, a).unwrap()).unwrap();
        assert!((ge - g1 - 1.0).abs() < 1e-10);
    }
}
