//! Leading-order asymptotics of `P(Z ≥ n)` and slope diagnostics.

use alloc::vec::Vec;

use super::constants::TailConstants;
use super::exact::psi_and_derivatives;
use super::seq::ParamSeq;
use crate::math::{ln, ln_gamma, PI};
use crate::{Error, Result};

/// `ln[(2πη*)^{-1/2} r*^{-n} n^{-αn-1/2} exp(ψ(ln(r* n^α)))]`, valid for any
/// sequence with `p_j ~ c j^-α` (the descriptor supplies `c` and `α`).
pub fn asymp_tail_general(seq: &ParamSeq, n: usize) -> Result<f64> {
    let d = seq.descriptor().ok_or(Error::InvalidParameter("sequence has no power-law descriptor"))?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1"));
    }
    let k = TailConstants::new(d.c, d.alpha, d.w)?;
    form_i(&k, seq, n)
}

pub(crate) fn form_i(k: &TailConstants, seq: &ParamSeq, n: usize) -> Result<f64> {
    let nf = n as f64;
    let ln_n = ln(nf);
    let theta = ln(k.r_star) + k.alpha * ln_n;
    let psi = psi_and_derivatives(seq, theta, 1e-8)?.psi;
    Ok(-0.5 * ln(2.0 * PI * k.eta_star) - nf * ln(k.r_star) - (k.alpha * nf + 0.5) * ln_n + psi)
}

/// Closed form for `p_j = c (w + j)^-α`:
/// `(2π)^{-(α+1)/2} Γ(w)^α η*^{-1/2} (c r*)^{1/2−w} n^{−αn+(α−1)/2−wα} e^{γn}`, in logs.
pub fn asymp_tail_power(c: f64, w: f64, alpha: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1"));
    }
    let k = TailConstants::new(c, alpha, w)?;
    Ok(form_ii(&k, n))
}

pub(crate) fn form_ii(k: &TailConstants, n: usize) -> f64 {
    let nf = n as f64;
    let a = k.alpha;
    -(a + 1.0) * 0.5 * ln(2.0 * PI) + a * ln_gamma(k.w) - 0.5 * ln(k.eta_star)
        + (0.5 - k.w) * ln(k.c * k.r_star)
        + (-a * nf + 0.5 * (a - 1.0) - k.w * a) * ln(nf)
        + k.gamma * nf
}

/// Normalized slopes `ln P / (z ln z)`; rejects `z < 3`.
pub fn log_tail_slope(values: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    values
        .iter()
        .map(|&(z, lp)| {
            if !(z >= 3.0) {
                return Err(Error::SlopeDomain(z));
            }
            Ok((z, lp / (z * ln(z))))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_algebra() {
        let z: f64 = 12.0;
        let s = log_tail_slope(&[(z, -2.0 * z * z.ln())]).unwrap();
        assert!((s[0].1 + 2.0).abs() < 1e-15);
        assert!(log_tail_slope(&[]).unwrap().is_empty());
        assert_eq!(log_tail_slope(&[(2.0, -1.0)]), Err(Error::SlopeDomain(2.0)));
    }

    #[test]
    fn forms_are_negative_for_moderate_n() {
        let seq = ParamSeq::power(1.0, 1.0, 2.0).unwrap();
        for n in [5, 10, 20] {
            let g = asymp_tail_general(&seq, n).unwrap();
            assert!(g.is_finite() && g < 0.0);
        }
    }
}
