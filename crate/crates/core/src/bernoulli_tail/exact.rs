use alloc::vec;
use alloc::vec::Vec;

use super::seq::{Bracket, ParamSeq};
use crate::math::{abs, ceil, exp, exp_m1, ln, ln_1p, ln_gamma, log_add_exp, powf, LN_2};
use crate::{Error, Result};

/// A probability carried in log space with a certified bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailProb {
    pub ln_value: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
    /// Certified bound on `|P − value|`.
    pub abs_error: f64,
    /// Number of leading terms handled by the dynamic program; everything
    /// beyond is folded in analytically.
    pub truncation: usize,
}

impl TailProb {
    pub fn value(&self) -> f64 {
        exp(self.ln_value)
    }

    fn certain() -> Self {
        Self { ln_value: 0.0, ln_lower: 0.0, ln_upper: 0.0, abs_error: 0.0, truncation: 0 }
    }
}

const SCALE_HI: f64 = 1.340_780_792_994_259_7e154; // 2^512
const SCALE_LO: f64 = 7.458_340_731_200_207e-155; // 2^-512

/// Distribution of `Z_J = Σ_{j<J} I_j`, truncated at level `n`, in tilted
/// and scaled coordinates: `P(Z_J = k) = v[k]·exp(ln_scale − θk)` for `k < n`,
/// and `P(Z_J ≥ n) = top·exp(ln_scale − θn)`.
struct TiltedDp {
    v: Vec<f64>,
    top: f64,
    theta: f64,
    ln_scale: f64,
}

impl TiltedDp {
    fn run(p: impl Iterator<Item = f64>, n: usize, theta: f64) -> Self {
        let et = exp(theta);
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        let mut top = 0.0;
        let mut ln_scale = 0.0;
        for pj in p {
            let up = pj * et;
            let stay = 1.0 - pj;
            top += v[n - 1] * up;
            for k in (1..n).rev() {
                v[k] = v[k] * stay + v[k - 1] * up;
            }
            v[0] *= stay;
            let mx = v.iter().copied().fold(top, f64::max);
            if mx > SCALE_HI || (mx < SCALE_LO && mx > 0.0) {
                let (_, e) = libm::frexp(mx);
                let f = libm::ldexp(1.0, -e);
                v.iter_mut().for_each(|x| *x *= f);
                top *= f;
                ln_scale += f64::from(e) * LN_2;
            }
        }
        Self { v, top, theta, ln_scale }
    }

    fn ln_point(&self, k: usize) -> f64 {
        ln(self.v[k]) + self.ln_scale - self.theta * k as f64
    }

    fn ln_top(&self) -> f64 {
        ln(self.top) + self.ln_scale - self.theta * self.v.len() as f64
    }

    /// `ln P(Z_J ≥ m)` for `m = 0..=n`.
    fn ln_survival(&self) -> Vec<f64> {
        let n = self.v.len();
        let mut out = vec![0.0; n + 1];
        out[n] = self.ln_top();
        for m in (0..n).rev() {
            out[m] = log_add_exp(out[m + 1], self.ln_point(m));
        }
        out
    }
}

/// Tilt for the head DP: `θ ≥ 0` with tilted mean `n` (clamped).
fn head_tilt(p: &[f64], n: usize) -> f64 {
    let mean = |th: f64| -> f64 {
        let x = exp_m1(th);
        p.iter().map(|&q| q * (x + 1.0) / (1.0 + q * x)).sum()
    };
    let target = n as f64;
    if mean(0.0) >= target {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 300.0);
    if mean(hi) <= target {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `ln P(R = k)`, `k = 0..=kmax`, for `R = Σ_{j ≥ J} I_j` with the power
/// tail, via power sums and Newton's identities on `q_j = p_j/(1 − p_j)`.
/// Also returns a relative error bound and an upper bound on `P(R > kmax)`.
struct Remainder {
    ln_pmf: Vec<f64>,
    // Relative error of each pmf entry.
    rel: Vec<f64>,
    beyond: f64,
}

fn remainder_law(seq: &ParamSeq, big_j: usize, kmax: usize) -> Remainder {
    let p1 = seq.power_sum_from(big_j, 1);
    if p1.value == 0.0 {
        let mut ln_pmf = vec![f64::NEG_INFINITY; kmax + 1];
        ln_pmf[0] = 0.0;
        return Remainder { rel: vec![0.0; kmax + 1], ln_pmf, beyond: 0.0 };
    }
    let lambda = p1.value;
    let ln_lambda = ln(lambda);
    // Normalized power sums π_s = P_s / λ^s.
    let smax = kmax + 48;
    let mut pi = vec![0.0; smax + 1];
    let mut ln_p0 = 0.0;
    let mut em_err = p1.err;
    pi[1] = 1.0;
    ln_p0 -= lambda;
    for s in 2..=smax {
        let b: Bracket = seq.power_sum_from(big_j, s as u32);
        if b.value == 0.0 {
            break;
        }
        pi[s] = exp(ln(b.value) - s as f64 * ln_lambda);
        ln_p0 -= b.value / s as f64;
        em_err += b.err;
        if pi[s] < 1e-300 {
            break;
        }
    }
    // Q̃_m = Q_m / λ^m = Σ_l C(m+l-1, l) π_{m+l} λ^l.
    let mut qt = vec![0.0; smax + 1];
    for m in 1..=smax {
        let mut acc = 0.0;
        let mut coef = 1.0;
        let mut lam_l = 1.0;
        for l in 0..=(smax - m) {
            if l > 0 {
                coef *= (m + l - 1) as f64 / l as f64;
                lam_l *= lambda;
            }
            let term = coef * pi[m + l] * lam_l;
            acc += term;
            if term < 1e-20 * acc {
                break;
            }
        }
        qt[m] = acc;
    }
    // g_k = e_k k! / λ^k. The Newton recursion alternates, so track a
    // running relative error and stop once cancellation eats the precision;
    // the mass beyond the cut goes into `beyond`.
    let mut g = vec![0.0; kmax + 1];
    let mut g_rel = vec![0.0; kmax + 1];
    g[0] = 1.0;
    let mut kcut = kmax + 1;
    for k in 1..=kmax {
        let mut acc = 0.0;
        let mut err = 0.0;
        let mut ff = 1.0; // (k-1)!/(k-i)!
        for i in 1..=k.min(smax) {
            if i > 1 {
                ff *= (k - i + 1) as f64;
            }
            let term = g[k - i] * qt[i] * ff;
            err += abs(term) * (g_rel[k - i] + 4.0 * f64::EPSILON * i as f64);
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            if abs(term) < 1e-22 * abs(acc) && i > 2 {
                break;
            }
        }
        let rel = err / abs(acc) + f64::EPSILON;
        if !(acc > 0.0) || !(rel < 1e-6) {
            kcut = k;
            break;
        }
        g[k] = acc;
        g_rel[k] = rel;
    }
    let ln_pmf: Vec<f64> = (0..=kmax)
        .map(|k| {
            if k < kcut {
                ln_p0 + ln(g[k]) + k as f64 * ln_lambda - ln_gamma(k as f64 + 1.0)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    // e_k ≤ Q_1^k / k! and P0 ≤ 1, so P(R ≥ k) ≤ Q_1^k e^{Q_1} / k!.
    let q1 = lambda * qt[1];
    let k1 = kcut as f64;
    let beyond = exp(k1 * ln(q1) - ln_gamma(k1 + 1.0) + q1);
    let base = (kmax as f64 + 2.0) * em_err / lambda + 64.0 * f64::EPSILON * kmax as f64;
    let rel = g_rel.iter().map(|&r| base + r).collect();
    Remainder { ln_pmf, rel, beyond }
}

/// `P(Z ≥ n)` for `Z = Σ_j I_j`, independent `I_j ~ Bernoulli(p_j)`.
///
/// The first `J` terms go through an exponentially tilted dynamic program
/// (kept in range by power-of-two rescaling), which keeps full relative
/// precision for tails far below `1e-300`. For infinite sequences the law of
/// the remainder `Σ_{j≥J} I_j` is computed analytically and convolved in,
/// so there is no truncation error beyond the certified bracket. Fails with
/// [`Error::NoFiniteTruncation`] if the certified absolute error exceeds `eps`.
pub fn exact_tail(seq: &ParamSeq, n: usize, eps: f64) -> Result<TailProb> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive"));
    }
    if n == 0 {
        return Ok(TailProb::certain());
    }
    let big_j = truncation_index(seq, n);
    let head: Vec<f64> = (0..big_j).map(|j| seq.p(j)).collect();
    let theta = head_tilt(&head, n);
    let dp = TiltedDp::run(head.iter().copied(), n, theta);
    let dp_rel = 8.0 * f64::EPSILON * (big_j + n + 8) as f64;

    let out = if seq.is_finite() {
        let lv = dp.ln_top();
        TailProb {
            ln_value: lv,
            ln_lower: lv + ln_1p(-dp_rel),
            ln_upper: lv + ln_1p(dp_rel),
            abs_error: exp(lv) * dp_rel,
            truncation: big_j,
        }
    } else {
        let kmax = n + 64;
        let rem = remainder_law(seq, big_j, kmax);
        let surv = dp.ln_survival();
        let mut lv = f64::NEG_INFINITY;
        // ln Σ_k (term_k · rel_k), the propagated error.
        let mut le = f64::NEG_INFINITY;
        for k in 0..=kmax {
            let t = if k < n { rem.ln_pmf[k] + surv[n - k] } else { rem.ln_pmf[k] };
            lv = log_add_exp(lv, t);
            le = log_add_exp(le, t + ln(rem.rel[k] + dp_rel));
        }
        let rel = exp(le - lv);
        let value = exp(lv);
        TailProb {
            ln_value: lv,
            ln_lower: lv + ln_1p(-rel.min(0.5)),
            ln_upper: log_add_exp(lv + ln_1p(rel), ln(rem.beyond)),
            abs_error: value * rel + rem.beyond,
            truncation: big_j,
        }
    };
    if !(out.abs_error <= eps) {
        return Err(Error::NoFiniteTruncation { eps, achieved: out.abs_error });
    }
    Ok(out)
}

fn truncation_index(seq: &ParamSeq, n: usize) -> usize {
    match seq.tail() {
        None => seq.head().len(),
        Some(t) => {
            // J ≥ 8 max(1, α−1) n keeps the Newton recursion well conditioned.
            let spread = (t.alpha - 1.0).max(1.0);
            (ceil(8.0 * spread * n as f64) as usize).max(64).max(seq.head().len())
        }
    }
}

/// `P(Z = k)` for `k < kmax` and `P(Z ≥ kmax)` in the last slot, for a sum
/// of arbitrarily many Bernoulli terms. Cost is `O(len · kmax)`.
pub fn pmf_capped<I: IntoIterator<Item = f64>>(p: I, kmax: usize) -> Vec<f64> {
    assert!(kmax >= 1, "kmax must be at least 1");
    let mut v = vec![0.0; kmax + 1];
    v[0] = 1.0;
    let mut top = 0;
    for q in p {
        if q == 0.0 {
            continue;
        }
        // Overflow bucket absorbs from below and keeps its own mass.
        if top == kmax {
            v[kmax] += v[kmax - 1] * q;
        }
        let hi = if top < kmax { top + 1 } else { kmax - 1 };
        for k in (1..=hi).rev() {
            v[k] = v[k] * (1.0 - q) + v[k - 1] * q;
        }
        v[0] *= 1.0 - q;
        top = (top + 1).min(kmax);
    }
    v
}

/// Exact probability mass function of a finite sum (`P(Z = k)`, `k = 0..=len`).
pub fn exact_pmf(p: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; p.len() + 1];
    v[0] = 1.0;
    for (j, &q) in p.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            v[k] = v[k] * (1.0 - q) + v[k - 1] * q;
        }
        v[0] *= 1.0 - q;
    }
    v
}

/// `ψ(θ) = ln E e^{θZ}` and its first two derivatives (the tilted mean and
/// variance of `Z`), with a bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi {
    pub psi: f64,
    pub d1: f64,
    pub d2: f64,
    pub error: f64,
}

pub fn psi_and_derivatives(seq: &ParamSeq, theta: f64, eps: f64) -> Result<Psi> {
    if !theta.is_finite() || theta > 700.0 {
        return Err(Error::InvalidParameter("theta must be finite and at most 700"));
    }
    let x = exp_m1(theta);
    let et = x + 1.0;
    let big_j = match seq.tail() {
        None => seq.head().len(),
        Some(t) => {
            // p_J |x| ≤ 1/4 makes the remainder series converge geometrically.
            let j = powf(4.0 * t.c * abs(x), 1.0 / t.alpha) - t.w;
            let j = if j > 0.0 { ceil(j) } else { 0.0 };
            if j > 1e8 {
                return Err(Error::NoFiniteTruncation { eps, achieved: f64::INFINITY });
            }
            (j as usize).max(seq.head().len())
        }
    };
    let (mut psi, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for j in 0..big_j {
        let p = seq.p(j);
        let den = 1.0 + p * x;
        psi += ln_1p(p * x);
        d1 += p * et / den;
        d2 += p * (1.0 - p) * et / (den * den);
    }
    let mut error = 4.0 * f64::EPSILON * (big_j as f64) * (abs(psi) + d1 + d2);
    if seq.tail().is_some() {
        // With a(s) = (−x)^{s−1} P_s and P_s = Σ_{j≥J} p_j^s:
        // ψ_R = Σ x a(s)/s,  ψ'_R = e^θ Σ a(s),  ψ''_R = e^θ Σ s (a(s) − b(s)),
        // where b(s) = (−x)^{s−1} P_{s+1}.
        let negx = -x;
        let mut ps: Vec<Bracket> = vec![Bracket::default()];
        let (mut r0, mut r1, mut r2) = (0.0, 0.0, 0.0);
        let mut s = 1usize;
        loop {
            while ps.len() <= s + 1 {
                let k = ps.len() as u32;
                ps.push(seq.power_sum_from(big_j, k));
            }
            let a = signed_power(negx, s - 1, ps[s].value);
            let b = signed_power(negx, s - 1, ps[s + 1].value);
            let t0 = x * a / s as f64;
            let t1 = a;
            let t2 = s as f64 * (a - b);
            r0 += t0;
            r1 += t1;
            r2 += t2;
            let ea = abs(signed_power(negx, s - 1, ps[s].err));
            let eb = abs(signed_power(negx, s - 1, ps[s + 1].err));
            error += abs(x) * ea + et * (ea + s as f64 * (ea + eb));
            let last = abs(t0) + et * (abs(t1) + abs(t2));
            if last <= 1e-18 * (abs(psi) + abs(r0) + d1 + d2) || s > 400 {
                // Terms shrink at least geometrically (ratio ≤ 1/4 up to the
                // polynomial factor s), so twice the last term bounds the rest.
                error += 2.0 * last;
                break;
            }
            s += 1;
        }
        psi += r0;
        d1 += et * r1;
        d2 += et * r2;
    }
    if !(error <= eps) {
        return Err(Error::NoFiniteTruncation { eps, achieved: error });
    }
    Ok(Psi { psi, d1, d2, error })
}

// (−x)^e · v without forming (−x)^e on its own (it may overflow).
fn signed_power(negx: f64, e: usize, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if e == 0 {
        return v;
    }
    if negx == 0.0 {
        return 0.0;
    }
    let mag = exp(e as f64 * ln(abs(negx)) + ln(abs(v)));
    let neg = (negx < 0.0 && e % 2 == 1) != (v < 0.0);
    if neg {
        -mag
    } else {
        mag
    }
}

/// Chernoff bound `ln P(Z ≥ z) ≤ −θz + ψ(θ)` at an explicit tilt `θ > 0`.
/// Returns `0` (the trivial bound) for `θ ≤ 0`.
pub fn chernoff_bound_at_tilt(seq: &ParamSeq, z: f64, theta: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidParameter("z must be positive"));
    }
    if theta <= 0.0 {
        return Ok(0.0);
    }
    let psi = psi_and_derivatives(seq, theta, 1e-9)?;
    // Rounding the truncation error upwards keeps this a true upper bound.
    Ok((-theta * z + psi.psi + psi.error).min(0.0))
}

/// Chernoff bound with the tilt `e^θ = r z^α` (α from the sequence's power
/// tail). The default choice `r = r*` is [`chernoff_bound_default`].
pub fn chernoff_bound(seq: &ParamSeq, z: f64, r: f64) -> Result<f64> {
    let t = seq.tail().ok_or(Error::InvalidParameter("sequence has no power-law tail"))?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("r must be positive"));
    }
    if !(z > 0.0) {
        return Err(Error::InvalidParameter("z must be positive"));
    }
    chernoff_bound_at_tilt(seq, z, ln(r) + t.alpha * ln(z))
}

pub fn chernoff_bound_default(seq: &ParamSeq, z: f64) -> Result<f64> {
    let t = seq.tail().ok_or(Error::InvalidParameter("sequence has no power-law tail"))?;
    let r = super::constants::solve_r_star(t.c, t.alpha)?;
    chernoff_bound(seq, z, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(p: &[f64]) -> ParamSeq {
        ParamSeq::finite(p.to_vec()).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert!((exact_tail(&fin(&[0.5, 0.5]), 1, 1e-12).unwrap().value() - 0.75).abs() < 1e-15);
        let v = exact_tail(&fin(&[0.1, 0.2, 0.3]), 2, 1e-12).unwrap().value();
        assert!((v - 0.098).abs() < 1e-15, "{v}");
        assert_eq!(exact_tail(&fin(&[1.0, 0.3]), 1, 1e-12).unwrap().value(), 1.0);
        assert_eq!(exact_tail(&fin(&[0.3]), 0, 1e-12).unwrap().value(), 1.0);
        assert_eq!(exact_tail(&fin(&[0.3]), 2, 1e-12).unwrap().value(), 0.0);
    }

    #[test]
    fn pmf_sums_to_one() {
        let p: Vec<f64> = (0..40).map(|j| 1.0 / (2.0 + j as f64)).collect();
        let s: f64 = exact_pmf(&p).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psi_examples() {
        let p = psi_and_derivatives(&fin(&[0.5]), 3.0f64.ln(), 1e-12).unwrap();
        assert!((p.psi - 2.0f64.ln()).abs() < 1e-15);
        let p = psi_and_derivatives(&fin(&[0.5]), 0.0, 1e-12).unwrap();
        assert_eq!((p.psi, p.d1, p.d2), (0.0, 0.5, 0.25));
    }

    #[test]
    fn psi_tail_matches_long_sum() {
        let seq = ParamSeq::power(1.0, 1.0, 2.0).unwrap();
        for theta in [-1.0, 0.0, 0.7, 3.0, 6.0] {
            let a = psi_and_derivatives(&seq, theta, 1e-10).unwrap();
            let x = exp_m1(theta);
            let (mut psi, mut d1, mut d2) = (0.0, 0.0, 0.0);
            for j in (0..4_000_000).rev() {
                let p = seq.p(j);
                psi += ln_1p(p * x);
                d1 += p * (x + 1.0) / (1.0 + p * x);
                d2 += p * (1.0 - p) * (x + 1.0) / (1.0 + p * x).powi(2);
            }
            // Remainder beyond 4e6 is ≈ x/4e6 for ψ and e^θ/4e6 for ψ'.
            let cut = 1.0 / 4_000_001.0;
            psi += ln_1p(x * cut);
            d1 += (x + 1.0) * cut;
            d2 += (x + 1.0) * cut;
            assert!((a.psi - psi).abs() < 1e-9 * (1.0 + psi.abs()), "θ={theta}");
            assert!((a.d1 - d1).abs() < 1e-9 * d1, "θ={theta}");
            assert!((a.d2 - d2).abs() < 1e-9 * d2, "θ={theta}");
        }
    }

    #[test]
    fn infinite_sequence_matches_long_dp() {
        // Compare with a plain DP over 20000 terms plus the Poisson-like
        // remainder, at a level where the tail is not tiny.
        let seq = ParamSeq::power(1.0, 1.0, 2.0).unwrap();
        let n = 4;
        let big = 200_000;
        let p: Vec<f64> = (0..big).map(|j| seq.p(j)).collect();
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        for &q in &p {
            v[n] += v[n - 1] * q;
            for k in (1..n).rev() {
                v[k] = v[k] * (1.0 - q) + v[k - 1] * q;
            }
            v[0] *= 1.0 - q;
        }
        // First-order correction for the omitted mass λ ≈ 1/big.
        let lambda = 1.0 / (big as f64 + 0.5);
        let reference = v[n] + lambda * v[n - 1];
        let got = exact_tail(&seq, n, 1e-12).unwrap();
        assert!((got.value() / reference - 1.0).abs() < 1e-8, "{} {}", got.value(), reference);
        assert!(got.ln_lower <= got.ln_value && got.ln_value <= got.ln_upper);
    }
}
