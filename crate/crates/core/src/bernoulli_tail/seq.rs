use alloc::vec::Vec;

use crate::math::{powf, powi};
use crate::{Error, Result};

/// `p_j = c (w + j)^-α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub c: f64,
    pub w: f64,
    pub alpha: f64,
}

impl PowerLaw {
    pub fn new(c: f64, w: f64, alpha: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter("c must be positive"));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter("w must be positive"));
        }
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::Domain { alpha });
        }
        Ok(Self { c, w, alpha })
    }

    #[inline]
    pub fn p(&self, j: usize) -> f64 {
        self.c * powf(self.w + j as f64, -self.alpha)
    }
}

/// Bernoulli success probabilities `p_0, p_1, …`: an explicit head followed
/// by an optional power-law tail (indexed globally, so `p_j = c (w + j)^-α`
/// for every `j ≥ head.len()`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSeq {
    head: Vec<f64>,
    tail: Option<PowerLaw>,
}

/// A value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Bracket {
    pub value: f64,
    pub err: f64,
}

impl ParamSeq {
    pub fn finite(p: Vec<f64>) -> Result<Self> {
        Self::new(p, None)
    }

    /// The pure power family `p_j = c (w + j)^-α`, `j ≥ 0`.
    pub fn power(c: f64, w: f64, alpha: f64) -> Result<Self> {
        Self::new(Vec::new(), Some(PowerLaw::new(c, w, alpha)?))
    }

    pub fn new(head: Vec<f64>, tail: Option<PowerLaw>) -> Result<Self> {
        if head.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("probabilities must lie in [0, 1]"));
        }
        if let Some(t) = tail {
            if t.p(head.len()) > 1.0 {
                return Err(Error::InvalidParameter("power tail exceeds 1 at its first index"));
            }
        }
        Ok(Self { head, tail })
    }

    pub fn p(&self, j: usize) -> f64 {
        match self.head.get(j) {
            Some(&p) => p,
            None => self.tail.map_or(0.0, |t| t.p(j)),
        }
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> Option<PowerLaw> {
        self.tail
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    /// The `(c, w, α)` descriptor, present when every `p_j` follows the law.
    pub fn descriptor(&self) -> Option<PowerLaw> {
        let t = self.tail?;
        self.head.iter().enumerate().all(|(j, &p)| p == t.p(j)).then_some(t)
    }

    /// Upper bound on `Σ_{j > J} p_j`; non-increasing in `J`.
    pub fn tail_sum_bound(&self, big_j: usize) -> f64 {
        let head: f64 = self.head.iter().skip(big_j + 1).sum();
        let Some(t) = self.tail else { return head };
        let first = (big_j + 1).max(self.head.len());
        let y = t.w + first as f64;
        // f(first) + ∫_first^∞ f
        head + t.c * powf(y, -t.alpha) * (1.0 + y / (t.alpha - 1.0))
    }

    /// `Σ_{j ≥ from} p_j^s` for `from ≥ head.len()`.
    pub(crate) fn power_sum_from(&self, from: usize, s: u32) -> Bracket {
        debug_assert!(from >= self.head.len());
        match self.tail {
            None => Bracket::default(),
            Some(t) => power_law_power_sum(t, from, s),
        }
    }
}

// Sum of f(j) = c^s (w + j)^{-αs} over j ≥ from: direct terms until the
// Euler–Maclaurin corrections are small, then the EM formula through the
// f^(5) term. f is completely monotone, so the remainder is bounded by the
// first omitted (B8) term.
fn power_law_power_sum(t: PowerLaw, from: usize, s: u32) -> Bracket {
    let beta = t.alpha * f64::from(s);
    let cs = powf(t.c, f64::from(s));
    let f = |y: f64| cs * powf(y, -beta);
    let start = (32.0f64).max(4.0 * beta);
    let mut y = t.w + from as f64;
    let mut sum = 0.0;
    while y < start {
        let fy = f(y);
        // Whole remainder is below f(y)(1 + y/(β-1)).
        let rest = fy * (1.0 + y / (beta - 1.0));
        if rest <= 1e-18 * sum || fy == 0.0 {
            return Bracket { value: sum, err: rest };
        }
        sum += fy;
        y += 1.0;
    }
    let fy = f(y);
    let inv = 1.0 / y;
    let rising = |k: u32| (0..k).fold(1.0, |acc, i| acc * (beta + f64::from(i)));
    let em = fy * y / (beta - 1.0) + fy / 2.0 + fy * beta * inv / 12.0 - fy * rising(3) * powi(inv, 3) / 720.0
        + fy * rising(5) * powi(inv, 5) / 30240.0;
    let err = fy * rising(7) * powi(inv, 7) / 1_209_600.0;
    Bracket { value: sum + em, err: err + 4.0 * f64::EPSILON * (sum + em) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validation() {
        assert!(ParamSeq::finite(vec![0.5, 1.2]).is_err());
        assert!(ParamSeq::power(1.0, 1.0, 1.0).is_err());
        assert!(ParamSeq::power(2.0, 1.0, 2.0).is_err());
        assert!(ParamSeq::power(1.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn descriptor_requires_exact_match() {
        let s = ParamSeq::power(1.0, 1.0, 2.0).unwrap();
        assert!(s.descriptor().is_some());
        let t = s.tail().unwrap();
        let h = ParamSeq::new(vec![1.0, 0.25], Some(t)).unwrap();
        assert_eq!(h.descriptor(), Some(t));
        let h = ParamSeq::new(vec![0.9], Some(t)).unwrap();
        assert_eq!(h.descriptor(), None);
    }

    #[test]
    fn power_sums_match_brute_force() {
        let t = PowerLaw::new(1.0, 1.0, 2.0).unwrap();
        let seq = ParamSeq::power(1.0, 1.0, 2.0).unwrap();
        for (from, s) in [(0usize, 1u32), (3, 1), (64, 1), (64, 2), (10, 3), (100, 7)] {
            let b = seq.power_sum_from(from, s);
            // Brute force: 2e6 terms plus the integral tail.
            let n = 2_000_000usize;
            let mut direct = 0.0;
            for j in (from..from + n).rev() {
                direct += t.p(j).powi(s as i32);
            }
            let y = t.w + (from + n) as f64;
            let beta = 2.0 * s as f64;
            direct += powf(y, 1.0 - beta) / (beta - 1.0) + powf(y, -beta) / 2.0;
            let rel = (b.value - direct).abs() / direct;
            assert!(rel < 1e-12, "from={from} s={s} rel={rel}");
            assert!(b.err < 1e-12 * b.value);
        }
    }

    #[test]
    fn tail_sum_bound_dominates() {
        let seq = ParamSeq::power(1.0, 1.0, 2.0).unwrap();
        for j in [0usize, 5, 50] {
            let exact = seq.power_sum_from(j + 1, 1).value;
            let b = seq.tail_sum_bound(j);
            assert!(b >= exact && b < 2.0 * exact + 1.0 / (j as f64 + 2.0).powi(2));
        }
        let fin = ParamSeq::finite(vec![0.1, 0.2, 0.3]).unwrap();
        assert!((fin.tail_sum_bound(0) - 0.5).abs() < 1e-15);
        assert_eq!(fin.tail_sum_bound(2), 0.0);
    }
}
