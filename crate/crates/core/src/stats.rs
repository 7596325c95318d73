//! Sample summaries and Kolmogorov–Smirnov tests.

use alloc::vec::Vec;

use crate::math::{exp, floor, powi, sqrt};
use crate::{Error, Result};

/// Normal quantile for two-sided 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Normal-approximation 95% interval for the mean.
    pub mean_ci: (f64, f64),
    /// Distribution-free 95% interval for the median (order statistics).
    pub median_ci: (f64, f64),
}

/// Linear interpolation between order statistics (R type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = floor(h) as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(samples: &[f64]) -> Result<Summary> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let sd = sqrt(var);
    let half = Z95 * sd / sqrt(n as f64);
    // Ranks n/2 ∓ z·√n/2 bracket the median with ~95% coverage.
    let spread = Z95 * sqrt(n as f64) / 2.0;
    let lo_rank = floor(n as f64 / 2.0 - spread).max(0.0) as usize;
    let hi_rank = (libm::ceil(n as f64 / 2.0 + spread) as usize).min(n - 1);
    Ok(Summary {
        n,
        mean,
        std_dev: sd,
        median: quantile_sorted(&sorted, 0.5),
        q1: quantile_sorted(&sorted, 0.25),
        q3: quantile_sorted(&sorted, 0.75),
        mean_ci: (mean - half, mean + half),
        median_ci: (sorted[lo_rank], sorted[hi_rank]),
    })
}

/// Sample variance with a normal-theory 95% interval based on the
/// fourth central moment (valid for non-normal data).
pub fn variance_ci(samples: &[f64]) -> Result<(f64, (f64, f64))> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: n });
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let m2 = samples.iter().map(|x| powi(x - mean, 2)).sum::<f64>() / nf;
    let m4 = samples.iter().map(|x| powi(x - mean, 4)).sum::<f64>() / nf;
    let s2 = m2 * nf / (nf - 1.0);
    let se = sqrt(((m4 - m2 * m2) / nf).max(0.0));
    Ok((s2, (s2 - Z95 * se, s2 + Z95 * se)))
}

/// Kolmogorov distribution survival `P(K > x)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // The alternating series converges slowly here and the value is 1.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = exp(-2.0 * kf * kf * x * x);
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value `c(a)` with `P(K > c) = a`.
pub fn kolmogorov_critical(level: f64) -> f64 {
    // c(a) = sqrt(-ln(a/2)/2) is exact to within 1e-6 for the levels used.
    let mut c = sqrt(-crate::math::ln(level / 2.0) / 2.0);
    for _ in 0..50 {
        // Newton refinement on the full series.
        let f = kolmogorov_survival(c) - level;
        let mut d = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let t = 8.0 * kf * kf * c * exp(-2.0 * kf * kf * c * c);
            d += if k % 2 == 1 { -t } else { t };
        }
        if d == 0.0 {
            break;
        }
        let step = f / d;
        c -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
    /// Rejection threshold for `statistic` at the requested level.
    pub critical: f64,
    pub reject: bool,
}

/// Two-sample Kolmogorov–Smirnov test. Ties (common with integer-valued
/// samples) are handled by advancing through all equal values at once.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<KsOutcome> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut x: Vec<f64> = a.to_vec();
    let mut y: Vec<f64> = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = sqrt((n * m) as f64 / (n + m) as f64);
    let critical = kolmogorov_critical(level) / en;
    Ok(KsOutcome { statistic: d, p_value: kolmogorov_survival(en * d), critical, reject: d > critical })
}

/// One-sample test against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, level: f64) -> Result<KsOutcome> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut x: Vec<f64> = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &v) in x.iter().enumerate() {
        let f = cdf(v);
        d = d.max(f - k as f64 / n).max((k + 1) as f64 / n - f);
    }
    let en = sqrt(n);
    let critical = kolmogorov_critical(level) / en;
    Ok(KsOutcome { statistic: d, p_value: kolmogorov_survival(en * d), critical, reject: d > critical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn median_of_five() {
        let s = summarize(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(s.median, 3.0);
        assert_eq!(s.q1, 2.0);
        assert_eq!(s.q3, 4.0);
    }

    #[test]
    fn constant_list_has_zero_width_ci() {
        let s = summarize(&[2.5; 10]).unwrap();
        assert_eq!(s.mean_ci, (2.5, 2.5));
        assert_eq!(s.median_ci, (2.5, 2.5));
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(summarize(&[1.0]), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn kolmogorov_critical_values() {
        // Tabulated asymptotic values.
        assert!((kolmogorov_critical(0.05) - 1.358_098_8).abs() < 1e-6);
        assert!((kolmogorov_critical(0.01) - 1.627_61).abs() < 1e-4);
        assert!((kolmogorov_critical(0.001) - 1.949_47).abs() < 1e-4);
    }

    #[test]
    fn ks_identical_samples_accept() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a, 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
    }

    #[test]
    fn ks_shifted_samples_reject() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.3).collect();
        let r = ks_two_sample(&a, &b, 0.01).unwrap();
        assert!((r.statistic - 0.3).abs() < 2e-3);
        assert!(r.reject);
    }

    #[test]
    fn ks_ties_two_point() {
        let a = vec![-0.5, 0.5, -0.5, 0.5];
        let b = vec![0.5, -0.5, 0.5, -0.5];
        assert_eq!(ks_two_sample(&a, &b, 0.01).unwrap().statistic, 0.0);
    }
}
