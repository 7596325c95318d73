//! Numerical integration and root bracketing.
//!
//! [`gauss_kronrod`] is the workhorse: globally adaptive 7/15-point
//! Gauss–Kronrod with `|K15 − G7|` as the (conservative) per-panel error.
//! [`tanh_sinh`] is an unrelated scheme kept as an independent check on the
//! constants computed with the former.

use alloc::vec::Vec;

use crate::math::{abs, exp};
use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// An integral estimate with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl core::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate { value: self.value + rhs.value, error: self.error + rhs.error }
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    (k * half, abs((k - g) * half))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive G7–K15 on `[a, b]` until the summed panel error is below `tol`.
///
/// Fails with [`Error::Quadrature`] when `max_panels` subdivisions do not
/// suffice (typically a non-integrable singularity or `tol` below roundoff).
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (value, error) = kronrod_panel(&f, a, b);
    let mut panels = Vec::with_capacity(64);
    panels.push(Panel { a, b, value, error });
    loop {
        let (total, err) = panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if err <= tol {
            return Ok(Estimate { value: total, error: err });
        }
        if panels.len() >= max_panels {
            return Err(Error::Quadrature { tol, estimate: total, error: err });
        }
        let worst = panels.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).map(|(i, _)| i).unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Panel cannot be split further in floating point.
            return Err(Error::Quadrature { tol, estimate: total, error: err });
        }
        for (lo, hi) in [(p.a, mid), (mid, p.b)] {
            let (value, error) = kronrod_panel(&f, lo, hi);
            panels.push(Panel { a: lo, b: hi, value, error });
        }
    }
}

/// Double-exponential (tanh–sinh) quadrature on `[a, b]`.
///
/// Halves the step until two successive levels agree to `tol`; the reported
/// error is that last difference. Endpoint singularities are fine as long as
/// the integrand is never evaluated exactly at `a` or `b`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    use core::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    // Beyond |t| = 5 the nodes sit within 1e-100 of the endpoints.
    let t_max = 5.0;
    let term = |t: f64| -> f64 {
        let s = FRAC_PI_2 * libm::sinh(t);
        let c = libm::cosh(s);
        let w = FRAC_PI_2 * libm::cosh(t) / (c * c);
        // Distance to the nearer endpoint, computed without cancellation.
        let d = half * exp(-s.abs()) / c;
        let x = if t >= 0.0 { b - d } else { a + d };
        if x <= a || x >= b {
            return 0.0;
        }
        w * f(x)
    };
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut prev = sum * h * half;
    for _ in 0..12 {
        // Add the odd multiples of the halved step.
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            sum += term(t) + term(-t);
            k += 2;
        }
        let cur = sum * h * half;
        let diff = abs(cur - prev);
        if diff <= tol && h < 0.1 {
            return Ok(Estimate { value: cur, error: diff });
        }
        prev = cur;
    }
    Err(Error::Quadrature { tol, estimate: prev, error: f64::NAN })
}

/// Bisection for an increasing function crossing zero on `[lo, hi]`.
/// Runs until the bracket is below `xtol` (or stops shrinking).
pub fn bisect_increasing<F: FnMut(f64) -> Result<f64>>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(Error::InvalidParameter("bisection bracket does not straddle the root"));
    }
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
