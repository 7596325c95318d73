//! Scheduled arrivals: customer `i` is scheduled at `i + U` and arrives at
//! `i + U + ξ_i`.
//!
//! [`generate_path`] realizes the process on a window `(t_lo, t_hi]`. Slots
//! near the window are simulated index by index; the infinitely many far
//! indices are handled by an exact skip-and-thin sampler, so the only
//! omission is beyond offset `2^120` and its expected size is reported as
//! `truncation_eps`. The path also keeps every off-window customer whose
//! slot and arrival straddle part of the window, which makes the early/late
//! counts exact on the whole closed window.

mod covariance;
mod farfield;
mod limit;

use alloc::vec::Vec;

use rand_chacha::rand_core::RngCore;

use crate::math::{ceil, floor};
use crate::perturbation::PerturbationModel;
use crate::rng::uniform;
use crate::{Error, Result};

pub use covariance::conditional_cov;
pub use limit::{direct_centered_count, sample_limit_rv};

/// Slots within this distance of the window are simulated one by one.
const NEAR_PAD: i64 = 2;

/// Default bound on the expected number of omitted arrivals per path.
pub const DEFAULT_EPS: f64 = 1e-10;

/// One customer: schedule index and arrival time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub index: i128,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalPath {
    u: f64,
    t_lo: f64,
    t_hi: f64,
    scan: (i64, i64),
    entries: Vec<Arrival>,
    strays: Vec<Arrival>,
    truncation_eps: f64,
}

impl ArrivalPath {
    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    /// Arrivals in `(t_lo, t_hi]`, sorted by time then index.
    pub fn entries(&self) -> &[Arrival] {
        &self.entries
    }

    /// Arrival times in order.
    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.entries.iter().map(|a| a.time)
    }

    /// Indices simulated one by one; all slots in the window lie in here.
    pub fn scan_range(&self) -> (i64, i64) {
        self.scan
    }

    pub fn truncation_eps(&self) -> f64 {
        self.truncation_eps
    }

    /// Scheduled time `i + U`.
    pub fn slot(&self, index: i128) -> f64 {
        index as f64 + self.u
    }

    fn check(&self, t: f64) -> Result<()> {
        if t >= self.t_lo && t <= self.t_hi {
            Ok(())
        } else {
            Err(Error::OutOfWindow { t, lo: self.t_lo, hi: self.t_hi })
        }
    }

    /// Number of arrivals in `(t_lo, t]`.
    pub fn count(&self, t: f64) -> Result<usize> {
        self.check(t)?;
        Ok(self.entries.partition_point(|a| a.time <= t))
    }

    /// `(E(t), L(t))`: customers scheduled after `t` who arrived by `t`, and
    /// customers scheduled by `t` who arrive after it. Exact for every `t` in
    /// the closed window.
    pub fn early_late(&self, t: f64) -> Result<(u64, u64)> {
        self.check(t)?;
        let (mut e, mut l) = (0, 0);
        for a in self.entries.iter().chain(&self.strays) {
            let s = self.slot(a.index);
            if a.time <= t && s > t {
                e += 1;
            } else if s <= t && a.time > t {
                l += 1;
            }
        }
        Ok((e, l))
    }

    /// Number of slots in `(0, t]` (negative for `t < 0`).
    fn slot_count(&self, t: f64) -> i64 {
        let (lo, hi) = self.scan;
        let (a, b) = if t >= 0.0 { (0.0, t) } else { (t, 0.0) };
        let n = (lo..=hi)
            .filter(|&i| {
                let s = self.slot(i128::from(i));
                s > a && s <= b
            })
            .count() as i64;
        if t >= 0.0 {
            n
        } else {
            -n
        }
    }

    /// `[N(t) − t] − [S(t) − t + E(t) − L(t) − E(0) + L(0)]` where `S(t)`
    /// counts slots in `(0, t]`. Identically zero; needs `0` and `t` in the
    /// window.
    pub fn decomposition_residual(&self, t: f64) -> Result<i64> {
        self.check(0.0)?;
        let n = self.count(t)? as i64 - self.count(0.0)? as i64;
        let (et, lt) = self.early_late(t)?;
        let (e0, l0) = self.early_late(0.0)?;
        let rhs = self.slot_count(t) + et as i64 - lt as i64 - e0 as i64 + l0 as i64;
        Ok(n - rhs)
    }
}

/// Realize the scheduled process on `(t_lo, t_hi]`. `u` fixes the common
/// shift (conditional experiments); `None` draws it from `rng` first.
pub fn generate_path<R: RngCore + ?Sized>(
    model: &PerturbationModel,
    t_lo: f64,
    t_hi: f64,
    u: Option<f64>,
    rng: &mut R,
    eps: f64,
) -> Result<ArrivalPath> {
    model.validate()?;
    if !(t_lo < t_hi) || t_lo.abs() > 4e15 || t_hi.abs() > 4e15 {
        return Err(Error::InvalidInterval { lo: t_lo, hi: t_hi });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive"));
    }
    if let Some(u) = u {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::InvalidParameter("u must lie in [0, 1)"));
        }
    }
    let i_lo = floor(t_lo) as i64 - NEAR_PAD;
    let i_hi = ceil(t_hi) as i64 + NEAR_PAD;
    // Distances from the window to the first far slot on either side.
    let u_probe = u.unwrap_or(0.0);
    let y_right = i_hi as f64 + u_probe - t_hi;
    let y_left = t_lo - (i_lo as f64 + u_probe) - 1.0;
    let truncation_eps = model.left_tail_integral(y_right.max(1.0) + farfield::MAX_OFFSET)
        + model.right_tail_integral(y_left.max(1.0) + farfield::MAX_OFFSET);
    if !(truncation_eps <= eps) {
        return Err(Error::NoFiniteTruncation { eps, achieved: truncation_eps });
    }
    let u = match u {
        Some(u) => u,
        None => uniform(rng),
    };

    let mut entries = Vec::with_capacity((t_hi - t_lo) as usize + 8);
    let mut strays = Vec::new();
    let mut keep = |a: Arrival, slot: f64| {
        if a.time > t_lo && a.time <= t_hi {
            entries.push(a);
        } else if (a.time > t_hi && slot <= t_hi) || (a.time <= t_lo && slot > t_lo) {
            strays.push(a);
        }
    };

    for i in i_lo..=i_hi {
        let slot = i as f64 + u;
        let time = slot + model.sample(rng);
        keep(Arrival { index: i128::from(i), time }, slot);
    }

    // Far right: index i_hi + k has slot t_hi + y0 + k and reaches the
    // window iff ξ ≤ −(y0 + k); it then arrives at t_hi − excess.
    let y0 = i_hi as f64 + u - t_hi;
    farfield::sample_hits(
        rng,
        |k| model.cdf(-(y0 + k)),
        |k, rng| {
            let index = i128::from(i_hi) + k as i128;
            let time = t_hi - model.left_excess(y0 + k, uniform(rng));
            keep(Arrival { index, time }, index as f64 + u);
        },
    );
    // Far left: index i_lo − k has slot t_lo − (y0 + k) and reaches the
    // window iff ξ > y0 + k; it then arrives at t_lo + excess.
    let y0 = t_lo - (i_lo as f64 + u);
    farfield::sample_hits(
        rng,
        |k| model.survival(y0 + k),
        |k, rng| {
            let index = i128::from(i_lo) - k as i128;
            let time = t_lo + model.right_excess(y0 + k, uniform(rng));
            keep(Arrival { index, time }, index as f64 + u);
        },
    );

    entries.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.index.cmp(&b.index)));
    Ok(ArrivalPath { u, t_lo, t_hi, scan: (i_lo, i_hi), entries, strays, truncation_eps })
}
