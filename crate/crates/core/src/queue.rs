//! Single-server workload driven by arrival paths.
//!
//! The server drains work at rate `1/ρ`. Between arrivals the workload falls
//! linearly until it hits zero; each arrival adds its job size.

use alloc::vec::Vec;

use rand_chacha::rand_core::RngCore;

use crate::math::{ln, sqrt};
use crate::perturbation::PerturbationModel;
use crate::rng::uniform;
use crate::traffic::{generate_path, ArrivalPath};
use crate::{Error, Result};

/// Mean-one job-size laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceSpec {
    Deterministic,
    Exponential,
    /// Uniform on `[0.5, 1.5]`.
    Uniform,
}

impl ServiceSpec {
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Deterministic => 1.0,
            Self::Exponential => -ln(uniform(rng)),
            Self::Uniform => 0.5 + uniform(rng),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Deterministic => 0.0,
            Self::Exponential => 1.0,
            Self::Uniform => 1.0 / 12.0,
        }
    }

    /// `n` i.i.d. sizes.
    pub fn draw<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Job sizes in arrival order.
#[derive(Debug, Clone, Copy)]
pub enum JobSizes<'a> {
    Unit,
    Given(&'a [f64]),
}

impl JobSizes<'_> {
    fn get(&self, k: usize) -> f64 {
        match self {
            JobSizes::Unit => 1.0,
            JobSizes::Given(v) => v[k],
        }
    }

    fn check(&self, needed: usize) -> Result<()> {
        match self {
            JobSizes::Given(v) if v.len() < needed => Err(Error::ShortServiceSequence { needed, got: v.len() }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadTrace {
    pub rho: f64,
    /// `(a_k, W(a_k+))` for every arrival in the window.
    pub epochs: Vec<(f64, f64)>,
    /// `(t, W(t))` at the requested times, in request order.
    pub grid: Vec<(f64, f64)>,
}

impl WorkloadTrace {
    /// Workload at time `t` (start of window: 0).
    pub fn at(&self, t_lo: f64, t: f64) -> f64 {
        let k = self.epochs.partition_point(|&(a, _)| a <= t);
        let (a, w) = if k == 0 { (t_lo, 0.0) } else { self.epochs[k - 1] };
        (w - (t - a) / self.rho).max(0.0)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRho(rho))
    }
}

/// Workload on the path's window, empty at its start:
/// `W(a_k+) = max(W(a_{k−1}+) − (a_k − a_{k−1})/ρ, 0) + V_k`.
pub fn workload(path: &ArrivalPath, rho: f64, grid: &[f64], sizes: JobSizes<'_>) -> Result<WorkloadTrace> {
    check_rho(rho)?;
    let (t_lo, t_hi) = path.window();
    if let Some(&t) = grid.iter().find(|&&t| !(t >= t_lo && t <= t_hi)) {
        return Err(Error::OutOfWindow { t, lo: t_lo, hi: t_hi });
    }
    sizes.check(path.entries().len())?;
    let mut epochs = Vec::with_capacity(path.entries().len());
    let (mut prev, mut w) = (t_lo, 0.0f64);
    for (k, a) in path.times().enumerate() {
        w = (w - (a - prev) / rho).max(0.0) + sizes.get(k);
        prev = a;
        epochs.push((a, w));
    }
    let mut trace = WorkloadTrace { rho, epochs, grid: Vec::with_capacity(grid.len()) };
    trace.grid = grid.iter().map(|&t| (t, trace.at(t_lo, t))).collect();
    Ok(trace)
}

/// `W(t)` by the supremum formula: the largest amount of work that arrived
/// in some `[a_k, t]` in excess of what the server can remove in that time.
/// Quadratic; a test oracle for [`workload`].
pub fn workload_by_max_formula(path: &ArrivalPath, rho: f64, t: f64, sizes: JobSizes<'_>) -> Result<f64> {
    check_rho(rho)?;
    sizes.check(path.entries().len())?;
    let times: Vec<f64> = path.times().collect();
    let mut best = 0.0f64;
    for k in 0..times.len() {
        if times[k] > t {
            break;
        }
        let work: f64 = (k..times.len()).take_while(|&j| times[j] <= t).map(|j| sizes.get(j)).sum();
        best = best.max(work - (t - times[k]) / rho);
    }
    Ok(best)
}

/// `(1/√t) sup_{0≤s≤t} |Λ(s) − Λ′(s)|` with `Λ(s) = Σ_{i≤N(s)} V_i` (scheduled
/// arrivals) and `Λ′(s) = Σ_{i≤⌊s⌋} V_i` (deterministic arrivals), both using
/// the same sizes `V_1, V_2, …`. The path window must start at 0 and reach `t`.
pub fn sup_centered_diff(path: &ArrivalPath, sizes: JobSizes<'_>, t: f64) -> Result<f64> {
    let (t_lo, t_hi) = path.window();
    if t_lo != 0.0 || !(t > 0.0 && t <= t_hi) {
        return Err(Error::OutOfWindow { t, lo: t_lo, hi: t_hi });
    }
    let times: Vec<f64> = path.times().take_while(|&a| a <= t).collect();
    let n_int = t as usize;
    sizes.check(times.len().max(n_int))?;
    let (mut na, mut nd) = (0usize, 0usize);
    let (mut lam, mut lam_d) = (0.0f64, 0.0f64);
    let mut best = 0.0f64;
    loop {
        let next_a = times.get(na).copied().unwrap_or(f64::INFINITY);
        let next_d = if nd < n_int { (nd + 1) as f64 } else { f64::INFINITY };
        let s = next_a.min(next_d);
        if s == f64::INFINITY {
            break;
        }
        // All jumps at time s first, then evaluate.
        while na < times.len() && times[na] <= s {
            lam += sizes.get(na);
            na += 1;
        }
        while nd < n_int && (nd + 1) as f64 <= s {
            lam_d += sizes.get(nd);
            nd += 1;
        }
        best = best.max((lam - lam_d).abs());
    }
    Ok(best / sqrt(t))
}

/// One approximately stationary draw of `W_ρ(0)`: unit jobs, empty at
/// `−T` with `T = horizon_mult/(1 − ρ)`.
pub fn steady_workload_sample<R: RngCore + ?Sized>(
    model: &PerturbationModel,
    rho: f64,
    horizon_mult: f64,
    rng: &mut R,
    eps: f64,
) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidRho(rho));
    }
    if !(horizon_mult > 0.0) {
        return Err(Error::InvalidParameter("horizon_mult must be positive"));
    }
    let horizon = horizon_mult / (1.0 - rho);
    let path = generate_path(model, -horizon, 0.0, None, rng, eps)?;
    let (mut prev, mut w) = (-horizon, 0.0f64);
    for a in path.times() {
        w = (w - (a - prev) / rho).max(0.0) + 1.0;
        prev = a;
    }
    Ok((w + prev / rho).max(0.0))
}
