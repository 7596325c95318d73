//! Numerics for single-server queues fed by scheduled traffic.
//!
//! Customer `i` is scheduled at `i + U` (one common uniform shift `U`) and
//! arrives at `i + U + ξ_i` with i.i.d. perturbations `ξ_i`. The crate covers
//!
//! - [`perturbation`]: parametric laws for `ξ` with exact tail probabilities;
//! - [`bernoulli_tail`]: exact and asymptotic tails of sums of independent
//!   Bernoulli variables with `p_j ~ c j^{-α}`;
//! - [`traffic`]: arrival paths, counting/early/late processes, conditional
//!   covariances and the stationary limit sampler;
//! - [`queue`]: workload recursions and the S/G/1 vs D/G/1 input statistic;
//! - [`stats`] and [`rng`]: summaries, Kolmogorov–Smirnov tests and
//!   reproducible per-replication random streams.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bernoulli_tail;
mod error;
mod math;
pub mod perturbation;
pub mod quad;
pub mod queue;
pub mod rng;
pub mod stats;
pub mod traffic;

pub use error::{Error, Result};
