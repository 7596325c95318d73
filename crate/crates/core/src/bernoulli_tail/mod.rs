//! Tails of `Z = Σ_j I_j` for independent `I_j ~ Bernoulli(p_j)` with
//! `p_j ~ c j^-α`, `α > 1`.
//!
//! Exact values come from a tilted dynamic program ([`exact_tail`]); the
//! asymptotic forms and the constants `r*`, `η*`, `γ` they need live in
//! [`constants`] and [`asymptotics`].
//!
//! Convention: everything is stated for `P(Z ≥ n)`. A strict tail
//! `P(Z > z)` is `P(Z ≥ ⌊z⌋ + 1)`.

pub mod asymptotics;
pub mod constants;
mod exact;
mod seq;

pub use asymptotics::{asymp_tail_general, asymp_tail_power, log_tail_slope};
pub use constants::{eta_star, gamma_const, solve_r_star, TailConstants};
pub use exact::{
    chernoff_bound, chernoff_bound_at_tilt, chernoff_bound_default, exact_pmf, exact_tail, pmf_capped,
    psi_and_derivatives, Psi, TailProb,
};
pub use seq::{ParamSeq, PowerLaw};
