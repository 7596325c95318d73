//! Exact sampling of the rare far-away indices that still reach a window.
//!
//! Index `k = 1, 2, …` (counted away from the window) is a "hit" with
//! probability `q(k)`, independently, where `q` is non-increasing and
//! summable. Hits are generated by geometric skipping at the current
//! bound `q̄ = q(k_start)` followed by thinning with `q(k)/q̄`; after every
//! candidate the bound is refreshed. Each index is examined in law exactly
//! once, so the output has the exact joint distribution, and because the
//! skip lengths grow with `1/q` the loop stops after a few dozen steps.

use rand_chacha::rand_core::RngCore;

use crate::math::{floor, ln, ln_1p};
use crate::rng::uniform;

/// Offsets beyond this are not examined; callers bound the omitted mass.
pub(crate) const MAX_OFFSET: f64 = 1.329_227_995_784_916e36; // 2^120

pub(crate) fn sample_hits<R, Q, H>(rng: &mut R, q: Q, mut on_hit: H)
where
    R: RngCore + ?Sized,
    Q: Fn(f64) -> f64,
    H: FnMut(f64, &mut R),
{
    let mut k = 1.0;
    while k <= MAX_OFFSET {
        let qbar = q(k);
        if !(qbar > 0.0) {
            break;
        }
        let skip = if qbar >= 1.0 { 0.0 } else { floor(ln(uniform(rng)) / ln_1p(-qbar)) };
        k += skip;
        if k > MAX_OFFSET {
            break;
        }
        if uniform(rng) * qbar < q(k) {
            on_hit(k, rng);
        }
        k += 1.0;
    }
}
