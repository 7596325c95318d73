use crate::perturbation::PerturbationModel;
use crate::{Error, Result};

/// `Cov(ΔN(1), ΔN(n) | U = u) = −Σ_i P(i + ξ + u ∈ (0,1]) P(i + ξ + u ∈ (n−1, n])`,
/// summed over `|i| ≤ I` with `I` doubled until the omitted part is below `eps`.
///
/// Beyond `I` the first factors sum to a single tail probability, which
/// gives the bound `F(−I−1−u)·F(n−I−2−u) + S(I+1−u)·S(n+I−u)`.
pub fn conditional_cov(model: &PerturbationModel, u: f64, n: u64, eps: f64) -> Result<f64> {
    model.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2"));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter("u must lie in (0, 1)"));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive"));
    }
    let nf = n as f64;
    let bound = |big: f64| {
        model.cdf(-big - 1.0 - u) * model.cdf(nf - big - 2.0 - u)
            + model.survival(big + 1.0 - u) * model.survival(nf + big - u)
    };
    let mut big = nf + 3.0;
    while bound(big) > eps {
        big *= 2.0;
        if big > 1e12 {
            return Err(Error::NoFiniteTruncation { eps, achieved: bound(big) });
        }
    }
    let big = big as i64;
    let mut sum = 0.0;
    for i in -big..=big {
        let x = i as f64 + u;
        let a = model.interval_prob(-x, 1.0 - x)?;
        if a == 0.0 {
            continue;
        }
        sum += a * model.interval_prob(nf - 1.0 - x, nf - x)?;
    }
    Ok(-sum)
}
