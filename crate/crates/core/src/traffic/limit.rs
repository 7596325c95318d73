use rand_chacha::rand_core::RngCore;

use super::generate_path;
use crate::perturbation::PerturbationModel;
use crate::rng::uniform;
use crate::{Error, Result};

/// One draw of `−s + I(U ≤ s) + (E′(s) − L′(s)) − (E(0) − L(0))`, where given
/// `U` the pair `(E′(s), L′(s))` is an independent copy of `(E(s), L(s))`.
/// The copies come from two independent paths sharing `U`.
pub fn sample_limit_rv<R: RngCore + ?Sized>(model: &PerturbationModel, s: f64, rng: &mut R, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidParameter("s must lie in [0, 1)"));
    }
    let u = uniform(rng);
    let a = generate_path(model, -1.0, 1.0, Some(u), rng, eps)?;
    let b = generate_path(model, -1.0, 1.0, Some(u), rng, eps)?;
    let (es, ls) = a.early_late(s)?;
    let (e0, l0) = b.early_late(0.0)?;
    let jump = if u <= s { 1.0 } else { 0.0 };
    Ok(-s + jump + es as f64 - ls as f64 - e0 as f64 + l0 as f64)
}

/// `N(n + s) − (n + s)` on a fresh path.
pub fn direct_centered_count<R: RngCore + ?Sized>(
    model: &PerturbationModel,
    n: u64,
    s: f64,
    rng: &mut R,
    eps: f64,
) -> Result<f64> {
    let t = n as f64 + s;
    let p = generate_path(model, 0.0, t, None, rng, eps)?;
    Ok(p.count(t)? as f64 - t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;

    #[test]
    fn degenerate_limit() {
        let f = StreamFactory::new(5, "limit");
        let (mut lo, mut hi) = (0i32, 0i32);
        for r in 0..2000 {
            let mut rng = f.stream(r);
            let z = sample_limit_rv(&PerturbationModel::Degenerate, 0.0, &mut rng, 1e-10).unwrap();
            assert_eq!(z, 0.0);
            let z = sample_limit_rv(&PerturbationModel::Degenerate, 0.5, &mut rng, 1e-10).unwrap();
            if z == -0.5 {
                lo += 1;
            } else {
                assert_eq!(z, 0.5);
                hi += 1;
            }
        }
        assert!((lo - hi).abs() < 200);
    }
}
