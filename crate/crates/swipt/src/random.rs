//! Shared random draws for simulation code.

use crate::hermitian::C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Circular complex Gaussian sample with total variance `variance`
/// (each quadrature carries half).
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> C64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(scale * re, scale * im)
}
