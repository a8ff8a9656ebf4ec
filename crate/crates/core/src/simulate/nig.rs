use rand::Rng;
use rand_distr::{Open01, StandardNormal};

use crate::levy_measure::NigParams;

/// Inverse Gaussian variate (Michael–Schucany–Haas).
///
/// The smaller root `μ + μ²y/(2λ) − μ/(2λ)√(4μλy + μ²y²)` is evaluated as
/// `μ·4μλy / (μy + √(μ²y² + 4μλy))²`, which has no cancellation when
/// `μy ≫ λ` (the short-horizon NIG regime).
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    let y = n * n;
    let my = mean * y;
    let root = (my * my + 4.0 * mean * shape * y).sqrt();
    let denom = my + root;
    let x = if denom > 0.0 {
        mean * 4.0 * mean * shape * y / (denom * denom)
    } else {
        mean
    };
    let u: f64 = rng.sample(Open01);
    if x > 0.0 && u <= mean / (mean + x) {
        x
    } else if x > 0.0 {
        mean * mean / x
    } else {
        // y underflowed to 0: both roots collapse onto the mean.
        mean
    }
}

/// NIG increment over `dt`: `μ dt + β I + √I · N`, `I ~ IG(δ dt/√(α²−β²), δ² dt²)`.
pub fn sample_nig_increment<R: Rng + ?Sized>(p: &NigParams, dt: f64, rng: &mut R) -> f64 {
    let (mean, shape) = p.subordinator(dt);
    let i = sample_inverse_gaussian(mean, shape, rng);
    let n: f64 = rng.sample(StandardNormal);
    p.mu_drift * dt + p.beta * i + i.sqrt() * n
}
