//! Special functions and small dense/tridiagonal numerics.

mod bessel;
mod eigen;
mod sum;

pub use bessel::{bessel_k, bessel_k0, bessel_k1, bessel_k1_scaled, BesselOrder};
pub use eigen::{eigen_tridiag, TridiagEigen, TridiagonalSym};
pub use sum::{compensated_sum, dot2, log_add_exp, log_sum_exp, two_prod, two_sum, CompensatedSum};

/// `∫₀^x t^{s−1} e^{−m t} dt` for `s > 0`, `m ≥ 0`, `x > 0`, by the
/// confluent series `x^s e^{−mx} Σ (mx)^n / (s(s+1)…(s+n))`.
///
/// All terms are positive so the sum is stable; intended for `m x` of
/// moderate size (truncation levels are at most 1).
pub fn lower_gamma_tempered(s: f64, m: f64, x: f64) -> f64 {
    debug_assert!(s > 0.0 && m >= 0.0 && x > 0.0);
    let z = m * x;
    let mut term = 1.0 / s;
    let mut acc = CompensatedSum::new();
    acc.add(term);
    for n in 1..10_000 {
        term *= z / (s + n as f64);
        acc.add(term);
        if term < 1e-17 * acc.value() {
            break;
        }
    }
    (s * x.ln() - z).exp() * acc.value()
}
