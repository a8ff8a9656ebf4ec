//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Power series for `x <= 2`, Steed's continued fraction (Thompson–Barnett
//! CF2) for `x > 2`. Both branches are accurate to a few ulps.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 500;
const SERIES_CUTOFF: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    let (k0, k1) = k01(x)?;
    Ok(match order {
        BesselOrder::Zero => k0,
        BesselOrder::One => k1,
    })
}

pub fn bessel_k0(x: f64) -> Result<f64> {
    bessel_k(BesselOrder::Zero, x)
}

pub fn bessel_k1(x: f64) -> Result<f64> {
    bessel_k(BesselOrder::One, x)
}

/// `e^x K₁(x)`, finite for every `x > 0`.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x <= SERIES_CUTOFF {
        let (_, k1) = k01_series(x);
        Ok(k1 * x.exp())
    } else {
        Ok(k01_cf2_scaled(x)?.1)
    }
}

fn check_arg(x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        return domain(format!("bessel K requires x > 0, got {x}"));
    }
    Ok(())
}

fn k01(x: f64) -> Result<(f64, f64)> {
    check_arg(x)?;
    if x <= SERIES_CUTOFF {
        Ok(k01_series(x))
    } else {
        let (k0, k1) = k01_cf2_scaled(x)?;
        let e = (-x).exp();
        Ok((k0 * e, k1 * e))
    }
}

/// Ascending series around 0 (logarithmic case of the Neumann expansion).
fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // term_k = q^k / (k!)^2, harmonic H_k, psi(k+1) = H_k - gamma.
    let mut i0 = 0.0;
    let mut k0_tail = 0.0;
    let mut i1_tail = 0.0;
    let mut k1_tail = 0.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term *= q / (kf * kf);
            harmonic += 1.0 / kf;
        }
        let term1 = term / (kf + 1.0); // q^k / (k! (k+1)!)
        i0 += term;
        k0_tail += harmonic * term;
        i1_tail += term1;
        let psi_sum = 2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
        k1_tail += psi_sum * term1;
        if term < 1e-18 * i0 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_tail;
    let i1 = 0.5 * x * i1_tail;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_tail;
    (k0, k1)
}

/// Steed's algorithm for `U(ν+1/2, 2ν+1, 2x)` ratios at `ν = 0`; returns
/// `(e^x K₀(x), e^x K₁(x))`.
fn k01_cf2_scaled(x: f64) -> Result<(f64, f64)> {
    debug_assert!(x > 1.0);
    let v = 0.0_f64;
    let mut a = v.mul_add(v, -0.25);
    let mut b = 2.0 * (x + 1.0);
    let mut d = b.recip();

    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut q = -a;
    let mut c = -a;
    let mut s = q.mul_add(delta, 1.0);

    for k in 2..MAX_ITER {
        let kf = k as f64;
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = a.mul_add(d, b).recip();
        delta *= b.mul_add(d, -1.0);
        f += delta;

        let t = (b - 2.0).mul_add(-cur, prev) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        s += q * delta;

        if (q * delta).abs() < s.abs() * f64::EPSILON / 2.0 {
            let k0 = (PI / (2.0 * x)).sqrt() / s;
            let k1 = k0 * v.mul_add(v, -0.25).mul_add(f, 0.5 + v + x) / x;
            return Ok((k0, k1));
        }
    }
    Err(Error::Numerical(format!("bessel K continued fraction did not converge at x = {x}")))
}
