//! Globally adaptive Gauss–Legendre quadrature with the substitutions used
//! for Lévy-measure integrals (singular at 0, unbounded support).

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::CompensatedSum;

const ORDER: usize = 15;
const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
        }
    }
}

impl QuadOptions {
    /// Default relative tolerance with the absolute floor scaled by `scale`,
    /// for integrals whose natural size is far below one.
    pub fn scaled(scale: f64) -> Self {
        let d = Self::default();
        Self {
            abs_tol: d.abs_tol * scale.abs(),
            ..d
        }
    }
}

fn gauss_legendre() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut x = [0.0; ORDER];
        let mut w = [0.0; ORDER];
        for i in 0..n {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = CompensatedSum::new();
    for (xi, wi) in x.iter().zip(w) {
        s.add(wi * f(c + h * xi));
    }
    h * s.value()
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let m = 0.5 * (a + b);
    let whole = rule(f, a, b);
    let halves = rule(f, a, m) + rule(f, m, b);
    Piece {
        a,
        b,
        value: halves,
        err: (whole - halves).abs(),
    }
}

/// `∫_a^b f` on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("finite bounds required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, opts).map(|v| -v);
    }
    let mut heap = BinaryHeap::new();
    let first = piece(&f, a, b);
    let mut total = first.value;
    let mut err = first.err;
    heap.push(first);
    loop {
        if !total.is_finite() {
            return Err(Error::Numerical("non-finite integrand value".into()));
        }
        let target = (opts.rel_tol * total.abs()).max(opts.abs_tol);
        if err <= target {
            let mut s = CompensatedSum::new();
            s.extend(heap.iter().map(|p| p.value));
            return Ok(s.value());
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Numerical(format!(
                "quadrature did not reach tolerance: estimate {total:e}, error {err:e}"
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Interval exhausted at machine resolution; accept what we have.
            err -= worst.err;
            heap.push(Piece { err: 0.0, ..worst });
            continue;
        }
        let left = piece(&f, worst.a, m);
        let right = piece(&f, m, worst.b);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        if heap.len() % 256 == 0 {
            err = heap.iter().map(|p| p.err).sum::<f64>() + left.err + right.err;
        }
        heap.push(left);
        heap.push(right);
    }
}

/// `∫_0^ε f` for integrands with an integrable singularity at 0, via
/// `x = ε e^{−s}` and `s = t/(1−t)`.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, eps: f64, opts: QuadOptions) -> Result<f64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = t / (1.0 - t);
        let x = eps * (-s).exp();
        if x == 0.0 {
            return 0.0;
        }
        f(x) * x / ((1.0 - t) * (1.0 - t))
    };
    integrate(g, 0.0, 1.0, opts)
}

/// `∫_m^∞ f` via `x = m + t/(1−t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, m: f64, opts: QuadOptions) -> Result<f64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let x = m + t / u;
        if !x.is_finite() {
            return 0.0;
        }
        let v = f(x) / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, opts)
}

/// `∫_a^b f` for `0 < a < b` via `x = e^u`, suited to power-law integrands
/// spanning several decades.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("log substitution requires positive bounds, got [{a}, {b}]")));
    }
    integrate(
        |u: f64| {
            let x = u.exp();
            f(x) * x
        },
        a.ln(),
        b.ln(),
        opts,
    )
}
