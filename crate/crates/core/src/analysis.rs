//! Deterministic error analytics: the optimal truncation bound `E_N` and the
//! rate-optimality ratio of the 3-moment scheme.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::levy_measure::{mass_at_radius, side_moment, tail_mass, total_mass, SharedMeasure, Side};
use crate::mc::fmt_f64;
use crate::schemes::{build_three_moment, error_moment};

const BRACKET: (f64, f64) = (1e-12, 10.0);
const REL_TOL: f64 = 1e-12;

/// Infimum of `∫|x|⁴|dν − dν′|` over measures `ν′` with `ν′(ℝ) ≤ N`,
/// attained by keeping `{|x| > e}` and a fraction `μ` of `{|x| = e}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalTruncation {
    pub e_n: f64,
    pub mu_n: f64,
    pub value: f64,
    /// `N` is at least the total mass: nothing is discarded, `e = 0`.
    pub keeps_everything: bool,
}

pub fn optimal_truncation_error(nu: &dyn crate::levy_measure::LevyMeasure, n: f64) -> Result<OptimalTruncation> {
    if !(n > 0.0) {
        return domain(format!("intensity bound must be positive, got {n}"));
    }
    if n >= total_mass(nu) {
        return Ok(OptimalTruncation {
            e_n: 0.0,
            mu_n: 1.0,
            value: 0.0,
            keeps_everything: true,
        });
    }
    let tail = |r: f64| tail_mass(nu, r, Side::Both);

    // A jump of the tail at an atom radius can straddle N.
    let mut radii: Vec<f64> = nu.atoms().iter().map(|(x, _)| x.abs()).filter(|r| *r > 0.0).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    for &r in &radii {
        let above = tail(r)?;
        let at = mass_at_radius(nu, r);
        if above <= n && n <= above + at {
            let mu = ((n - above) / at).clamp(0.0, 1.0);
            let inner = side_moment(nu, 4, 0.0, r, Side::Both)? - at * r.powi(4);
            return Ok(OptimalTruncation {
                e_n: r,
                mu_n: mu,
                value: inner.max(0.0) + (1.0 - mu) * at * r.powi(4),
                keeps_everything: false,
            });
        }
    }

    let (mut lo, mut hi) = BRACKET;
    while tail(lo)? < n {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::Numerical("tail mass stays below N near zero".into()));
        }
    }
    while tail(hi)? > n {
        hi *= 10.0;
        if hi > 1e300 {
            return Err(Error::Numerical("tail mass stays above N".into()));
        }
    }
    while hi / lo - 1.0 > REL_TOL {
        let mid = (lo * hi).sqrt();
        if tail(mid)? > n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = (lo * hi).sqrt();
    Ok(OptimalTruncation {
        e_n: e,
        mu_n: 1.0,
        value: side_moment(nu, 4, 0.0, e, Side::Both)?,
        keeps_everything: false,
    })
}

/// `(3−α)(2/(2−α))^{4/α}`.
pub fn optimality_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return domain(format!("alpha must lie in (0, 2), got {alpha}"));
    }
    Ok((3.0 - alpha) * (2.0 / (2.0 - alpha)).powf(4.0 / alpha))
}

/// Limit of `e(λ_ε)/ε` for stable-like measures.
pub fn threshold_ratio_limit(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return domain(format!("alpha must lie in (0, 2), got {alpha}"));
    }
    Ok(((2.0 - alpha) / 2.0).powf(1.0 / alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub epsilon: f64,
    pub lambda_eps: f64,
    pub error_moment4: f64,
    pub e_n: f64,
    pub e_n_value: f64,
    pub ratio: f64,
}

/// `error_moment(3-moment scheme, 4) / E_{λ_ε}` per ε.
pub fn optimality_ratio(nu: &SharedMeasure, eps_grid: &[f64]) -> Result<Vec<RatioRow>> {
    if nu.stable_params().is_none() {
        return Err(Error::Unsupported("optimality ratio needs a stable-like measure".into()));
    }
    eps_grid
        .iter()
        .map(|&eps| {
            let s = build_three_moment(nu, eps)?;
            let em = error_moment(&s, 4)?;
            let opt = optimal_truncation_error(nu.as_ref(), s.lambda_eps)?;
            Ok(RatioRow {
                epsilon: eps,
                lambda_eps: s.lambda_eps,
                error_moment4: em,
                e_n: opt.e_n,
                e_n_value: opt.value,
                ratio: em / opt.value,
            })
        })
        .collect()
}

/// CSV `epsilon,lambda_eps,error_moment4,E_N,ratio`.
pub fn write_ratio_csv<W: Write>(rows: &[RatioRow], w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record(["epsilon", "lambda_eps", "error_moment4", "E_N", "ratio"]).map_err(io)?;
    for r in rows {
        wtr.write_record([
            fmt_f64(r.epsilon),
            fmt_f64(r.lambda_eps),
            fmt_f64(r.error_moment4),
            fmt_f64(r.e_n_value),
            fmt_f64(r.ratio),
        ])
        .map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}
