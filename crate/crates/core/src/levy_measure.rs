//! One-dimensional Lévy measures: the [`LevyMeasure`] abstraction, the
//! built-in truncated stable, CGMY and NIG measures, and tail / moment
//! functionals evaluated in closed form or by quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_from_zero, integrate_log, integrate_to_infinity, QuadOptions};
use crate::specfun::{bessel_k1_scaled, lower_gamma_tempered};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
    Both,
}

/// Small-jump profile: `∫_r^∞ ν ∼ c₊ r^{−α}`, `∫_{−∞}^{−r} ν ∼ c₋ r^{−α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl StableParams {
    pub fn new(alpha: f64, c_plus: f64, c_minus: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return domain(format!("stable index must lie in (0, 2), got {alpha}"));
        }
        if !(c_plus >= 0.0 && c_minus >= 0.0 && c_plus + c_minus > 0.0) {
            return domain(format!("need c+ >= 0, c- >= 0, c+ + c- > 0; got ({c_plus}, {c_minus})"));
        }
        Ok(Self {
            alpha,
            c_plus,
            c_minus,
        })
    }

    pub fn total(&self) -> f64 {
        self.c_plus + self.c_minus
    }

    pub fn rho(&self) -> f64 {
        self.c_plus / self.total()
    }
}

/// A one-dimensional Lévy measure with triplet `(0, ν, γ)`.
///
/// Implementors expose whatever they can in closed form; the free functions
/// in this module fall back to quadrature of [`LevyMeasure::density`].
/// Point masses listed by [`LevyMeasure::atoms`] are added on top of the
/// continuous part by those functions.
pub trait LevyMeasure: fmt::Debug + Send + Sync {
    /// Triplet drift `γ` (truncation function `1_{|x|≤1}`).
    fn gamma(&self) -> f64;

    /// Density of the continuous part, `None` if the measure has none.
    fn density(&self, _x: f64) -> Option<f64> {
        None
    }

    fn has_density(&self) -> bool {
        self.density(0.5).is_some()
    }

    /// Closed-form `ν((r,∞))` or `ν((−∞,−r))` of the continuous part.
    fn tail_closed(&self, _r: f64, _side: Side) -> Option<f64> {
        None
    }

    /// Closed-form `∫_{lo<|x|≤hi} |x|^k ν(dx)` on one side (`Plus` or `Minus`)
    /// of the continuous part. `lo` may be 0, `hi` may be infinite.
    fn side_moment_closed(&self, _k: i32, _lo: f64, _hi: f64, _side: Side) -> Option<f64> {
        None
    }

    /// Radius `r` with continuous one-sided tail mass `mass`, when invertible
    /// in closed form.
    fn tail_inverse_closed(&self, _mass: f64, _side: Side) -> Option<f64> {
        None
    }

    fn stable_params(&self) -> Option<StableParams> {
        None
    }

    /// No continuous mass beyond this radius.
    fn support_radius(&self) -> f64 {
        f64::INFINITY
    }

    /// Point masses `(location, mass)`.
    fn atoms(&self) -> &[(f64, f64)] {
        &[]
    }

    fn descriptor(&self) -> Option<MeasureSpec> {
        None
    }

    fn is_symmetric(&self) -> bool {
        false
    }
}

pub type SharedMeasure = Arc<dyn LevyMeasure>;

fn check_side(side: Side) -> Result<()> {
    if side == Side::Both {
        return domain("a single side (plus or minus) is required here");
    }
    Ok(())
}

fn on_side(x: f64, side: Side) -> bool {
    match side {
        Side::Plus => x > 0.0,
        Side::Minus => x < 0.0,
        Side::Both => x != 0.0,
    }
}

fn quad_opts() -> QuadOptions {
    // Side integrands are nonnegative, so a pure relative target is safe.
    QuadOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
    }
}

/// `∫_{lo<|x|≤hi} |x|^k ν(dx)` on one side, by quadrature of the density.
fn side_moment_by_quadrature(nu: &dyn LevyMeasure, k: i32, lo: f64, hi: f64, side: Side) -> Result<f64> {
    check_side(side)?;
    if nu.density(if side == Side::Plus { 0.5 } else { -0.5 }).is_none() {
        if !nu.atoms().is_empty() {
            return Ok(0.0);
        }
        return Err(Error::Unsupported(
            "measure has neither a closed form nor a density".into(),
        ));
    }
    let hi = hi.min(nu.support_radius());
    if !(hi > lo) {
        return Ok(0.0);
    }
    let sign = if side == Side::Plus { 1.0 } else { -1.0 };
    let g = |x: f64| {
        // Near the origin the density alone overflows; x^k·density does not
        // for any integrable moment, and the region below ~1e-150 carries no mass.
        let v = x.powi(k) * nu.density(sign * x).unwrap_or(0.0);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let opts = quad_opts();
    let mut total = 0.0;
    let mid = hi.min(1.0);
    if lo < mid {
        total += if lo == 0.0 {
            integrate_from_zero(g, mid, opts)?
        } else {
            integrate_log(g, lo, mid, opts)?
        };
    }
    if hi > 1.0 {
        let start = lo.max(1.0);
        total += if hi.is_infinite() {
            integrate_to_infinity(g, start, opts)?
        } else {
            integrate_log(g, start, hi, opts)?
        };
    }
    Ok(total)
}

fn atom_side_moment(nu: &dyn LevyMeasure, k: i32, lo: f64, hi: f64, side: Side) -> f64 {
    nu.atoms()
        .iter()
        .filter(|(x, _)| on_side(*x, side) && x.abs() > lo && x.abs() <= hi)
        .map(|(x, m)| m * x.abs().powi(k))
        .sum()
}

/// `∫_{lo<|x|≤hi} |x|^k ν(dx)` over one side, or both sides for `Side::Both`.
pub fn side_moment(nu: &dyn LevyMeasure, k: i32, lo: f64, hi: f64, side: Side) -> Result<f64> {
    side_moment_impl(nu, k, lo, hi, side, false)
}

/// Same as [`side_moment`] but ignores closed forms (quadrature oracle).
pub fn side_moment_quadrature(nu: &dyn LevyMeasure, k: i32, lo: f64, hi: f64, side: Side) -> Result<f64> {
    side_moment_impl(nu, k, lo, hi, side, true)
}

fn side_moment_impl(nu: &dyn LevyMeasure, k: i32, lo: f64, hi: f64, side: Side, force_quad: bool) -> Result<f64> {
    if !(lo >= 0.0) || hi.is_nan() {
        return domain(format!("invalid band ({lo}, {hi}]"));
    }
    if side == Side::Both {
        return Ok(side_moment_impl(nu, k, lo, hi, Side::Plus, force_quad)?
            + side_moment_impl(nu, k, lo, hi, Side::Minus, force_quad)?);
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let cont = match (force_quad, nu.side_moment_closed(k, lo, hi, side)) {
        (false, Some(v)) => v,
        _ => side_moment_by_quadrature(nu, k, lo, hi, side)?,
    };
    Ok(cont + atom_side_moment(nu, k, lo, hi, side))
}

/// Signed band moment `∫_{lo<|x|≤hi} x^k ν(dx)`.
pub fn band_moment(nu: &dyn LevyMeasure, k: i32, lo: f64, hi: f64) -> Result<f64> {
    let p = side_moment(nu, k, lo, hi, Side::Plus)?;
    let m = side_moment(nu, k, lo, hi, Side::Minus)?;
    Ok(if k % 2 == 0 { p + m } else { p - m })
}

/// Quadrature-only version of [`band_moment`].
pub fn band_moment_quadrature(nu: &dyn LevyMeasure, k: i32, lo: f64, hi: f64) -> Result<f64> {
    let p = side_moment_quadrature(nu, k, lo, hi, Side::Plus)?;
    let m = side_moment_quadrature(nu, k, lo, hi, Side::Minus)?;
    Ok(if k % 2 == 0 { p + m } else { p - m })
}

/// `ν((r,∞))`, `ν((−∞,−r))` or their sum.
pub fn tail_mass(nu: &dyn LevyMeasure, r: f64, side: Side) -> Result<f64> {
    tail_mass_impl(nu, r, side, false)
}

/// Quadrature-only version of [`tail_mass`].
pub fn tail_mass_quadrature(nu: &dyn LevyMeasure, r: f64, side: Side) -> Result<f64> {
    tail_mass_impl(nu, r, side, true)
}

fn tail_mass_impl(nu: &dyn LevyMeasure, r: f64, side: Side, force_quad: bool) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("tail radius must be positive, got {r}"));
    }
    if side == Side::Both {
        return Ok(tail_mass_impl(nu, r, Side::Plus, force_quad)? + tail_mass_impl(nu, r, Side::Minus, force_quad)?);
    }
    let cont = if r >= nu.support_radius() {
        0.0
    } else {
        match (force_quad, nu.tail_closed(r, side)) {
            (false, Some(v)) => v,
            _ => side_moment_by_quadrature(nu, 0, r, f64::INFINITY, side)?,
        }
    };
    Ok(cont + atom_side_moment(nu, 0, r, f64::INFINITY, side))
}

/// `∫_{|x|≤ε} x^k ν(dx)`.
pub fn partial_moment(nu: &dyn LevyMeasure, k: i32, eps: f64) -> Result<f64> {
    check_partial(k, eps)?;
    band_moment(nu, k, 0.0, eps)
}

/// Quadrature-only version of [`partial_moment`].
pub fn partial_moment_quadrature(nu: &dyn LevyMeasure, k: i32, eps: f64) -> Result<f64> {
    check_partial(k, eps)?;
    band_moment_quadrature(nu, k, 0.0, eps)
}

fn check_partial(k: i32, eps: f64) -> Result<()> {
    if k < 2 {
        return domain(format!("partial moments need k >= 2, got {k}"));
    }
    if !(eps > 0.0) {
        return domain(format!("truncation level must be positive, got {eps}"));
    }
    Ok(())
}

/// Point mass of ν on `{|x| = r}`.
pub fn mass_at_radius(nu: &dyn LevyMeasure, r: f64) -> f64 {
    nu.atoms().iter().filter(|(x, _)| x.abs() == r).map(|(_, m)| m).sum()
}

/// `ν(ℝ)`; infinite for infinite-activity measures.
pub fn total_mass(nu: &dyn LevyMeasure) -> f64 {
    if nu.has_density() {
        return f64::INFINITY;
    }
    nu.atoms().iter().map(|(_, m)| m).sum()
}

/// Mean of `Z₁`: `γ + ∫_{|x|>1} x ν(dx)`.
pub fn mean(nu: &dyn LevyMeasure) -> Result<f64> {
    Ok(nu.gamma() + band_moment(nu, 1, 1.0, f64::INFINITY)?)
}

/// Cumulant `κ_j` of `Z₁` for `j ≥ 1`.
pub fn cumulant(nu: &dyn LevyMeasure, j: i32) -> Result<f64> {
    match j {
        1 => mean(nu),
        j if j >= 2 => band_moment(nu, j, 0.0, f64::INFINITY),
        _ => domain(format!("cumulant order must be >= 1, got {j}")),
    }
}

/// Raw moments `E[(x0 + Z₁)^k]`, `k = 0..=kmax`, from the cumulants.
pub fn raw_moments_from_cumulants(x0: f64, cumulants: &[f64], kmax: usize) -> Vec<f64> {
    // κ of x0 + Z₁: shift the first cumulant.
    let mut kappa = cumulants.to_vec();
    if let Some(k1) = kappa.first_mut() {
        *k1 += x0;
    }
    let mut m = vec![1.0; kmax + 1];
    for n in 1..=kmax {
        let mut s = 0.0;
        for j in 1..=n {
            let kap = kappa.get(j - 1).copied().unwrap_or(0.0);
            s += binomial(n - 1, j - 1) * kap * m[n - j];
        }
        m[n] = s;
    }
    m
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// ---------------------------------------------------------------------------
// Built-in measures

/// Power-law density `α c±/|x|^{1+α}` restricted to `0 < |x| ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedStable {
    params: StableParams,
    gamma: f64,
}

impl TruncatedStable {
    pub fn new(alpha: f64, c_plus: f64, c_minus: f64) -> Result<Self> {
        Self::with_gamma(alpha, c_plus, c_minus, 0.0)
    }

    pub fn with_gamma(alpha: f64, c_plus: f64, c_minus: f64, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return domain("drift must be finite");
        }
        Ok(Self {
            params: StableParams::new(alpha, c_plus, c_minus)?,
            gamma,
        })
    }

    fn c(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.params.c_plus,
            _ => self.params.c_minus,
        }
    }
}

impl LevyMeasure for TruncatedStable {
    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn density(&self, x: f64) -> Option<f64> {
        let ax = x.abs();
        if x == 0.0 || ax > 1.0 {
            return Some(0.0);
        }
        let c = if x > 0.0 { self.params.c_plus } else { self.params.c_minus };
        Some(self.params.alpha * c * ax.powf(-1.0 - self.params.alpha))
    }

    fn tail_closed(&self, r: f64, side: Side) -> Option<f64> {
        if r >= 1.0 {
            return Some(0.0);
        }
        Some(self.c(side) * (r.powf(-self.params.alpha) - 1.0))
    }

    fn side_moment_closed(&self, k: i32, lo: f64, hi: f64, side: Side) -> Option<f64> {
        let hi = hi.min(1.0);
        if hi <= lo {
            return Some(0.0);
        }
        let a = self.params.alpha;
        let c = self.c(side);
        let p = k as f64 - a;
        if p.abs() < 1e-14 {
            if lo == 0.0 {
                return Some(f64::INFINITY);
            }
            return Some(a * c * (hi / lo).ln());
        }
        if lo == 0.0 {
            if p < 0.0 {
                return Some(f64::INFINITY);
            }
            return Some(a * c * hi.powf(p) / p);
        }
        // hi^p − lo^p = lo^p·expm1(p·ln(hi/lo)), accurate for thin bands.
        Some(a * c * lo.powf(p) * (p * (hi / lo).ln()).exp_m1() / p)
    }

    fn tail_inverse_closed(&self, mass: f64, side: Side) -> Option<f64> {
        let c = self.c(side);
        if c == 0.0 {
            return None;
        }
        Some((mass / c + 1.0).powf(-1.0 / self.params.alpha))
    }

    fn stable_params(&self) -> Option<StableParams> {
        Some(self.params)
    }

    fn support_radius(&self) -> f64 {
        1.0
    }

    fn descriptor(&self) -> Option<MeasureSpec> {
        Some(MeasureSpec::TruncatedStable {
            alpha: self.params.alpha,
            c_plus: self.params.c_plus,
            c_minus: self.params.c_minus,
            gamma: Some(self.gamma),
        })
    }

    fn is_symmetric(&self) -> bool {
        self.params.c_plus == self.params.c_minus
    }
}

/// Tempered stable (CGMY) density `C e^{−M x}/x^{1+Y}` for `x > 0` and
/// `C e^{−G|x|}/|x|^{1+Y}` for `x < 0`, with `Y ∈ (0, 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cgmy {
    c: f64,
    g: f64,
    m: f64,
    y: f64,
    gamma: f64,
}

impl Cgmy {
    /// Drift chosen so that `E[Z₁] = 0`.
    pub fn new(c: f64, g: f64, m: f64, y: f64) -> Result<Self> {
        let mut me = Self::with_gamma(c, g, m, y, 0.0)?;
        me.gamma = -band_moment(&me, 1, 1.0, f64::INFINITY)?;
        Ok(me)
    }

    pub fn with_gamma(c: f64, g: f64, m: f64, y: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && g > 0.0 && m > 0.0) {
            return domain(format!("CGMY needs C, G, M > 0; got ({c}, {g}, {m})"));
        }
        if !(y > 0.0 && y < 2.0) {
            return domain(format!("CGMY index Y must lie in (0, 2), got {y}"));
        }
        if !gamma.is_finite() {
            return domain("drift must be finite");
        }
        Ok(Self { c, g, m, y, gamma })
    }

    fn rate(&self, side: Side) -> f64 {
        if side == Side::Plus {
            self.m
        } else {
            self.g
        }
    }
}

impl LevyMeasure for Cgmy {
    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn density(&self, x: f64) -> Option<f64> {
        if x == 0.0 {
            return Some(0.0);
        }
        let ax = x.abs();
        let rate = if x > 0.0 { self.m } else { self.g };
        Some(self.c * (-rate * ax - (1.0 + self.y) * ax.ln()).exp())
    }

    fn side_moment_closed(&self, k: i32, lo: f64, hi: f64, side: Side) -> Option<f64> {
        // Only the near-zero pieces `[0, hi]`, `hi ≤ 1`, have a stable series.
        if lo != 0.0 || hi > 1.0 {
            return None;
        }
        let s = k as f64 - self.y;
        if s <= 0.0 {
            return Some(f64::INFINITY);
        }
        Some(self.c * lower_gamma_tempered(s, self.rate(side), hi))
    }

    fn stable_params(&self) -> Option<StableParams> {
        Some(StableParams {
            alpha: self.y,
            c_plus: self.c / self.y,
            c_minus: self.c / self.y,
        })
    }

    fn descriptor(&self) -> Option<MeasureSpec> {
        Some(MeasureSpec::Cgmy {
            c: self.c,
            g: self.g,
            m: self.m,
            y: self.y,
            gamma: Some(self.gamma),
        })
    }

    fn is_symmetric(&self) -> bool {
        self.g == self.m
    }
}

/// Normal inverse Gaussian parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigParams {
    pub alpha_nig: f64,
    pub beta: f64,
    pub delta: f64,
    /// Drift of the subordinated representation, chosen so `E[Z_t] = 0`.
    pub mu_drift: f64,
}

impl NigParams {
    pub fn new(alpha_nig: f64, beta: f64, delta: f64) -> Result<Self> {
        if !(alpha_nig > 0.0) || !(beta.abs() < alpha_nig) || !(delta > 0.0) {
            return domain(format!(
                "NIG needs alpha > 0, |beta| < alpha, delta > 0; got ({alpha_nig}, {beta}, {delta})"
            ));
        }
        let mu_drift = -delta * beta / (alpha_nig * alpha_nig - beta * beta).sqrt();
        Ok(Self {
            alpha_nig,
            beta,
            delta,
            mu_drift,
        })
    }

    /// Subordinated Brownian motion parametrisation `(σ, θ, κ)`:
    /// `β = θ/σ²`, `δ = σ/√κ`, `α = √(β² + 1/(σ²κ))`.
    pub fn from_subordinated(sigma: f64, theta: f64, kappa: f64) -> Result<Self> {
        if !(sigma > 0.0 && kappa > 0.0) || !theta.is_finite() {
            return domain(format!("need sigma > 0, kappa > 0; got ({sigma}, {theta}, {kappa})"));
        }
        let beta = theta / (sigma * sigma);
        let delta = sigma / kappa.sqrt();
        let alpha = (beta * beta + 1.0 / (sigma * sigma * kappa)).sqrt();
        Self::new(alpha, beta, delta)
    }

    fn root(&self) -> f64 {
        (self.alpha_nig * self.alpha_nig - self.beta * self.beta).sqrt()
    }

    pub fn variance(&self, t: f64) -> f64 {
        self.delta * t * self.alpha_nig * self.alpha_nig / self.root().powi(3)
    }

    /// Mean and shape of the inverse Gaussian subordinator over horizon `dt`.
    pub fn subordinator(&self, dt: f64) -> (f64, f64) {
        (self.delta * dt / self.root(), self.delta * self.delta * dt * dt)
    }
}

/// NIG Lévy density `δα/π · e^{βx} K₁(α|x|)/|x|`.
pub fn nig_density(p: &NigParams, x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return domain(format!("NIG density undefined at x = {x}"));
    }
    let ax = x.abs();
    let z = p.alpha_nig * ax;
    let k1s = bessel_k1_scaled(z)?;
    Ok(p.delta * p.alpha_nig / PI * k1s * (p.beta * x - z).exp() / ax)
}

/// Characteristic function `E[e^{iuZ_t}]` of the NIG process with density
/// [`nig_density`] and drift `mu_drift`:
/// `exp{iuμt − δt(√(α² − (β+iu)²) − √(α² − β²))}`.
pub fn nig_char_fn(p: &NigParams, t: f64, u: f64) -> Complex64 {
    let a2 = Complex64::new(p.alpha_nig * p.alpha_nig, 0.0);
    let b = Complex64::new(p.beta, u);
    let expo = Complex64::new(0.0, u * p.mu_drift * t) - p.delta * t * ((a2 - b * b).sqrt() - p.root());
    expo.exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nig {
    params: NigParams,
    gamma: f64,
}

impl Nig {
    pub fn new(params: NigParams) -> Result<Self> {
        let mut me = Self { params, gamma: 0.0 };
        me.gamma = -band_moment(&me, 1, 1.0, f64::INFINITY)?;
        Ok(me)
    }

    pub fn params(&self) -> &NigParams {
        &self.params
    }
}

impl LevyMeasure for Nig {
    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn density(&self, x: f64) -> Option<f64> {
        if x == 0.0 {
            return Some(0.0);
        }
        nig_density(&self.params, x).ok()
    }

    fn stable_params(&self) -> Option<StableParams> {
        let c = self.params.delta / PI;
        Some(StableParams {
            alpha: 1.0,
            c_plus: c,
            c_minus: c,
        })
    }

    fn descriptor(&self) -> Option<MeasureSpec> {
        Some(MeasureSpec::Nig {
            alpha: self.params.alpha_nig,
            beta: self.params.beta,
            delta: self.params.delta,
        })
    }

    fn is_symmetric(&self) -> bool {
        self.params.beta == 0.0
    }
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-assembled measure: optional density plus point masses.
#[derive(Clone)]
pub struct CustomMeasure {
    pub density: Option<DensityFn>,
    pub atoms: Vec<(f64, f64)>,
    pub gamma: f64,
    pub stable: Option<StableParams>,
    pub support_radius: f64,
}

impl CustomMeasure {
    pub fn atoms_only(atoms: Vec<(f64, f64)>, gamma: f64) -> Self {
        Self {
            density: None,
            atoms,
            gamma,
            stable: None,
            support_radius: 0.0,
        }
    }
}

impl fmt::Debug for CustomMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMeasure")
            .field("has_density", &self.density.is_some())
            .field("atoms", &self.atoms)
            .field("gamma", &self.gamma)
            .field("stable", &self.stable)
            .finish()
    }
}

impl LevyMeasure for CustomMeasure {
    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn density(&self, x: f64) -> Option<f64> {
        self.density.as_ref().map(|d| d(x))
    }

    fn stable_params(&self) -> Option<StableParams> {
        self.stable
    }

    fn support_radius(&self) -> f64 {
        self.support_radius
    }

    fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

// ---------------------------------------------------------------------------
// JSON descriptors

/// JSON descriptor of a built-in measure. `gamma` overrides the default
/// drift (0 for truncated stable, zero-mean for CGMY and NIG).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    TruncatedStable {
        alpha: f64,
        c_plus: f64,
        c_minus: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    Cgmy {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "G")]
        g: f64,
        #[serde(rename = "M")]
        m: f64,
        #[serde(rename = "Y")]
        y: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    Nig {
        alpha: f64,
        beta: f64,
        delta: f64,
    },
    /// NIG given by its subordinated Brownian motion parameters.
    NigSubordinated {
        sigma: f64,
        theta: f64,
        kappa: f64,
    },
}

impl MeasureSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<SharedMeasure> {
        Ok(match *self {
            MeasureSpec::TruncatedStable {
                alpha,
                c_plus,
                c_minus,
                gamma,
            } => Arc::new(TruncatedStable::with_gamma(alpha, c_plus, c_minus, gamma.unwrap_or(0.0))?),
            MeasureSpec::Cgmy { c, g, m, y, gamma } => match gamma {
                Some(gm) => Arc::new(Cgmy::with_gamma(c, g, m, y, gm)?),
                None => Arc::new(Cgmy::new(c, g, m, y)?),
            },
            MeasureSpec::Nig { alpha, beta, delta } => Arc::new(Nig::new(NigParams::new(alpha, beta, delta)?)?),
            MeasureSpec::NigSubordinated { sigma, theta, kappa } => {
                Arc::new(Nig::new(NigParams::from_subordinated(sigma, theta, kappa)?)?)
            }
        })
    }

    /// NIG parameters, when the descriptor names an NIG measure.
    pub fn nig_params(&self) -> Option<Result<NigParams>> {
        match *self {
            MeasureSpec::Nig { alpha, beta, delta } => Some(NigParams::new(alpha, beta, delta)),
            MeasureSpec::NigSubordinated { sigma, theta, kappa } => {
                Some(NigParams::from_subordinated(sigma, theta, kappa))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn truncated_stable_tail_example() {
        let nu = TruncatedStable::new(1.0, 1.0, 1.0).unwrap();
        assert!(rel(tail_mass(&nu, 0.1, Side::Both).unwrap(), 18.0) < 1e-14);
        assert!(rel(tail_mass_quadrature(&nu, 0.1, Side::Both).unwrap(), 18.0) < 1e-10);
        assert_eq!(tail_mass(&nu, 1.0, Side::Both).unwrap(), 0.0);
        assert_eq!(tail_mass(&nu, 2.5, Side::Plus).unwrap(), 0.0);
    }

    #[test]
    fn partial_moment_example() {
        let nu = TruncatedStable::new(1.0, 1.0, 1.0).unwrap();
        assert!(rel(partial_moment(&nu, 2, 0.1).unwrap(), 0.2) < 1e-14);
        assert!(rel(partial_moment_quadrature(&nu, 2, 0.1).unwrap(), 0.2) < 1e-10);
        assert_eq!(partial_moment(&nu, 3, 0.1).unwrap(), 0.0);
        assert!(matches!(partial_moment(&nu, 1, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let nu = TruncatedStable::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(tail_mass(&nu, 0.0, Side::Both), Err(Error::Domain(_))));
        assert!(tail_mass(&nu, -1.0, Side::Plus).is_err());
    }

    #[test]
    fn measure_without_density_or_closed_form_is_unsupported() {
        #[derive(Debug)]
        struct Opaque;
        impl LevyMeasure for Opaque {
            fn gamma(&self) -> f64 {
                0.0
            }
        }
        assert!(matches!(tail_mass(&Opaque, 0.1, Side::Plus), Err(Error::Unsupported(_))));
    }

    #[test]
    fn nig_density_examples() {
        let p = NigParams::new(1.0, 0.0, 1.0).unwrap();
        let v = nig_density(&p, 1.0).unwrap();
        assert!(rel(v, 0.6019072301972346 / PI) < 1e-13);
        assert!(rel(v, 0.191594) < 1e-5);
        assert!(matches!(nig_density(&p, 0.0), Err(Error::Domain(_))));
        let q = NigParams::new(2.0, 0.7, 1.3).unwrap();
        let x = 1e-7;
        assert!(rel(x * x * nig_density(&q, x).unwrap(), q.delta / PI) < 1e-5);
    }

    #[test]
    fn nig_drift_and_variance() {
        let p = NigParams::new(2.0, 0.5, 1.5).unwrap();
        let nu = Nig::new(p).unwrap();
        // Mean of the measure-side representation is zero by construction.
        assert!(mean(&nu).unwrap().abs() < 1e-12);
        // Second cumulant equals the closed-form variance.
        assert!(rel(cumulant(&nu, 2).unwrap(), p.variance(1.0)) < 1e-9);
    }

    #[test]
    fn subordinated_mapping() {
        let p = NigParams::from_subordinated(0.5, 0.4, 0.6).unwrap();
        assert!((p.beta - 1.6).abs() < 1e-15);
        assert!((p.delta - 0.5 / 0.6f64.sqrt()).abs() < 1e-15);
        assert!((p.alpha_nig - (2.56 + 1.0 / 0.15f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn raw_moments_of_gaussian_cumulants() {
        let m = raw_moments_from_cumulants(0.0, &[1.0, 2.0], 4);
        // N(1, 2): E X^2 = 3, E X^3 = 1 + 3·2 = 7, E X^4 = 1 + 6·2 + 3·4 = 25.
        assert_eq!(m, vec![1.0, 1.0, 3.0, 7.0, 25.0]);
    }

    #[test]
    fn descriptor_roundtrip_and_unknown_fields() {
        let json = r#"{"type":"truncated_stable","alpha":1.0,"c_plus":1.0,"c_minus":1.0}"#;
        let spec: MeasureSpec = serde_json::from_str(json).unwrap();
        let nu = spec.build().unwrap();
        assert_eq!(nu.stable_params().unwrap().alpha, 1.0);
        let cgmy: MeasureSpec = serde_json::from_str(r#"{"type":"cgmy","C":1.0,"G":2.0,"M":3.0,"Y":0.5}"#).unwrap();
        assert!(cgmy.build().is_ok());
        let bad = r#"{"type":"nig","alpha":1.0,"beta":0.0,"delta":1.0,"extra":2}"#;
        assert!(serde_json::from_str::<MeasureSpec>(bad).is_err());
        let back: MeasureSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn custom_atoms_contribute() {
        let nu = CustomMeasure::atoms_only(vec![(0.5, 2.0), (-0.2, 1.0)], 0.0);
        assert_eq!(tail_mass(&nu, 0.3, Side::Both).unwrap(), 2.0);
        assert_eq!(tail_mass(&nu, 0.1, Side::Minus).unwrap(), 1.0);
        assert!((partial_moment(&nu, 3, 1.0).unwrap() - (2.0 * 0.125 - 0.008)).abs() < 1e-15);
        assert_eq!(total_mass(&nu), 3.0);
        assert_eq!(mass_at_radius(&nu, 0.5), 2.0);
    }
}
