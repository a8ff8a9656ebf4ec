use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Open01};

use crate::error::{Error, Result};
use crate::levy_measure::{side_moment, tail_mass, SharedMeasure, Side};
use crate::schemes::FiniteActivityScheme;

pub const TAIL_KNOTS: usize = 4096;
pub const TAIL_CUTOFF: f64 = 1e-12;

/// Sampler for `ν` restricted to `{x > ε}` or `{x < −ε}`, returning `|x|`.
#[derive(Debug, Clone)]
pub enum TailSampler {
    Closed {
        measure: SharedMeasure,
        side: Side,
        mass: f64,
    },
    Table(TailTable),
}

/// Monotone cubic Hermite inverse of `log r ↦ log ν(|x| > r)`.
#[derive(Debug, Clone)]
pub struct TailTable {
    /// `log G` at the knots, ascending.
    log_g: Vec<f64>,
    /// `log r` at the knots (descending).
    log_r: Vec<f64>,
    /// `d log r / d log G` at the knots, limited.
    slope: Vec<f64>,
}

impl TailSampler {
    pub fn new(measure: &SharedMeasure, eps: f64, side: Side) -> Result<Self> {
        let nu = measure.as_ref();
        let mass = tail_mass(nu, eps, side)?;
        if !(mass > 0.0) {
            return Err(Error::Domain("empty tail has nothing to sample".into()));
        }
        if nu.tail_inverse_closed(mass, side).is_some() {
            return Ok(TailSampler::Closed {
                measure: measure.clone(),
                side,
                mass,
            });
        }
        if !nu.atoms().is_empty() || !nu.has_density() {
            return Err(Error::Unsupported(
                "tail sampling needs a density or a closed-form inverse tail".into(),
            ));
        }
        Ok(TailSampler::Table(TailTable::build(measure, eps, side, mass)?))
    }

    /// Draw `|x|` given `U ∈ (0,1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            TailSampler::Closed { measure, side, mass } => measure
                .tail_inverse_closed(u * mass, *side)
                .expect("closed-form inverse checked at construction"),
            TailSampler::Table(t) => t.quantile(u),
        }
    }
}

impl TailTable {
    fn build(measure: &SharedMeasure, eps: f64, side: Side, mass: f64) -> Result<Self> {
        let nu = measure.as_ref();
        let sign = if side == Side::Plus { 1.0 } else { -1.0 };
        let target = TAIL_CUTOFF * mass;
        let g = |r: f64| tail_mass(nu, r, side);

        // Bracket the cutoff radius, then bisect in log r.
        let mut lo = eps;
        let mut hi = if nu.support_radius().is_finite() {
            nu.support_radius()
        } else {
            let mut r = eps.max(1.0) * 2.0;
            while g(r)? > target {
                lo = r;
                r *= 2.0;
                if r > 1e12 {
                    return Err(Error::Numerical("tail does not decay".into()));
                }
            }
            r
        };
        for _ in 0..80 {
            let mid = (lo * hi).sqrt();
            if g(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-12 {
                break;
            }
        }
        let r_max = lo;

        let n = TAIL_KNOTS;
        let (x0, x1) = (eps.ln(), r_max.ln());
        let log_r_desc: Vec<f64> = (0..n).map(|j| x0 + (x1 - x0) * j as f64 / (n - 1) as f64).collect();
        let r: Vec<f64> = log_r_desc.iter().map(|x| x.exp()).collect();
        let mut gs = vec![0.0; n];
        gs[n - 1] = g(r[n - 1])?;
        for j in (0..n - 1).rev() {
            gs[j] = gs[j + 1] + side_moment(nu, 0, r[j], r[j + 1], side)?;
        }
        // Exact end value keeps the top quantile consistent with the scheme rate.
        gs[0] = mass;

        let mut log_g = Vec::with_capacity(n);
        let mut log_r = Vec::with_capacity(n);
        let mut slope = Vec::with_capacity(n);
        for j in (0..n).rev() {
            log_g.push(gs[j].ln());
            log_r.push(log_r_desc[j]);
            // d log G / d log r = −r f(r) / G.
            let f = nu.density(sign * r[j]).unwrap_or(0.0);
            let dg = -r[j] * f / gs[j];
            slope.push(if dg < 0.0 { 1.0 / dg } else { f64::NAN });
        }
        if log_g.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Numerical("tail table is not strictly monotone".into()));
        }
        fritsch_carlson(&log_g, &log_r, &mut slope);
        Ok(Self { log_g, log_r, slope })
    }

    fn quantile(&self, u: f64) -> f64 {
        let y = u.ln() + self.log_g[self.log_g.len() - 1];
        let n = self.log_g.len();
        if y <= self.log_g[0] {
            return self.log_r[0].exp();
        }
        if y >= self.log_g[n - 1] {
            return self.log_r[n - 1].exp();
        }
        let i = self.log_g.partition_point(|&v| v <= y) - 1;
        let (y0, y1) = (self.log_g[i], self.log_g[i + 1]);
        let h = y1 - y0;
        let t = (y - y0) / h;
        let (p0, p1) = (self.log_r[i], self.log_r[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let x = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        x.exp()
    }
}

/// Fritsch–Carlson limiter for monotone cubic Hermite data; invalid
/// derivatives fall back to the neighbouring secants.
fn fritsch_carlson(x: &[f64], y: &[f64], d: &mut [f64]) {
    let n = x.len();
    let sec: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    for i in 0..n {
        let fallback = match i {
            0 => sec[0],
            i if i == n - 1 => sec[n - 2],
            _ => 0.5 * (sec[i - 1] + sec[i]),
        };
        if !d[i].is_finite() {
            d[i] = fallback;
        }
    }
    for i in 0..n - 1 {
        let s = sec[i];
        if s == 0.0 {
            d[i] = 0.0;
            d[i + 1] = 0.0;
            continue;
        }
        if d[i].signum() != s.signum() {
            d[i] = 0.0;
        }
        if d[i + 1].signum() != s.signum() {
            d[i + 1] = 0.0;
        }
        let a = d[i] / s;
        let b = d[i + 1] / s;
        let q = a * a + b * b;
        if q > 9.0 {
            let tau = 3.0 / q.sqrt();
            d[i] = tau * a * s;
            d[i + 1] = tau * b * s;
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Category {
    Atom(f64),
    Tail(Side),
}

/// Draws jumps from the normalised `ν_ε`.
#[derive(Debug, Clone)]
pub struct SchemeSampler {
    pub gamma_eps: f64,
    pub lambda_eps: f64,
    pub gauss_sigma2: Option<f64>,
    categories: Vec<Category>,
    index: Option<WeightedIndex<f64>>,
    plus: Option<TailSampler>,
    minus: Option<TailSampler>,
}

impl SchemeSampler {
    pub fn new(s: &FiniteActivityScheme) -> Result<Self> {
        let mut categories = Vec::new();
        let mut weights = Vec::new();
        for &(x, r) in &s.atoms {
            categories.push(Category::Atom(x));
            weights.push(r);
        }
        let mut plus = None;
        let mut minus = None;
        if s.tail_plus > 0.0 {
            categories.push(Category::Tail(Side::Plus));
            weights.push(s.tail_plus);
            plus = Some(TailSampler::new(&s.measure, s.epsilon, Side::Plus)?);
        }
        if s.tail_minus > 0.0 {
            categories.push(Category::Tail(Side::Minus));
            weights.push(s.tail_minus);
            minus = Some(TailSampler::new(&s.measure, s.epsilon, Side::Minus)?);
        }
        let index = if weights.is_empty() {
            None
        } else {
            Some(WeightedIndex::new(&weights).map_err(|e| Error::Domain(format!("jump rates: {e}")))?)
        };
        Ok(Self {
            gamma_eps: s.gamma_eps,
            lambda_eps: s.lambda_eps,
            gauss_sigma2: s.gauss_sigma2,
            categories,
            index,
            plus,
            minus,
        })
    }

    /// Draws one jump of `ν_ε / λ_ε`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let index = self
            .index
            .as_ref()
            .ok_or_else(|| Error::Domain("scheme has zero intensity".into()))?;
        Ok(match self.categories[index.sample(rng)] {
            Category::Atom(x) => x,
            Category::Tail(side) => {
                let u: f64 = rng.sample(Open01);
                match side {
                    Side::Plus => self.plus.as_ref().expect("plus tail").quantile(u),
                    _ => -self.minus.as_ref().expect("minus tail").quantile(u),
                }
            }
        })
    }
}

/// One draw from the normalised `ν_ε` of `s`.
pub fn sample_scheme_jump<R: Rng + ?Sized>(sampler: &SchemeSampler, rng: &mut R) -> Result<f64> {
    sampler.sample_jump(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_measure::{Nig, NigParams};
    use std::sync::Arc;

    #[test]
    fn table_inverts_tail() {
        let nu: SharedMeasure = Arc::new(Nig::new(NigParams::new(2.0, 0.8, 1.0).unwrap()).unwrap());
        let eps = 0.01;
        let mass = tail_mass(nu.as_ref(), eps, Side::Plus).unwrap();
        let t = TailSampler::new(&nu, eps, Side::Plus).unwrap();
        for &u in &[1e-9, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.999999] {
            let r = t.quantile(u);
            let back = tail_mass(nu.as_ref(), r, Side::Plus).unwrap() / mass;
            assert!((back - u).abs() < 1e-7 * u.max(1e-3), "u {u}: {back}");
        }
        assert!((t.quantile(1.0 - 1e-16) - eps).abs() < 1e-12);
    }
}
