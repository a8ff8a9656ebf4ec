//! Finite-activity approximations `Z^ε` of a pure-jump Lévy process:
//! truncation, Gaussian compensation, and the moment-matching schemes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::levy_measure::{band_moment, partial_moment, side_moment, tail_mass, MeasureSpec, SharedMeasure, Side};
use crate::moment_match::{solve_atom_rates, DiscreteMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Truncation,
    GaussianCompensation,
    ThreeMoment,
    HighOrder,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::Truncation => "truncation",
            SchemeKind::GaussianCompensation => "gaussian_compensation",
            SchemeKind::ThreeMoment => "three_moment",
            SchemeKind::HighOrder => "high_order",
        };
        f.write_str(s)
    }
}

/// Approximating triplet `(0, ν_ε, γ_ε)`: the tail of ν on `{|x| > ε}`
/// plus finitely many atoms.
#[derive(Clone)]
pub struct FiniteActivityScheme {
    pub measure: SharedMeasure,
    pub kind: SchemeKind,
    pub epsilon: f64,
    /// `(location, rate)` pairs.
    pub atoms: Vec<(f64, f64)>,
    pub tail_plus: f64,
    pub tail_minus: f64,
    pub tail_rate: f64,
    pub gamma_eps: f64,
    pub lambda_eps: f64,
    pub gauss_sigma2: Option<f64>,
    pub order: u32,
}

impl fmt::Debug for FiniteActivityScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteActivityScheme")
            .field("kind", &self.kind)
            .field("epsilon", &self.epsilon)
            .field("atoms", &self.atoms)
            .field("tail_rate", &self.tail_rate)
            .field("gamma_eps", &self.gamma_eps)
            .field("lambda_eps", &self.lambda_eps)
            .field("gauss_sigma2", &self.gauss_sigma2)
            .field("order", &self.order)
            .finish()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return domain(format!("epsilon must be positive, got {eps}"));
    }
    if eps > 1.0 {
        return Err(Error::Unsupported(format!(
            "epsilon = {eps} > 1: drift compensation is defined for epsilon <= 1"
        )));
    }
    Ok(())
}

/// `γ − Σ_{|x_i|≤1} x_i·rate_i − ∫_{ε<|z|≤1} z ν(dz)`.
pub fn compensated_drift(measure: &SharedMeasure, atoms: &[(f64, f64)], eps: f64, gamma: f64) -> Result<f64> {
    check_eps(eps)?;
    let atom_part: f64 = atoms.iter().filter(|(x, _)| x.abs() <= 1.0).map(|(x, r)| x * r).sum();
    let band = if measure.is_symmetric() {
        0.0
    } else {
        band_moment(measure.as_ref(), 1, eps, 1.0)?
    };
    Ok(gamma - atom_part - band)
}

fn assemble(
    measure: &SharedMeasure,
    kind: SchemeKind,
    eps: f64,
    atoms: Vec<(f64, f64)>,
    gauss_sigma2: Option<f64>,
    order: u32,
) -> Result<FiniteActivityScheme> {
    let nu = measure.as_ref();
    let tail_plus = tail_mass(nu, eps, Side::Plus)?;
    let tail_minus = tail_mass(nu, eps, Side::Minus)?;
    let tail_rate = tail_plus + tail_minus;
    let gamma_eps = compensated_drift(measure, &atoms, eps, nu.gamma())?;
    let lambda_eps = tail_rate + atoms.iter().map(|(_, r)| r).sum::<f64>();
    Ok(FiniteActivityScheme {
        measure: measure.clone(),
        kind,
        epsilon: eps,
        atoms,
        tail_plus,
        tail_minus,
        tail_rate,
        gamma_eps,
        lambda_eps,
        gauss_sigma2,
        order,
    })
}

/// Drops the small jumps and replaces them by their compensator.
pub fn build_truncation(measure: &SharedMeasure, eps: f64) -> Result<FiniteActivityScheme> {
    check_eps(eps)?;
    assemble(measure, SchemeKind::Truncation, eps, Vec::new(), None, 0)
}

/// Truncation plus a Brownian part of variance `∫_{|x|≤ε} x² ν(dx)`.
///
/// The compensated small jumps have mean zero, so the drift coincides with
/// the truncation drift.
pub fn build_gaussian_compensation(measure: &SharedMeasure, eps: f64) -> Result<FiniteActivityScheme> {
    check_eps(eps)?;
    let sigma2 = partial_moment(measure.as_ref(), 2, eps)?;
    assemble(measure, SchemeKind::GaussianCompensation, eps, Vec::new(), Some(sigma2), 0)
}

/// Atoms at `±ε` with `λ± = ½(M₂/ε² ± M₃/ε³)`, `M_k = ∫_{|x|≤ε} x^k ν(dx)`.
pub fn build_three_moment(measure: &SharedMeasure, eps: f64) -> Result<FiniteActivityScheme> {
    check_eps(eps)?;
    let nu = measure.as_ref();
    let m2 = partial_moment(nu, 2, eps)?;
    let m3 = partial_moment(nu, 3, eps)?;
    let a = m2 / (eps * eps);
    let b = m3 / (eps * eps * eps);
    let lp = 0.5 * (a + b);
    let lm = 0.5 * (a - b);
    assert!(
        lp >= 0.0 && lm >= 0.0,
        "negative three-moment rates ({lp}, {lm}) contradict |x| <= epsilon"
    );
    let atoms: Vec<(f64, f64)> = [(eps, lp), (-eps, lm)].into_iter().filter(|(_, r)| *r > 0.0).collect();
    let mut s = assemble(measure, SchemeKind::ThreeMoment, eps, atoms, None, 3)?;
    // Exact form of the intensity identity λ_ε = tail + M₂/ε².
    s.lambda_eps = s.tail_rate + a;
    Ok(s)
}

/// Atoms at `ε x_i` with rates `σ_ε² a_i^ε / (x_i² ε²)`, matching moments
/// `2..=n+2` of ν. `nodes` must carry `n + 1` atoms.
pub fn build_high_order(
    measure: &SharedMeasure,
    eps: f64,
    n: usize,
    nodes: &DiscreteMeasure,
) -> Result<FiniteActivityScheme> {
    check_eps(eps)?;
    let nu = measure.as_ref();
    if nu.stable_params().is_none() {
        return Err(Error::Unsupported(
            "high-order scheme needs a stable-like measure (stable parameters unset)".into(),
        ));
    }
    nodes.validate()?;
    if nodes.len() != n + 1 {
        return domain(format!("n = {n} needs {} nodes, got {}", n + 1, nodes.len()));
    }
    let a = solve_atom_rates(&nodes.nodes, nu, eps, n)?;
    let sigma2 = partial_moment(nu, 2, eps)?;
    let atoms = nodes
        .nodes
        .iter()
        .zip(&a)
        .map(|(x, ai)| (eps * x, sigma2 * ai / (x * x * eps * eps)))
        .collect();
    assemble(measure, SchemeKind::HighOrder, eps, atoms, None, n as u32 + 2)
}

/// `∫ |x|^m |dν − dν_ε| = ∫_{|x|≤ε} |x|^m dν + Σ rate_i |x_i|^m`.
///
/// Assumes ν carries no mass on `{|x| = ε}`.
pub fn error_moment(s: &FiniteActivityScheme, m: i32) -> Result<f64> {
    if m < 2 {
        return domain(format!("error moment order must be >= 2, got {m}"));
    }
    let cont = side_moment(s.measure.as_ref(), m, 0.0, s.epsilon, Side::Both)?;
    let atoms: f64 = s.atoms.iter().map(|(x, r)| r * x.abs().powi(m)).sum();
    Ok(cont + atoms)
}

impl FiniteActivityScheme {
    /// `∫ x^k ν_ε(dx)` (tail of ν on `{|x|>ε}` plus atoms), `k ≥ 1`.
    pub fn moment(&self, k: i32) -> Result<f64> {
        let tail = band_moment(self.measure.as_ref(), k, self.epsilon, f64::INFINITY)?;
        let atoms: f64 = self.atoms.iter().map(|(x, r)| r * x.powi(k)).sum();
        Ok(tail + atoms + if k == 2 { self.gauss_sigma2.unwrap_or(0.0) } else { 0.0 })
    }

    /// Mean of `Z^ε_1 = γ_ε + Σ jumps`: `γ_ε + ∫ x ν_ε(dx)`.
    pub fn mean(&self) -> Result<f64> {
        let atoms: f64 = self.atoms.iter().map(|(x, r)| x * r).sum();
        Ok(self.gamma_eps + atoms + band_moment(self.measure.as_ref(), 1, self.epsilon, f64::INFINITY)?)
    }

    /// Cumulants `κ_1..κ_kmax` of `Z^ε_1`.
    pub fn cumulants(&self, kmax: i32) -> Result<Vec<f64>> {
        let mut out = vec![self.mean()?];
        for k in 2..=kmax {
            out.push(self.moment(k)?);
        }
        Ok(out)
    }

    pub fn record(&self) -> Result<SchemeRecord> {
        let measure = self
            .measure
            .descriptor()
            .ok_or_else(|| Error::Unsupported("measure has no JSON descriptor".into()))?;
        Ok(SchemeRecord {
            measure,
            kind: self.kind,
            epsilon: self.epsilon,
            atoms: self.atoms.iter().map(|&(x, r)| [x, r]).collect(),
            tail_plus: self.tail_plus,
            tail_minus: self.tail_minus,
            tail_rate: self.tail_rate,
            gamma_eps: self.gamma_eps,
            lambda_eps: self.lambda_eps,
            gauss_sigma2: self.gauss_sigma2,
            order: self.order,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.record()?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: SchemeRecord = serde_json::from_str(s)?;
        rec.into_scheme()
    }
}

/// JSON form of a scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeRecord {
    pub measure: MeasureSpec,
    pub kind: SchemeKind,
    pub epsilon: f64,
    pub atoms: Vec<[f64; 2]>,
    pub tail_plus: f64,
    pub tail_minus: f64,
    pub tail_rate: f64,
    pub gamma_eps: f64,
    pub lambda_eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_sigma2: Option<f64>,
    pub order: u32,
}

impl SchemeRecord {
    pub fn into_scheme(self) -> Result<FiniteActivityScheme> {
        check_eps(self.epsilon)?;
        if self.atoms.iter().any(|[x, r]| !(*r > 0.0) || *x == 0.0) {
            return domain("atom rates must be positive and locations nonzero");
        }
        Ok(FiniteActivityScheme {
            measure: self.measure.build()?,
            kind: self.kind,
            epsilon: self.epsilon,
            atoms: self.atoms.iter().map(|&[x, r]| (x, r)).collect(),
            tail_plus: self.tail_plus,
            tail_minus: self.tail_minus,
            tail_rate: self.tail_rate,
            gamma_eps: self.gamma_eps,
            lambda_eps: self.lambda_eps,
            gauss_sigma2: self.gauss_sigma2,
            order: self.order,
        })
    }
}
