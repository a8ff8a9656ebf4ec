//! Discrete moment matching: Gauss rules for the small-jump profile `μ*`,
//! the explicit four-atom measure, and the ε-dependent atom weights.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::levy_measure::{partial_moment, LevyMeasure};
use crate::specfun::{dot2, eigen_tridiag, TridiagonalSym};

const ZERO_NODE_TOL: f64 = 1e-8;

/// Limiting small-jump profile
/// `μ*(dx) = (2−α)|x|^{1−α}(ρ 1_{0≤x≤1} + (1−ρ) 1_{−1≤x≤0}) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuStar {
    pub alpha: f64,
    pub rho: f64,
}

impl MuStar {
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return domain(format!("alpha must lie in (0, 2), got {alpha}"));
        }
        if !(0.0..=1.0).contains(&rho) {
            return domain(format!("rho must lie in [0, 1], got {rho}"));
        }
        Ok(Self { alpha, rho })
    }

    pub fn from_stable(c_plus: f64, c_minus: f64, alpha: f64) -> Result<Self> {
        if !(c_plus >= 0.0 && c_minus >= 0.0 && c_plus + c_minus > 0.0) {
            return domain("need c+ >= 0, c- >= 0, c+ + c- > 0");
        }
        Self::new(alpha, c_plus / (c_plus + c_minus))
    }

    pub fn density(&self, x: f64) -> f64 {
        if x.abs() > 1.0 || x == 0.0 {
            return 0.0;
        }
        let side = if x > 0.0 { self.rho } else { 1.0 - self.rho };
        (2.0 - self.alpha) * x.abs().powf(1.0 - self.alpha) * side
    }
}

/// `m_k = (2−α)/(k+2−α) (ρ + (−1)^k (1−ρ))`.
pub fn mu_star_moment(m: &MuStar, k: u32) -> f64 {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    (2.0 - m.alpha) / (k as f64 + 2.0 - m.alpha) * (m.rho + sign * (1.0 - m.rho))
}

/// Probability measure `Σ a_i δ_{x_i}` with nonzero nodes in `[−1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub rho: f64,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, alpha: f64, rho: f64) -> Result<Self> {
        let me = Self {
            nodes,
            weights,
            alpha,
            rho,
        };
        me.validate()?;
        Ok(me)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() || self.nodes.len() != self.weights.len() {
            return domain("nodes and weights must be nonempty and of equal length");
        }
        if self.nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("nodes must be strictly increasing");
        }
        if let Some(&x) = self.nodes.iter().find(|x| x.abs() > 1.0 || **x == 0.0) {
            return domain(format!("node {x} outside [-1, 1] \\ {{0}}"));
        }
        if self.weights.iter().any(|w| !(*w > 0.0)) {
            return domain("weights must be strictly positive");
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("weights sum to {total}, not 1"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn moment(&self, k: u32) -> f64 {
        let powers: Vec<f64> = self.nodes.iter().map(|x| x.powi(k as i32)).collect();
        dot2(&self.weights, &powers)
    }
}

/// `n_atoms`-point Gauss rule of `μ*` (Golub–Welsch from the Hankel moment
/// matrix). Matches the moments of `μ*` up to order `2 n_atoms − 1`.
pub fn discrete_match(m: &MuStar, n_atoms: usize) -> Result<DiscreteMeasure> {
    if n_atoms == 0 {
        return domain("need at least one atom");
    }
    let moments: Vec<f64> = (0..=2 * n_atoms as u32).map(|k| mu_star_moment(m, k)).collect();
    let (nodes, weights) = gauss_rule_from_moments(&moments, n_atoms)?;
    if let Some(&x) = nodes.iter().find(|x| x.abs() < ZERO_NODE_TOL) {
        return Err(Error::DegenerateNode { node: x });
    }
    // Renormalise the rounding residue so weights sum to 1 exactly enough.
    let total: f64 = weights.iter().sum();
    let weights = weights.into_iter().map(|w| w / total).collect();
    DiscreteMeasure::new(nodes, weights, m.alpha, m.rho)
}

/// Gauss rule with `n` nodes from moments `m_0..m_{2n}`.
pub fn gauss_rule_from_moments(moments: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if moments.len() < 2 * n + 1 {
        return domain(format!("need {} moments for {n} nodes, got {}", 2 * n + 1, moments.len()));
    }
    let size = n + 1;
    // Upper Cholesky factor R of the Hankel matrix H_{ij} = m_{i+j}.
    let mut r = vec![vec![0.0; size]; size];
    for i in 0..size {
        let col_i: Vec<f64> = (0..i).map(|k| r[k][i]).collect();
        let diag = moments[2 * i] - dot2(&col_i, &col_i);
        if !(diag > 0.0) {
            return Err(Error::IllConditioned(format!(
                "Hankel matrix not positive definite at pivot {i} (value {diag:e})"
            )));
        }
        let rii = diag.sqrt();
        r[i][i] = rii;
        for j in i + 1..size {
            let col_j: Vec<f64> = (0..i).map(|k| r[k][j]).collect();
            r[i][j] = (moments[i + j] - dot2(&col_i, &col_j)) / rii;
        }
    }
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n {
        let prev = if j == 0 { 0.0 } else { r[j - 1][j] / r[j - 1][j - 1] };
        diag.push(r[j][j + 1] / r[j][j] - prev);
        if j + 1 < n {
            off.push(r[j + 1][j + 1] / r[j][j]);
        }
    }
    let eig = eigen_tridiag(&TridiagonalSym::new(diag, off)?)?;
    let weights = eig.weights(moments[0]);
    Ok((eig.values, weights))
}

/// Closed-form four-atom measure matching moments 1–3 of `μ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitFourAtom {
    pub eps_bar: f64,
    pub sigma2: f64,
    pub s: f64,
    pub p: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub measure: DiscreteMeasure,
}

pub fn explicit_four_atom(m: &MuStar) -> Result<ExplicitFourAtom> {
    let (a, rho) = (m.alpha, m.rho);
    if !(rho > 0.0 && rho < 1.0) {
        return domain(format!("the four-atom measure needs 0 < rho < 1, got {rho}"));
    }
    let eps_bar = (2.0 - a) / (3.0 - a);
    let sigma2 = (2.0 - a) / ((4.0 - a) * (3.0 - a) * (3.0 - a));
    let sigma = sigma2.sqrt();
    let s = 2.0 * (a - 1.0) / (5.0 - a) * ((4.0 - a) / (2.0 - a)).sqrt();
    let sign = if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    };
    let p = 0.5 - 0.5 * sign * (s * s / (s * s + 4.0)).sqrt();
    let eps1 = eps_bar - sigma * (p / (1.0 - p)).sqrt();
    let eps2 = eps_bar + sigma * ((1.0 - p) / p).sqrt();
    let measure = DiscreteMeasure::new(
        vec![-eps2, -eps1, eps1, eps2],
        vec![(1.0 - rho) * p, (1.0 - rho) * (1.0 - p), rho * (1.0 - p), rho * p],
        a,
        rho,
    )?;
    Ok(ExplicitFourAtom {
        eps_bar,
        sigma2,
        s,
        p,
        eps1,
        eps2,
        measure,
    })
}

/// Solves the primal Vandermonde system `Σ_i z_i x_i^k = b_k`, `k = 0..n`
/// (Björck–Pereyra).
pub fn solve_vandermonde(x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n1 = x.len();
    if b.len() != n1 || n1 == 0 {
        return domain("Vandermonde system needs matching, nonempty node and rhs vectors");
    }
    for i in 0..n1 {
        for j in 0..i {
            if x[i] == x[j] {
                return Err(Error::Singular(format!("repeated node {}", x[i])));
            }
        }
    }
    let n = n1 - 1;
    let mut f = b.to_vec();
    for k in 0..n {
        for i in (k + 1..=n).rev() {
            f[i] -= x[k] * f[i - 1];
        }
    }
    for k in (0..n).rev() {
        for i in k + 1..=n {
            f[i] /= x[i] - x[i - k - 1];
        }
        for i in k..n {
            f[i] -= f[i + 1];
        }
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite Vandermonde solution".into()));
    }
    Ok(f)
}

/// Right-hand side `∫_{|x|≤ε} x^{2+k} ν(dx) / (σ_ε² ε^k)`, `k = 0..n`.
pub fn atom_rate_rhs(nu: &dyn LevyMeasure, eps: f64, n: usize) -> Result<(f64, Vec<f64>)> {
    let sigma2 = partial_moment(nu, 2, eps)?;
    if !(sigma2 > 0.0) {
        return domain(format!("second partial moment vanishes at epsilon = {eps}"));
    }
    let mut rhs = vec![1.0];
    for k in 1..=n {
        let mk = partial_moment(nu, 2 + k as i32, eps)?;
        rhs.push(mk / (sigma2 * eps.powi(k as i32)));
    }
    Ok((sigma2, rhs))
}

/// Weights `a_i^ε` solving `σ_ε² Σ a_i x_i^k ε^k = ∫_{|x|≤ε} x^{2+k} ν(dx)`,
/// `k = 0..n`. Fails with [`Error::EpsilonTooLarge`] if any weight is
/// nonpositive.
pub fn solve_atom_rates(nodes: &[f64], nu: &dyn LevyMeasure, eps: f64, n: usize) -> Result<Vec<f64>> {
    if nodes.len() != n + 1 {
        return domain(format!("need n + 1 = {} nodes, got {}", n + 1, nodes.len()));
    }
    if nodes.iter().any(|x| *x == 0.0 || !x.is_finite()) {
        return domain("nodes must be finite and nonzero");
    }
    if !(eps > 0.0) {
        return domain(format!("epsilon must be positive, got {eps}"));
    }
    let (_, rhs) = atom_rate_rhs(nu, eps, n)?;
    let a = solve_vandermonde(nodes, &rhs)?;
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::EpsilonTooLarge {
            epsilon: eps,
            index,
            value,
        });
    }
    Ok(a)
}
