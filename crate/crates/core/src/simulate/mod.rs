//! Path simulation: jump-adapted scheme under a finite-activity driver and
//! constant-step Euler with exact increments.

mod flow;
mod nig;
mod sampler;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use flow::{rk4_flow, sin_flow};
pub use nig::{sample_inverse_gaussian, sample_nig_increment};
pub use sampler::{sample_scheme_jump, SchemeSampler, TailSampler, TailTable, TAIL_CUTOFF, TAIL_KNOTS};

pub const DEFAULT_RK4_SUBSTEPS: usize = 64;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// SDE coefficient `h` in `dX = h(X_{t−}) dZ_t`.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    /// `h(x) = sin(a x)`.
    Sin { a: f64 },
    Custom(ScalarFn),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Sin { a } => write!(f, "Sin {{ a: {a} }}"),
            Coefficient::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Coefficient {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Sin { a } => (a * x).sin(),
            Coefficient::Custom(h) => h(x),
        }
    }

    /// Exact solution of `dX = h(X) γ dt` after time `t`, when known.
    pub fn exact_flow(&self, t: f64, x: f64, gamma: f64) -> Option<f64> {
        match self {
            Coefficient::Constant(c) => Some(x + c * gamma * t),
            Coefficient::Sin { a } => Some(sin_flow(*a, gamma * t, x)),
            Coefficient::Custom(_) => None,
        }
    }
}

/// Terminal payoff `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Payoff {
    /// `x^k`.
    Power { k: i32 },
    /// `cos(ω x)`.
    Cos { omega: f64 },
    /// `(x − K)⁺`.
    Call { strike: f64 },
    Constant { value: f64 },
}

impl Payoff {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Payoff::Power { k } => x.powi(k),
            Payoff::Cos { omega } => (omega * x).cos(),
            Payoff::Call { strike } => (x - strike).max(0.0),
            Payoff::Constant { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMethod {
    /// Closed-form flow when the coefficient has one, RK4 with the default
    /// substep count otherwise.
    Exact,
    Rk4 { substeps: usize },
}

#[derive(Debug, Clone)]
pub struct SDEProblem {
    pub h: Coefficient,
    pub x0: f64,
    pub payoff: Payoff,
    pub flow: FlowMethod,
}

impl SDEProblem {
    pub fn new(h: Coefficient, x0: f64, payoff: Payoff) -> Self {
        Self {
            h,
            x0,
            payoff,
            flow: FlowMethod::Exact,
        }
    }

    /// `dX = sin(aX) dZ`.
    pub fn sin(a: f64, x0: f64, payoff: Payoff) -> Self {
        Self::new(Coefficient::Sin { a }, x0, payoff)
    }

    /// Solution of `dX = h(X) γ dt` after time `t`.
    pub fn flow(&self, t: f64, x: f64, gamma: f64) -> f64 {
        if gamma == 0.0 || t == 0.0 {
            return x;
        }
        match self.flow {
            FlowMethod::Exact => match self.h.exact_flow(t, x, gamma) {
                Some(v) => v,
                None => rk4_flow(&|y| self.h.eval(y), gamma, t, x, DEFAULT_RK4_SUBSTEPS),
            },
            FlowMethod::Rk4 { substeps } => rk4_flow(&|y| self.h.eval(y), gamma, t, x, substeps),
        }
    }
}

/// Terminal state and realised jump count of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub x: f64,
    pub jumps: u64,
}

/// Jump-adapted solution of `dX̂ = h(X̂_{t−}) dZ^ε_t` on `[0, 1]`.
///
/// Jump times come from exponential inter-arrival times with rate `λ_ε`.
/// Between jumps the drift flow with rate `γ_ε` is applied; for the
/// Gaussian-compensation scheme a kick `h(X)·N(0, σ²Δt)` follows each
/// inter-jump interval.
pub fn simulate_jump_adapted<R: Rng + ?Sized>(
    p: &SDEProblem,
    s: &SchemeSampler,
    rng: &mut R,
) -> Result<PathOutcome> {
    let mut x = p.x0;
    let mut t = 0.0;
    let mut jumps = 0u64;
    let lambda = s.lambda_eps;
    loop {
        let wait = if lambda > 0.0 {
            let e: f64 = rng.sample(Exp1);
            e / lambda
        } else {
            f64::INFINITY
        };
        let next = t + wait;
        let dt = if next >= 1.0 { 1.0 - t } else { wait };
        x = p.flow(dt, x, s.gamma_eps);
        if let Some(sigma2) = s.gauss_sigma2 {
            let n: f64 = rng.sample(StandardNormal);
            x += p.h.eval(x) * (sigma2 * dt).sqrt() * n;
        }
        if next >= 1.0 {
            break;
        }
        let dz = s.sample_jump(rng)?;
        x += p.h.eval(x) * dz;
        jumps += 1;
        t = next;
        if !x.is_finite() {
            return Err(Error::PathFailure);
        }
    }
    if !x.is_finite() {
        return Err(Error::PathFailure);
    }
    Ok(PathOutcome { x, jumps })
}

/// Constant-step Euler `X ← X + h(X)(Z_{t+Δ} − Z_t)` with exact increments
/// drawn by `increment(dt, rng)`.
pub fn simulate_euler<R, F>(p: &SDEProblem, n_steps: usize, rng: &mut R, mut increment: F) -> Result<f64>
where
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R) -> f64,
{
    if n_steps == 0 {
        return domain("Euler needs at least one step");
    }
    let dt = 1.0 / n_steps as f64;
    let mut x = p.x0;
    for _ in 0..n_steps {
        let dz = increment(dt, rng);
        x += p.h.eval(x) * dz;
    }
    if !x.is_finite() {
        return Err(Error::PathFailure);
    }
    Ok(x)
}
