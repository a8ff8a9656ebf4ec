//! JSON experiment configuration for the command-line tool.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy_measure::MeasureSpec;
use crate::schemes::SchemeKind;
use crate::simulate::{Coefficient, FlowMethod, Payoff, SDEProblem};

pub const DEFAULT_PATHS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub measure: MeasureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sde: Option<SdeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fig1: Option<Fig1Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimality: Option<OptimalityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub epsilon: f64,
    /// Matched moments beyond the second (high-order scheme only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientConfig {
    /// `h(x) = sin(a x)`.
    Sin { a: f64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeConfig {
    pub coefficient: CoefficientConfig,
    pub x0: f64,
    pub payoff: Payoff,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowMethod>,
}

impl SdeConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn problem(&self) -> Result<SDEProblem> {
        let h = match self.coefficient {
            CoefficientConfig::Sin { a } => {
                if !a.is_finite() || a == 0.0 {
                    return Err(Error::Config(format!("sin coefficient needs finite nonzero a, got {a}")));
                }
                Coefficient::Sin { a }
            }
            CoefficientConfig::Constant { value } => Coefficient::Constant(value),
        };
        if !self.x0.is_finite() {
            return Err(Error::Config("x0 must be finite".into()));
        }
        let mut p = SDEProblem::new(h, self.x0, self.payoff.clone());
        if let Some(f) = self.flow {
            if matches!(f, FlowMethod::Rk4 { substeps: 0 }) {
                return Err(Error::Config("rk4 needs at least one substep".into()));
            }
            p.flow = f;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    JumpAdapted {
        kind: SchemeKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    /// Constant-step Euler with exact NIG increments; needs an NIG measure.
    Euler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceConfig {
    Value {
        value: f64,
        #[serde(default)]
        stderr: f64,
    },
    /// High-order run; defaults are `ε = (smallest study ε)/10`, `n = 3`,
    /// ten times the study's paths and seed `seed + 1`.
    HighOrder {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_paths: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub family: FamilyConfig,
    /// ε values (jump-adapted) or step counts (Euler).
    pub grid: Vec<f64>,
    pub reference: ReferenceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Config {
    /// Expected discretisation events per path; each curve is evaluated at
    /// these costs (ε solved from `λ_ε = cost` for the jump-adapted curves).
    pub costs: Vec<f64>,
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimalityConfig {
    pub epsilons: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    /// Default cost-error comparison setting: NIG from `(σ, θ, κ) = (0.5, 0.4, 0.6)`, `dX = sin(5X) dZ`,
    /// `X₀ = 1`, payoff `(x − 1)⁺`.
    pub fn fig1_default() -> Self {
        Self {
            measure: MeasureSpec::NigSubordinated {
                sigma: 0.5,
                theta: 0.4,
                kappa: 0.6,
            },
            scheme: None,
            sde: Some(SdeConfig {
                coefficient: CoefficientConfig::Sin { a: 5.0 },
                x0: 1.0,
                payoff: Payoff::Call { strike: 1.0 },
                flow: None,
            }),
            study: None,
            fig1: Some(Fig1Config {
                costs: vec![4.0, 8.0, 16.0, 32.0, 64.0],
                reference: ReferenceConfig::HighOrder {
                    epsilon: Some(0.02),
                    n: Some(3),
                    n_paths: None,
                    seed: None,
                },
                gnuplot: false,
            }),
            optimality: None,
            n_paths: Some(200_000),
            seed: Some(DEFAULT_SEED),
            workers: None,
            out: None,
        }
    }

    pub fn sde(&self) -> Result<SDEProblem> {
        self.sde
            .as_ref()
            .ok_or_else(|| Error::Config("missing \"sde\" section".into()))?
            .problem()
    }
}
