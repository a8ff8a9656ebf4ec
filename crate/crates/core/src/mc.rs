//! Monte Carlo estimation of `E[f(X₁)]`, convergence studies and slope fits.
//!
//! Paths are split into fixed chunks of consecutive indices; each chunk is
//! accumulated sequentially and chunk summaries are merged in index order,
//! so results do not depend on the number of worker threads.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::levy_measure::{NigParams, SharedMeasure};
use crate::moment_match::{discrete_match, MuStar};
use crate::rng::RngStream;
use crate::schemes::{
    build_gaussian_compensation, build_high_order, build_three_moment, build_truncation, FiniteActivityScheme,
    SchemeKind,
};
use crate::simulate::{sample_nig_increment, simulate_euler, simulate_jump_adapted, Payoff, SDEProblem, SchemeSampler};

pub const CHUNK: u64 = 4096;
pub const WORKERS_ENV: &str = "LEVY_SCHEMES_WORKERS";

/// Streaming mean / variance (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Stats {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Stats) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let (na, nb) = (self.n as f64, o.n as f64);
        self.mean += d * nb / n as f64;
        self.m2 += o.m2 + d * d * na * nb / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub avg_jumps_per_path: f64,
    pub jumps_stderr: f64,
    pub wall_time_s: f64,
    pub failures: u64,
}

/// Simulation method for one estimate.
#[derive(Debug, Clone)]
pub enum Method {
    JumpAdapted(Arc<SchemeSampler>),
    Euler { nig: NigParams, n_steps: usize },
}

impl Method {
    pub fn jump_adapted(s: &FiniteActivityScheme) -> Result<Self> {
        Ok(Method::JumpAdapted(Arc::new(SchemeSampler::new(s)?)))
    }
}

/// Worker count: explicit value, else `LEVY_SCHEMES_WORKERS`, else rayon's default.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    if let Some(w) = explicit {
        if w == 0 {
            return Err(Error::Config("worker count must be >= 1".into()));
        }
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let n = resolve_workers(workers)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, Default)]
struct ChunkStats {
    payoffs: Vec<Stats>,
    jumps: Stats,
    failures: u64,
}

fn run_chunk(
    p: &SDEProblem,
    method: &Method,
    payoffs: &[Payoff],
    seed: u64,
    start: u64,
    end: u64,
) -> Result<ChunkStats> {
    let mut out = ChunkStats {
        payoffs: vec![Stats::default(); payoffs.len()],
        ..Default::default()
    };
    for i in start..end {
        let mut rng = RngStream::new(seed, i);
        let outcome = match method {
            Method::JumpAdapted(s) => simulate_jump_adapted(p, s, &mut rng).map(|o| (o.x, o.jumps)),
            Method::Euler { nig, n_steps } => {
                simulate_euler(p, *n_steps, &mut rng, |dt, r| sample_nig_increment(nig, dt, r))
                    .map(|x| (x, *n_steps as u64))
            }
        };
        match outcome {
            Ok((x, jumps)) => {
                for (st, f) in out.payoffs.iter_mut().zip(payoffs) {
                    st.push(f.eval(x));
                }
                out.jumps.push(jumps as f64);
            }
            Err(Error::PathFailure) => out.failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Estimates `E[f(X₁)]` for each payoff from one shared set of paths.
pub fn mc_estimate_payoffs(
    p: &SDEProblem,
    method: &Method,
    payoffs: &[Payoff],
    n_paths: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<MCResult>> {
    if n_paths < 2 {
        return domain(format!("need at least 2 paths, got {n_paths}"));
    }
    let t0 = Instant::now();
    let n_chunks = n_paths.div_ceil(CHUNK);
    let chunks: Vec<Result<ChunkStats>> = with_pool(workers, || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| run_chunk(p, method, payoffs, seed, c * CHUNK, ((c + 1) * CHUNK).min(n_paths)))
            .collect()
    })?;
    let mut total = ChunkStats {
        payoffs: vec![Stats::default(); payoffs.len()],
        ..Default::default()
    };
    for c in chunks {
        let c = c?;
        for (a, b) in total.payoffs.iter_mut().zip(&c.payoffs) {
            a.merge(b);
        }
        total.jumps.merge(&c.jumps);
        total.failures += c.failures;
    }
    if total.failures == n_paths {
        return Err(Error::Estimation(format!("all {n_paths} paths failed")));
    }
    let wall = t0.elapsed().as_secs_f64();
    Ok(total
        .payoffs
        .iter()
        .map(|st| MCResult {
            mean: st.mean,
            stderr: st.stderr(),
            n_paths,
            avg_jumps_per_path: total.jumps.mean,
            jumps_stderr: total.jumps.stderr(),
            wall_time_s: wall,
            failures: total.failures,
        })
        .collect())
}

pub fn mc_estimate(p: &SDEProblem, method: &Method, n_paths: u64, seed: u64, workers: Option<usize>) -> Result<MCResult> {
    let mut v = mc_estimate_payoffs(p, method, std::slice::from_ref(&p.payoff), n_paths, seed, workers)?;
    Ok(v.remove(0))
}

// ---------------------------------------------------------------------------
// Convergence studies

/// Family of approximations indexed by a control parameter.
#[derive(Debug, Clone)]
pub enum Family {
    /// Jump-adapted scheme; control is ε.
    JumpAdapted {
        measure: SharedMeasure,
        kind: SchemeKind,
        /// Matched moments beyond the second for the high-order scheme.
        n: usize,
    },
    /// Constant-step Euler with exact NIG increments; control is the step count.
    Euler { nig: NigParams },
}

/// Builds the scheme of `kind` at level `eps`. For the high-order scheme the
/// nodes are the `(n+1)`-point Gauss rule of the measure's small-jump profile.
pub fn build_scheme(measure: &SharedMeasure, kind: SchemeKind, eps: f64, n: usize) -> Result<FiniteActivityScheme> {
    match kind {
        SchemeKind::Truncation => build_truncation(measure, eps),
        SchemeKind::GaussianCompensation => build_gaussian_compensation(measure, eps),
        SchemeKind::ThreeMoment => build_three_moment(measure, eps),
        SchemeKind::HighOrder => {
            let sp = measure
                .stable_params()
                .ok_or_else(|| Error::Unsupported("high-order scheme needs stable parameters".into()))?;
            let nodes = discrete_match(&MuStar::new(sp.alpha, sp.rho())?, n + 1)?;
            build_high_order(measure, eps, n, &nodes)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub control: f64,
    pub lambda_eps: Option<f64>,
    pub estimate: f64,
    pub stderr: f64,
    pub abs_error: f64,
    pub wall_time_s: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub avg_jumps_per_path: f64,
}

impl ConvergenceRow {
    /// Expected discretisation events per path: `λ_ε` or the step count.
    pub fn cost(&self) -> f64 {
        self.lambda_eps.unwrap_or(self.control)
    }

    /// Combined standard error of the row and the reference.
    pub fn noise(&self, reference: &Reference) -> f64 {
        (self.stderr * self.stderr + reference.stderr * reference.stderr).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study {
    pub rows: Vec<ConvergenceRow>,
    pub reference: Reference,
    pub warning: Option<String>,
}

/// One estimate per control value, errors against `reference`. Rows are
/// sorted by control (ε descending maps to cost ascending; rows keep the
/// control order given, then are sorted ascending by control).
pub fn convergence_study(
    p: &SDEProblem,
    family: &Family,
    controls: &[f64],
    n_paths: u64,
    seed: u64,
    reference: Reference,
    workers: Option<usize>,
) -> Result<Study> {
    let mut rows = Vec::with_capacity(controls.len());
    for &c in controls {
        let (method, lambda) = match family {
            Family::JumpAdapted { measure, kind, n } => {
                let s = build_scheme(measure, *kind, c, *n)?;
                (Method::jump_adapted(&s)?, Some(s.lambda_eps))
            }
            Family::Euler { nig } => {
                if !(c >= 1.0 && c.fract() == 0.0) {
                    return domain(format!("Euler step counts must be positive integers, got {c}"));
                }
                (
                    Method::Euler {
                        nig: *nig,
                        n_steps: c as usize,
                    },
                    None,
                )
            }
        };
        let r = mc_estimate(p, &method, n_paths, seed, workers)?;
        rows.push(ConvergenceRow {
            control: c,
            lambda_eps: lambda,
            estimate: r.mean,
            stderr: r.stderr,
            abs_error: (r.mean - reference.value).abs(),
            wall_time_s: r.wall_time_s,
            n_paths,
            seed,
            avg_jumps_per_path: r.avg_jumps_per_path,
        });
    }
    rows.sort_by(|a, b| a.control.total_cmp(&b.control));
    let min_bias = rows.iter().map(|r| r.abs_error).fold(f64::INFINITY, f64::min);
    let warning = (reference.stderr > 0.5 * min_bias).then(|| {
        format!(
            "noise-dominated: reference stderr {:.3e} exceeds half the smallest error {:.3e}",
            reference.stderr, min_bias
        )
    });
    Ok(Study {
        rows,
        reference,
        warning,
    })
}

/// Reference value from a high-order run.
pub fn reference_run(
    p: &SDEProblem,
    measure: &SharedMeasure,
    eps: f64,
    n: usize,
    n_paths: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Reference> {
    let s = build_scheme(measure, SchemeKind::HighOrder, eps, n)?;
    let r = mc_estimate(p, &Method::jump_adapted(&s)?, n_paths, seed, workers)?;
    Ok(Reference {
        value: r.mean,
        stderr: r.stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 usable points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        r2,
        n_points: pts.len(),
    })
}

/// Rows whose error exceeds `2·√(se² + se_ref²)`.
pub fn above_noise_floor<'a>(rows: &'a [ConvergenceRow], reference: &Reference) -> Vec<&'a ConvergenceRow> {
    rows.iter().filter(|r| r.abs_error > 2.0 * r.noise(reference)).collect()
}

/// Fit of log error against log cost over rows above the noise floor.
pub fn fit_study(study: &Study) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = above_noise_floor(&study.rows, &study.reference)
        .into_iter()
        .map(|r| (r.cost().ln(), r.abs_error.ln()))
        .collect();
    fit_slope(&pts)
}

// ---------------------------------------------------------------------------
// Output

pub const CSV_HEADER: [&str; 8] = [
    "control",
    "lambda_eps",
    "estimate",
    "stderr",
    "abs_error",
    "wall_time_s",
    "n_paths",
    "seed",
];

/// Writes the study table. Wall time is written only when `timing` is set,
/// so identical configurations produce identical bytes.
pub fn write_rows_csv<W: Write>(rows: &[ConvergenceRow], timing: bool, w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        let rec = [
            fmt_f64(r.control),
            r.lambda_eps.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.estimate),
            fmt_f64(r.stderr),
            fmt_f64(r.abs_error),
            if timing { fmt_f64(r.wall_time_s) } else { String::new() },
            r.n_paths.to_string(),
            r.seed.to_string(),
        ];
        wtr.write_record(&rec).map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Shortest representation that round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
