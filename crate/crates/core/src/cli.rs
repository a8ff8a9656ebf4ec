//! Command-line front end: scheme inspection, single estimates, convergence
//! studies, the cost-error comparison (fig1) and optimality-ratio tables.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{optimality_ratio, write_ratio_csv, RatioRow};
use crate::config::{
    ExperimentConfig, FamilyConfig, ReferenceConfig, DEFAULT_ORDER, DEFAULT_PATHS, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::levy_measure::{band_moment, SharedMeasure};
use crate::mc::{
    build_scheme, convergence_study, fit_study, mc_estimate, write_rows_csv, ConvergenceRow, Family, MCResult,
    Method, Reference, SlopeFit, Study,
};
use crate::rng::RNG_NAME;
use crate::schemes::{FiniteActivityScheme, SchemeKind};
use crate::simulate::SDEProblem;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));
pub const FIG1_LABEL: &str = "parametrization-ambiguous";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl Error {
    /// Process exit code: 2 for invalid input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Unsupported(_) | Error::Io(_) => EXIT_CONFIG,
            _ => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "levy-schemes", version, about = "Moment-matching jump-adapted schemes for Lévy-driven SDEs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a scheme and print it as JSON with a moment-match report.
    Scheme(CommonArgs),
    /// One Monte Carlo estimate of E[f(X_1)].
    Estimate(CommonArgs),
    /// Convergence study over an ε grid or Euler step counts.
    Converge(CommonArgs),
    /// 3-moment, Gaussian-compensation and Euler error curves on NIG.
    Fig1(CommonArgs),
    /// Rate-optimality ratio table.
    Optimality(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON experiment config (fig1 falls back to its built-in setting).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long, env = "LEVY_SCHEMES_WORKERS")]
    pub workers: Option<usize>,
    /// Record wall times in CSV output (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Also write a gnuplot script (fig1).
    #[arg(long)]
    pub gnuplot: bool,
}

/// Settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub cfg: ExperimentConfig,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub n_paths: u64,
    pub workers: Option<usize>,
    pub timing: bool,
    pub gnuplot: bool,
}

impl Resolved {
    pub fn new(cfg: ExperimentConfig, args: &CommonArgs) -> Result<Self> {
        let n_paths = args.paths.or(cfg.n_paths).unwrap_or(DEFAULT_PATHS);
        if n_paths < 2 {
            return Err(Error::Config(format!("need at least 2 paths, got {n_paths}")));
        }
        let workers = args.workers.or(cfg.workers);
        if workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(Self {
            out: args.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from)),
            seed: args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            n_paths,
            workers,
            timing: args.timing,
            gnuplot: args.gnuplot || cfg.fig1.as_ref().is_some_and(|f| f.gnuplot),
            cfg,
        })
    }

    fn out_dir(&self) -> Result<&Path> {
        let d = self
            .out
            .as_deref()
            .ok_or_else(|| Error::Config("an output directory is required (--out or \"out\")".into()))?;
        fs::create_dir_all(d)?;
        Ok(d)
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(args: &CommonArgs, fallback: Option<ExperimentConfig>) -> Result<Resolved> {
    let cfg = match (&args.config, fallback) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(c)) => c,
        (None, None) => return Err(Error::Config("--config is required".into())),
    };
    Resolved::new(cfg, args)
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

/// Runs one subcommand and returns the text printed on success.
pub fn dispatch(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Scheme(a) => pretty(&cmd_scheme(&load(a, None)?)?),
        Command::Estimate(a) => pretty(&cmd_estimate(&load(a, None)?)?),
        Command::Converge(a) => pretty(&cmd_converge(&load(a, None)?)?),
        Command::Fig1(a) => pretty(&cmd_fig1(&load(a, Some(ExperimentConfig::fig1_default()))?)?.summary()),
        Command::Optimality(a) => pretty(&cmd_optimality(&load(a, None)?)?),
    }
}

// ---------------------------------------------------------------------------
// scheme / estimate

#[derive(Debug, Clone, Serialize)]
pub struct MomentCheck {
    pub orders: Vec<i32>,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeReport {
    pub scheme: crate::schemes::SchemeRecord,
    pub moment_check: MomentCheck,
}

fn matched_orders(s: &FiniteActivityScheme) -> Vec<i32> {
    match s.kind {
        SchemeKind::Truncation => vec![],
        SchemeKind::GaussianCompensation => vec![2],
        SchemeKind::ThreeMoment | SchemeKind::HighOrder => (2..=s.order as i32).collect(),
    }
}

/// Largest relative deviation of `∫x^k ν_ε` from `∫x^k ν` over the matched orders.
pub fn moment_check(s: &FiniteActivityScheme) -> Result<MomentCheck> {
    let orders = matched_orders(s);
    let mut worst: f64 = 0.0;
    for &k in &orders {
        let target = band_moment(s.measure.as_ref(), k, 0.0, f64::INFINITY)?;
        let got = s.moment(k)?;
        let scale = if k % 2 == 0 {
            target.abs()
        } else {
            crate::levy_measure::side_moment(s.measure.as_ref(), k, 0.0, f64::INFINITY, crate::levy_measure::Side::Both)?
        };
        worst = worst.max((got - target).abs() / scale);
    }
    Ok(MomentCheck {
        orders,
        max_rel_error: worst,
    })
}

fn configured_scheme(r: &Resolved) -> Result<FiniteActivityScheme> {
    let sc = r
        .cfg
        .scheme
        .as_ref()
        .ok_or_else(|| Error::Config("missing \"scheme\" section".into()))?;
    let nu = r.cfg.measure.build()?;
    build_scheme(&nu, sc.kind, sc.epsilon, sc.n.unwrap_or(DEFAULT_ORDER))
}

pub fn cmd_scheme(r: &Resolved) -> Result<SchemeReport> {
    let s = configured_scheme(r)?;
    let report = SchemeReport {
        scheme: s.record()?,
        moment_check: moment_check(&s)?,
    };
    if r.out.is_some() {
        let d = r.out_dir()?;
        write_text(&d.join("scheme.json"), &s.to_json()?)?;
    }
    Ok(report)
}

pub fn cmd_estimate(r: &Resolved) -> Result<MCResult> {
    let s = configured_scheme(r)?;
    let p = r.cfg.sde()?;
    let mut res = mc_estimate(&p, &Method::jump_adapted(&s)?, r.n_paths, r.seed, r.workers)?;
    if !r.timing {
        res.wall_time_s = 0.0;
    }
    Ok(res)
}

// ---------------------------------------------------------------------------
// converge

#[derive(Debug, Clone, Serialize)]
pub struct ConvergeSummary {
    pub slope: Option<f64>,
    pub r2: Option<f64>,
    pub n_points: usize,
    pub noise_floor: f64,
    pub noise_dominated: bool,
    pub warning: Option<String>,
    pub reference: Reference,
    pub cost_axis: &'static str,
}

fn family(r: &Resolved, f: &FamilyConfig, measure: &SharedMeasure) -> Result<Family> {
    Ok(match f {
        FamilyConfig::JumpAdapted { kind, n } => Family::JumpAdapted {
            measure: measure.clone(),
            kind: *kind,
            n: n.unwrap_or(DEFAULT_ORDER),
        },
        FamilyConfig::Euler => Family::Euler {
            nig: r
                .cfg
                .measure
                .nig_params()
                .ok_or_else(|| Error::Config("the Euler family needs an NIG measure".into()))??,
        },
    })
}

/// Reference value for a study whose smallest ε is `eps_min` (if any).
pub fn resolve_reference(
    rc: &ReferenceConfig,
    measure: &SharedMeasure,
    p: &SDEProblem,
    eps_min: Option<f64>,
    n_paths: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Reference> {
    match *rc {
        ReferenceConfig::Value { value, stderr } => {
            if !value.is_finite() || !(stderr >= 0.0) {
                return Err(Error::Config("reference value must be finite with stderr >= 0".into()));
            }
            Ok(Reference { value, stderr })
        }
        ReferenceConfig::HighOrder {
            epsilon,
            n,
            n_paths: ref_paths,
            seed: ref_seed,
        } => {
            let eps = epsilon
                .or(eps_min.map(|e| e / 10.0))
                .ok_or_else(|| Error::Config("reference epsilon is required for this study".into()))?;
            crate::mc::reference_run(
                p,
                measure,
                eps,
                n.unwrap_or(DEFAULT_ORDER),
                ref_paths.unwrap_or(n_paths.saturating_mul(10)),
                ref_seed.unwrap_or(seed.wrapping_add(1)),
                workers,
            )
        }
    }
}

fn summarize(study: &Study, cost_axis: &'static str) -> ConvergeSummary {
    let fit: Option<SlopeFit> = fit_study(study).ok();
    let noise_floor = study
        .rows
        .iter()
        .map(|row| 2.0 * row.noise(&study.reference))
        .fold(0.0, f64::max);
    ConvergeSummary {
        slope: fit.map(|f| f.slope),
        r2: fit.map(|f| f.r2),
        n_points: fit.map_or(0, |f| f.n_points),
        noise_floor,
        noise_dominated: study.warning.is_some() || fit.is_none(),
        warning: study.warning.clone(),
        reference: study.reference,
        cost_axis,
    }
}

pub fn cmd_converge(r: &Resolved) -> Result<ConvergeSummary> {
    let sc = r
        .cfg
        .study
        .as_ref()
        .ok_or_else(|| Error::Config("missing \"study\" section".into()))?;
    if sc.grid.len() < 4 {
        return Err(Error::Config(format!("study grid needs at least 4 points, got {}", sc.grid.len())));
    }
    let measure = r.cfg.measure.build()?;
    let p = r.cfg.sde()?;
    let fam = family(r, &sc.family, &measure)?;
    let eps_min = match fam {
        Family::JumpAdapted { .. } => sc.grid.iter().copied().reduce(f64::min),
        Family::Euler { .. } => None,
    };
    let out = r.out_dir()?;
    let reference = resolve_reference(&sc.reference, &measure, &p, eps_min, r.n_paths, r.seed, r.workers)?;
    let study = convergence_study(&p, &fam, &sc.grid, r.n_paths, r.seed, reference, r.workers)?;
    let cost_axis = match fam {
        Family::JumpAdapted { .. } => "lambda_eps",
        Family::Euler { .. } => "n_steps",
    };
    let summary = summarize(&study, cost_axis);
    write_csv(&out.join("converge.csv"), &study.rows, r.timing)?;
    write_text(&out.join("converge_summary.json"), &pretty(&summary)?)?;
    let meta = metadata(r, &fam, &study.rows, &[("converge", &study.rows)])?;
    write_text(&out.join("converge_meta.json"), &pretty(&meta)?)?;
    Ok(summary)
}

fn family_json(fam: &Family) -> serde_json::Value {
    match fam {
        Family::JumpAdapted { kind, n, .. } => json!({"type": "jump_adapted", "kind": kind, "n": n}),
        Family::Euler { nig } => json!({"type": "euler", "nig": nig}),
    }
}

fn metadata(
    r: &Resolved,
    fam: &Family,
    rows: &[ConvergenceRow],
    timed: &[(&str, &[ConvergenceRow])],
) -> Result<serde_json::Value> {
    let schemes: Vec<serde_json::Value> = match fam {
        Family::JumpAdapted { measure, kind, n } => rows
            .iter()
            .map(|row| Ok(serde_json::to_value(build_scheme(measure, *kind, row.control, *n)?.record()?)?))
            .collect::<Result<_>>()?,
        Family::Euler { .. } => Vec::new(),
    };
    let mut meta = json!({
        "version": VERSION,
        "rng": RNG_NAME,
        "seed": r.seed,
        "n_paths": r.n_paths,
        "measure": r.cfg.measure,
        "sde": r.cfg.sde,
        "family": family_json(fam),
        "schemes": schemes,
    });
    if r.timing {
        let t: serde_json::Map<String, serde_json::Value> = timed
            .iter()
            .map(|(k, rs)| (k.to_string(), json!(rs.iter().map(|x| x.wall_time_s).collect::<Vec<_>>())))
            .collect();
        meta["wall_time_s"] = serde_json::Value::Object(t);
    }
    Ok(meta)
}

fn write_csv(path: &Path, rows: &[ConvergenceRow], timing: bool) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    write_rows_csv(rows, timing, f)
}

fn write_text(path: &Path, s: &str) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(s.as_bytes())?;
    if !s.ends_with('\n') {
        f.write_all(b"\n")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fig1

/// ε with `λ_ε = target` for a jump-adapted family; `None` if even `ε = 1`
/// gives a larger intensity.
pub fn epsilon_for_intensity(measure: &SharedMeasure, kind: SchemeKind, n: usize, target: f64) -> Result<Option<f64>> {
    if !(target > 0.0) {
        return Err(Error::Config(format!("cost must be positive, got {target}")));
    }
    let lambda = |e: f64| build_scheme(measure, kind, e, n).map(|s| s.lambda_eps);
    if lambda(1.0)? > target {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1e-3, 1.0);
    while lambda(lo)? < target {
        lo *= 1e-2;
        if lo < 1e-12 {
            return Err(Error::Numerical(format!("intensity {target} not reached")));
        }
    }
    while hi / lo - 1.0 > 1e-12 {
        let mid = (lo * hi).sqrt();
        if lambda(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((lo * hi).sqrt()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub name: &'static str,
    pub rows: Vec<ConvergenceRow>,
    /// Costs with no admissible ε (`λ_1 > cost`).
    pub skipped_costs: Vec<f64>,
}

impl Curve {
    /// Cost of a row: `λ_ε` or the step count.
    pub fn costs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.cost()).collect()
    }

    /// Smallest cost whose error is at or below `floor`.
    pub fn floor_cost(&self, floor: f64) -> Option<f64> {
        self.rows.iter().filter(|r| r.abs_error <= floor).map(|r| r.cost()).reduce(f64::min)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Result {
    pub label: &'static str,
    pub reference: Reference,
    pub noise_floor: f64,
    pub costs: Vec<f64>,
    pub curves: Vec<Curve>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Summary {
    pub label: &'static str,
    pub reference: Reference,
    pub noise_floor: f64,
    pub floor_cost: Vec<(String, Option<f64>)>,
    pub three_moment_below_euler: bool,
    pub three_moment_reaches_floor_first: bool,
}

impl Fig1Result {
    pub fn curve(&self, name: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.name == name)
    }

    /// At every grid cost where both curves exceed the noise floor the
    /// 3-moment error is below the Euler error (vacuously true otherwise).
    pub fn three_moment_below_euler(&self) -> bool {
        let (Some(tm), Some(eu)) = (self.curve("three_moment"), self.curve("euler")) else {
            return false;
        };
        self.costs.iter().all(|&c| {
            let a = tm.rows.iter().find(|r| close(r.cost(), c));
            let b = eu.rows.iter().find(|r| close(r.cost(), c.round().max(1.0)));
            match (a, b) {
                (Some(a), Some(b)) if a.abs_error > self.noise_floor && b.abs_error > self.noise_floor => {
                    a.abs_error < b.abs_error
                }
                _ => true,
            }
        })
    }

    /// The 3-moment curve reaches the noise floor at a strictly lower cost
    /// than the Euler curve (which may never reach it on the grid).
    pub fn three_moment_reaches_floor_first(&self) -> bool {
        let (Some(tm), Some(eu)) = (self.curve("three_moment"), self.curve("euler")) else {
            return false;
        };
        match (tm.floor_cost(self.noise_floor), eu.floor_cost(self.noise_floor)) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        }
    }

    pub fn summary(&self) -> Fig1Summary {
        Fig1Summary {
            label: self.label,
            reference: self.reference,
            noise_floor: self.noise_floor,
            floor_cost: self
                .curves
                .iter()
                .map(|c| (c.name.to_string(), c.floor_cost(self.noise_floor)))
                .collect(),
            three_moment_below_euler: self.three_moment_below_euler(),
            three_moment_reaches_floor_first: self.three_moment_reaches_floor_first(),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * b.abs()
}

const FIG1_FILES: [&str; 3] = ["three_moment.csv", "gaussian_compensation.csv", "euler.csv"];

pub fn cmd_fig1(r: &Resolved) -> Result<Fig1Result> {
    let fc = r
        .cfg
        .fig1
        .as_ref()
        .ok_or_else(|| Error::Config("missing \"fig1\" section".into()))?;
    let nig = r
        .cfg
        .measure
        .nig_params()
        .ok_or_else(|| Error::Config("fig1 needs an NIG measure".into()))??;
    if fc.costs.is_empty() {
        return Err(Error::Config("fig1 needs at least one cost".into()));
    }
    let measure = r.cfg.measure.build()?;
    let p = r.cfg.sde()?;
    let out = r.out_dir()?;

    let mut curves = Vec::new();
    let mut eps_min = f64::INFINITY;
    let mut grids = Vec::new();
    for (name, kind) in [
        ("three_moment", SchemeKind::ThreeMoment),
        ("gaussian_compensation", SchemeKind::GaussianCompensation),
    ] {
        let mut grid = Vec::new();
        let mut skipped = Vec::new();
        for &c in &fc.costs {
            match epsilon_for_intensity(&measure, kind, 0, c)? {
                Some(e) => {
                    eps_min = eps_min.min(e);
                    grid.push(e);
                }
                None => skipped.push(c),
            }
        }
        grids.push((name, kind, grid, skipped));
    }
    let steps: Vec<f64> = fc.costs.iter().map(|c| c.round().max(1.0)).collect();
    let reference = resolve_reference(
        &fc.reference,
        &measure,
        &p,
        eps_min.is_finite().then_some(eps_min),
        r.n_paths,
        r.seed,
        r.workers,
    )?;
    for (name, kind, grid, skipped) in grids {
        let fam = Family::JumpAdapted {
            measure: measure.clone(),
            kind,
            n: 0,
        };
        let rows = if grid.is_empty() {
            Vec::new()
        } else {
            convergence_study(&p, &fam, &grid, r.n_paths, r.seed, reference, r.workers)?.rows
        };
        curves.push(Curve {
            name,
            rows: sort_by_cost(rows),
            skipped_costs: skipped,
        });
    }
    let euler = convergence_study(&p, &Family::Euler { nig }, &steps, r.n_paths, r.seed, reference, r.workers)?;
    curves.push(Curve {
        name: "euler",
        rows: euler.rows,
        skipped_costs: Vec::new(),
    });

    let noise_floor = curves
        .iter()
        .flat_map(|c| c.rows.iter().map(|row| 2.0 * row.noise(&reference)))
        .fold(0.0, f64::max);
    let result = Fig1Result {
        label: FIG1_LABEL,
        reference,
        noise_floor,
        costs: fc.costs.clone(),
        curves,
    };

    for (c, file) in result.curves.iter().zip(FIG1_FILES) {
        write_csv(&out.join(file), &c.rows, r.timing)?;
    }
    let mut meta = json!({
        "label": FIG1_LABEL,
        "version": VERSION,
        "rng": RNG_NAME,
        "seed": r.seed,
        "n_paths": r.n_paths,
        "measure": r.cfg.measure,
        "nig": nig,
        "sde": r.cfg.sde,
        "costs": fc.costs,
        "reference": reference,
        "noise_floor": noise_floor,
        "curves": result.curves.iter().map(|c| json!({
            "name": c.name,
            "file": format!("{}.csv", c.name),
            "skipped_costs": c.skipped_costs,
        })).collect::<Vec<_>>(),
        "summary": result.summary(),
    });
    if r.timing {
        meta["wall_time_s"] = json!(result
            .curves
            .iter()
            .map(|c| (c.name, c.rows.iter().map(|x| x.wall_time_s).collect::<Vec<_>>()))
            .collect::<std::collections::BTreeMap<_, _>>());
    }
    write_text(&out.join("fig1_meta.json"), &pretty(&meta)?)?;
    if r.gnuplot {
        write_text(&out.join("fig1.gp"), &gnuplot_script(noise_floor))?;
    }
    Ok(result)
}

fn sort_by_cost(mut rows: Vec<ConvergenceRow>) -> Vec<ConvergenceRow> {
    rows.sort_by(|a, b| a.cost().total_cmp(&b.cost()));
    rows
}

fn gnuplot_script(floor: f64) -> String {
    format!(
        "set datafile separator ','\n\
         set logscale xy\n\
         set key top right\n\
         set xlabel 'expected events per path'\n\
         set ylabel 'absolute error'\n\
         floor = {floor:e}\n\
         plot 'three_moment.csv' skip 1 using 2:5 with linespoints pt 2 title '3-moment', \\\n\
         \x20    'gaussian_compensation.csv' skip 1 using 2:5 with linespoints pt 6 title 'Gaussian compensation', \\\n\
         \x20    'euler.csv' skip 1 using 1:5 with linespoints pt 12 title 'Euler', \\\n\
         \x20    floor with lines dt 2 title 'noise floor'\n"
    )
}

// ---------------------------------------------------------------------------
// optimality

pub fn cmd_optimality(r: &Resolved) -> Result<Vec<RatioRow>> {
    let oc = r
        .cfg
        .optimality
        .as_ref()
        .ok_or_else(|| Error::Config("missing \"optimality\" section".into()))?;
    let nu = r.cfg.measure.build()?;
    let rows = optimality_ratio(&nu, &oc.epsilons)?;
    if r.out.is_some() {
        let d = r.out_dir()?;
        write_ratio_csv(&rows, BufWriter::new(File::create(d.join("optimality.csv"))?))?;
    }
    Ok(rows)
}
