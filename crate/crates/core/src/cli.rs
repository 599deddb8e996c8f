//! Run configurations, the five run modes, and their JSON/CSV output.
//!
//! A run is described entirely by a JSON [`RunConfig`]; the command line only
//! names the file and overrides the seed, thread count, output path and
//! format.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, RunReport, WindowConfig, SCHEMA_VERSION};
use crate::optimizer::{self, Bounds, GaConfig};
use crate::scheme::{self, SchemeKind, SchemeParams, DEFAULT_N_CSS};
use crate::state::DEFAULT_N_MAX;
use crate::tables::{self, PublishedRow, TableId};
use crate::targets::TargetSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Optimize,
    Evaluate,
    ProbSweep,
    SqvacApprox,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Explicit setup parameters; the setup itself comes from `scheme`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha: f64,
    pub phi: f64,
    pub x1: f64,
    pub x2: f64,
    #[serde(default)]
    pub x3: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub n_css: Option<usize>,
}

impl ParamsConfig {
    pub fn with_kind(&self, kind: SchemeKind) -> SchemeParams {
        SchemeParams {
            kind,
            alpha: self.alpha,
            phi: self.phi,
            x1: self.x1,
            x2: self.x2,
            x3: self.x3,
            r: self.r,
            gamma: self.gamma,
            n_css: self.n_css.unwrap_or(DEFAULT_N_CSS),
        }
    }
}

/// Squeezed-vacuum approximation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqvacConfig {
    pub r: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_sqvac_n")]
    pub n: Vec<usize>,
}

fn default_sqvac_n() -> Vec<usize> {
    vec![1, 3, 5, 7]
}

fn default_refine_starts() -> usize {
    16
}

/// Everything a run needs. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub schema_version: Option<u32>,
    pub mode: Mode,
    #[serde(default)]
    pub scheme: Option<SchemeKind>,
    /// Target in text form, e.g. `"AS(1,2,1)"` or `"psi012'"`.
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default)]
    pub params: Option<ParamsConfig>,
    /// Published row such as `"III.6"`, in place of `scheme`/`target`/`params`.
    #[serde(default)]
    pub row: Option<String>,
    /// Move a published row's parameters within their printed rounding.
    #[serde(default)]
    pub refine: bool,
    #[serde(default = "default_refine_starts")]
    pub refine_starts: usize,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub fixed_phi: Option<f64>,
    #[serde(default)]
    pub window: Option<WindowConfig>,
    /// Window half-widths of a probability sweep.
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub sqvac: Option<SqvacConfig>,
    #[serde(default)]
    pub table: Option<String>,
    /// Also run the optimizer for every row in table mode.
    #[serde(default)]
    pub table_optimize: bool,
    /// Output file; `--out` takes precedence, stdout otherwise.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub rng_seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("run config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn minimal(mode: Mode) -> Self {
        Self {
            schema_version: None,
            mode,
            scheme: None,
            target: None,
            params: None,
            row: None,
            refine: false,
            refine_starts: default_refine_starts(),
            bounds: Bounds::default(),
            ga: GaConfig::default(),
            fixed_phi: None,
            window: None,
            deltas: Vec::new(),
            sqvac: None,
            table: None,
            table_optimize: false,
            output: None,
            rng_seed: None,
        }
    }

    fn need<T: Clone>(v: &Option<T>, what: &str, mode: &str) -> Result<T> {
        v.clone()
            .ok_or_else(|| Error::Config(format!("mode {mode} needs '{what}'")))
    }

    fn published_row(&self) -> Result<Option<&'static PublishedRow>> {
        match &self.row {
            None => Ok(None),
            Some(id) => tables::row(id)
                .map(Some)
                .ok_or_else(|| Error::Config(format!("unknown published row '{id}'"))),
        }
    }

    fn target_spec(&self) -> Result<TargetSpec> {
        if let Some(r) = self.published_row()? {
            return Ok(r.target_spec());
        }
        Self::need(&self.target, "target", "this")?.parse()
    }

    /// Schema and consistency checks that need no numerics.
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.schema_version {
            if v != SCHEMA_VERSION {
                return Err(Error::Config(format!(
                    "schema_version {v} not supported (expected {SCHEMA_VERSION})"
                )));
            }
        }
        self.bounds.validate()?;
        self.ga.validate()?;
        if let Some(w) = &self.window {
            w.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.published_row()?;
        if let Some(t) = &self.target {
            t.parse::<TargetSpec>()?;
        }
        let has_setup = self.row.is_some() || (self.scheme.is_some() && self.target.is_some());
        match self.mode {
            Mode::Optimize => {
                if self.scheme.is_none() || self.target.is_none() {
                    return Err(Error::Config("mode optimize needs 'scheme' and 'target'".into()));
                }
            }
            Mode::Evaluate | Mode::ProbSweep => {
                if !has_setup || (self.row.is_none() && self.params.is_none()) {
                    return Err(Error::Config(
                        "needs either 'row' or 'scheme', 'target' and 'params'".into(),
                    ));
                }
                if self.mode == Mode::ProbSweep {
                    if self.deltas.is_empty() {
                        return Err(Error::Config("mode prob-sweep needs 'deltas'".into()));
                    }
                    if self.deltas.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(Error::Config("'deltas' must be strictly increasing".into()));
                    }
                }
            }
            Mode::SqvacApprox => {
                Self::need(&self.sqvac, "sqvac", "sqvac-approx")?;
            }
            Mode::Table => {
                Self::need(&self.table, "table", "table")?.parse::<TableId>()?;
            }
        }
        Ok(())
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub format: Option<Format>,
}

/// Rendered result of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub format: Format,
    pub body: String,
    /// One-paragraph human summary.
    pub summary: String,
    /// Table mode: some row missed its tolerance.
    pub tolerance_miss: bool,
}

/// `%.12e`-style formatting, independent of locale.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.12e}")
}

fn seed_of(cfg: &RunConfig, opts: &RunOptions) -> u64 {
    opts.seed.or(cfg.rng_seed).unwrap_or(cfg.ga.rng_seed)
}

/// Execute a validated configuration.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    cfg.validate()?;
    let go = || match cfg.mode {
        Mode::Optimize => cmd_optimize(cfg, opts),
        Mode::Evaluate => cmd_evaluate(cfg, opts),
        Mode::ProbSweep => cmd_prob_sweep(cfg, opts),
        Mode::SqvacApprox => cmd_sqvac(cfg, opts),
        Mode::Table => cmd_table(cfg, opts),
    };
    match opts.jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("--jobs: {e}")))?
            .install(go),
        _ => go(),
    }
}

const REPORT_COLUMNS: &str = "schema_version,target,scheme,alpha,phi,beta,x1,x2,x3,r,gamma,n_css,epsilon,overall_p,degenerate_windows,epsilon_avg,delta,grid_points,p1,p2,p3";

fn report_csv_row(r: &RunReport) -> String {
    let p = &r.params;
    let pm = |i: usize| r.per_measurement_p.get(i).map(|v| fmt_num(*v)).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.schema_version,
        csv_field(&r.target),
        p.kind.name(),
        fmt_num(p.alpha),
        fmt_num(p.phi),
        fmt_num(r.beta),
        fmt_num(p.x1),
        fmt_num(p.x2),
        fmt_num(p.x3),
        fmt_num(p.r),
        fmt_num(p.gamma),
        p.n_css,
        fmt_num(r.epsilon),
        fmt_num(r.overall_p),
        r.degenerate_windows,
        fmt_num(r.epsilon_avg),
        fmt_num(r.delta),
        r.grid_points,
        pm(0),
        pm(1),
        pm(2)
    )
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_report(r: &RunReport, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => Ok(format!("{REPORT_COLUMNS}\n{}\n", report_csv_row(r))),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(e.to_string()))
}

fn summarize(r: &RunReport) -> String {
    let p = &r.params;
    format!(
        "{} on {}: epsilon = {:.3e}, alpha = {:.6}, phi = {:.6e}, beta = {:.4}, x = {:?}, P = {:.3e} (delta = {}), epsilon_avg = {:.3e}",
        r.target,
        p.kind.name(),
        r.epsilon,
        p.alpha,
        p.phi,
        r.beta,
        p.outcomes(),
        r.overall_p,
        r.delta,
        r.epsilon_avg
    )
}

/// Run the optimizer and report the best point.
pub fn cmd_optimize(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    let kind = RunConfig::need(&cfg.scheme, "scheme", "optimize")?;
    let label = RunConfig::need(&cfg.target, "target", "optimize")?;
    let target = cfg.target_spec()?;
    let window = RunConfig::need(&cfg.window, "window", "optimize")?;
    let mut ga = cfg.ga;
    ga.rng_seed = seed_of(cfg, opts);
    let best = match cfg.fixed_phi {
        Some(phi) => optimizer::reoptimize_fixed_phi(kind, &target, &cfg.bounds, &ga, phi)?,
        None => optimizer::optimize(kind, &target, &cfg.bounds, &ga)?,
    };
    let mut report = metrics::evaluate(
        &best.params,
        &label,
        &target.build(optimizer::FINAL_N_MAX)?,
        &window,
    )?;
    report.epsilon = best.epsilon;
    report.optimizer = Some(best.summary);
    let format = opts.format.unwrap_or(Format::Json);
    Ok(RunOutput {
        format,
        body: render_report(&report, format)?,
        summary: summarize(&report),
        tolerance_miss: false,
    })
}

/// Parameters for evaluate/sweep: explicit, or a published row (optionally
/// refined within its rounding).
fn resolve_params(cfg: &RunConfig, opts: &RunOptions) -> Result<(SchemeParams, String, TargetSpec)> {
    if let Some(row) = cfg.published_row()? {
        let p = if cfg.refine {
            tables::refine_row(row, cfg.refine_starts, seed_of(cfg, opts))?.0
        } else {
            row.params()
        };
        return Ok((p, row.target.to_string(), row.target_spec()));
    }
    let kind = RunConfig::need(&cfg.scheme, "scheme", "evaluate")?;
    let params = RunConfig::need(&cfg.params, "params", "evaluate")?.with_kind(kind);
    params.validate()?;
    let label = RunConfig::need(&cfg.target, "target", "evaluate")?;
    Ok((params, label, cfg.target_spec()?))
}

fn window_for(cfg: &RunConfig) -> Result<WindowConfig> {
    if let Some(w) = cfg.window {
        return Ok(w);
    }
    match cfg.published_row()?.and_then(|r| r.window) {
        Some(w) => Ok(WindowConfig::new(w.delta)),
        None => Err(Error::Config("a 'window' is required".into())),
    }
}

/// Misfit, window probabilities and average misfit at given parameters.
pub fn cmd_evaluate(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    let (p, label, target) = resolve_params(cfg, opts)?;
    let report = metrics::evaluate(&p, &label, &target.build(DEFAULT_N_MAX)?, &window_for(cfg)?)?;
    let format = opts.format.unwrap_or(Format::Json);
    Ok(RunOutput {
        format,
        body: render_report(&report, format)?,
        summary: summarize(&report),
        tolerance_miss: false,
    })
}

/// One line of a probability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub delta: f64,
    pub overall_p: f64,
    pub epsilon_avg: f64,
    pub per_measurement_p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub target: String,
    pub params: SchemeParams,
    pub grid_points: usize,
    pub points: Vec<SweepPoint>,
}

pub const SWEEP_COLUMNS: &str = "schema_version,delta,overall_p,epsilon_avg,p1,p2,p3";

/// `(δ, P, ε_avg)` over a list of window half-widths.
pub fn prob_sweep(
    p: &SchemeParams,
    target: &crate::state::FockVector,
    deltas: &[f64],
    grid_points: usize,
) -> Result<Vec<SweepPoint>> {
    deltas
        .iter()
        .map(|&d| {
            let w = WindowConfig::with_grid(d, grid_points);
            let probs = metrics::overall_probability(p, &w)?;
            Ok(SweepPoint {
                delta: d,
                overall_p: probs.overall_p,
                epsilon_avg: metrics::average_misfit(p, target, &w)?,
                per_measurement_p: probs.per_measurement_p,
            })
        })
        .collect()
}

pub fn cmd_prob_sweep(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    let (p, label, target) = resolve_params(cfg, opts)?;
    let grid = cfg.window.map_or(metrics::DEFAULT_GRID_POINTS, |w| w.grid_points);
    let points = prob_sweep(&p, &target.build(DEFAULT_N_MAX)?, &cfg.deltas, grid)?;
    let format = opts.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Json => to_json(&SweepReport {
            schema_version: SCHEMA_VERSION,
            target: label.clone(),
            params: p,
            grid_points: grid,
            points: points.clone(),
        })?,
        Format::Csv => {
            let mut s = format!("{SWEEP_COLUMNS}\n");
            for pt in &points {
                let pm = |i: usize| pt.per_measurement_p.get(i).map(|v| fmt_num(*v)).unwrap_or_default();
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    SCHEMA_VERSION,
                    fmt_num(pt.delta),
                    fmt_num(pt.overall_p),
                    fmt_num(pt.epsilon_avg),
                    pm(0),
                    pm(1),
                    pm(2)
                )
                .unwrap();
            }
            s
        }
    };
    Ok(RunOutput {
        format,
        body,
        summary: format!("{} sweep points for {label} on {}", points.len(), p.kind.name()),
        tolerance_miss: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqvacRow {
    pub r: f64,
    pub theta: f64,
    pub n: usize,
    pub gamma: f64,
    pub epsilon: f64,
}

pub const SQVAC_COLUMNS: &str = "schema_version,r,theta,n,gamma,epsilon";

pub fn cmd_sqvac(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    let sq = RunConfig::need(&cfg.sqvac, "sqvac", "sqvac-approx")?;
    let jobs: Vec<(f64, usize)> = sq
        .r
        .iter()
        .flat_map(|&r| sq.n.iter().map(move |&n| (r, n)))
        .collect();
    let rows: Vec<SqvacRow> = jobs
        .par_iter()
        .map(|&(r, n)| {
            scheme::squeezed_vacuum_css(r, sq.theta, n, None).map(|s| SqvacRow {
                r,
                theta: sq.theta,
                n,
                gamma: s.gamma,
                epsilon: s.epsilon,
            })
        })
        .collect::<Result<_>>()?;
    let format = opts.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Json => to_json(&serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "rows": rows,
        }))?,
        Format::Csv => {
            let mut s = format!("{SQVAC_COLUMNS}\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    SCHEMA_VERSION,
                    fmt_num(r.r),
                    fmt_num(r.theta),
                    r.n,
                    fmt_num(r.gamma),
                    fmt_num(r.epsilon)
                )
                .unwrap();
            }
            s
        }
    };
    Ok(RunOutput {
        format,
        body,
        summary: format!("{} squeezed-vacuum approximations", rows.len()),
        tolerance_miss: false,
    })
}

/// Reproduction of one published row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRowResult {
    pub table: String,
    pub row: usize,
    pub state: String,
    pub scheme: SchemeKind,
    pub epsilon_published: f64,
    /// Misfit at the parameters exactly as printed.
    pub epsilon_printed: f64,
    /// Best misfit within the printed rounding of every parameter.
    pub epsilon_refined: f64,
    pub tolerance_factor: f64,
    pub within_tolerance: bool,
    pub beta_published: f64,
    pub beta_printed: f64,
    pub refined: SchemeParams,
    pub delta: Option<f64>,
    pub p_published: Option<f64>,
    pub p_achieved: Option<f64>,
    pub epsilon_avg_published: Option<f64>,
    pub epsilon_avg_achieved: Option<f64>,
    /// Fresh optimizer run, when requested.
    pub epsilon_optimized: Option<f64>,
}

pub const TABLE_COLUMNS: &str = "schema_version,table,row,state,scheme,epsilon_published,epsilon_printed,epsilon_refined,tolerance_factor,within_tolerance,beta_published,beta_printed,alpha,phi,r,gamma,x1,x2,x3,delta,p_published,p_achieved,epsilon_avg_published,epsilon_avg_achieved,epsilon_optimized";

fn row_seed(seed: u64, row: &PublishedRow) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((row.table as u64) << 16 | row.row as u64)
}

/// Evaluate (and optionally re-optimize) one published row.
pub fn reproduce_row(
    row: &PublishedRow,
    refine_starts: usize,
    seed: u64,
    optimize_with: Option<(&Bounds, &GaConfig)>,
    grid_points: usize,
) -> Result<TableRowResult> {
    let target = row.target_spec().build(DEFAULT_N_MAX)?;
    let printed = row.params();
    let epsilon_printed = tables::misfit(&printed, &target);
    let (refined, epsilon_refined) = tables::refine_row(row, refine_starts, row_seed(seed, row))?;
    let factor = row.tolerance_factor();
    let within_tolerance =
        epsilon_refined <= factor * row.epsilon && epsilon_refined >= row.epsilon / factor;
    let (mut p_achieved, mut epsilon_avg_achieved) = (None, None);
    if let Some(w) = row.window {
        let wc = WindowConfig::with_grid(w.delta, grid_points);
        p_achieved = metrics::overall_probability(&refined, &wc).ok().map(|p| p.overall_p);
        epsilon_avg_achieved = metrics::average_misfit(&refined, &target, &wc).ok();
    }
    let epsilon_optimized = match optimize_with {
        Some((bounds, ga)) => {
            let mut ga = *ga;
            ga.rng_seed = row_seed(seed, row);
            Some(optimizer::optimize(row.kind(), &row.target_spec(), bounds, &ga)?.epsilon)
        }
        None => None,
    };
    Ok(TableRowResult {
        table: row.table.to_string(),
        row: row.row,
        state: row.state.to_string(),
        scheme: row.kind(),
        epsilon_published: row.epsilon,
        epsilon_printed,
        epsilon_refined,
        tolerance_factor: factor,
        within_tolerance,
        beta_published: row.beta,
        beta_printed: printed.beta(),
        refined,
        delta: row.window.map(|w| w.delta),
        p_published: row.window.map(|w| w.p),
        p_achieved,
        epsilon_avg_published: row.window.map(|w| w.epsilon_avg),
        epsilon_avg_achieved,
        epsilon_optimized,
    })
}

fn opt_num(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn table_csv(rows: &[TableRowResult]) -> String {
    let mut s = format!("{TABLE_COLUMNS}\n");
    for r in rows {
        let p = &r.refined;
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            SCHEMA_VERSION,
            r.table,
            r.row,
            csv_field(&r.state),
            r.scheme.name(),
            fmt_num(r.epsilon_published),
            fmt_num(r.epsilon_printed),
            fmt_num(r.epsilon_refined),
            fmt_num(r.tolerance_factor),
            r.within_tolerance,
            fmt_num(r.beta_published),
            fmt_num(r.beta_printed),
            fmt_num(p.alpha),
            fmt_num(p.phi),
            fmt_num(p.r),
            fmt_num(p.gamma),
            fmt_num(p.x1),
            fmt_num(p.x2),
            fmt_num(p.x3),
            opt_num(r.delta),
            opt_num(r.p_published),
            opt_num(r.p_achieved),
            opt_num(r.epsilon_avg_published),
            opt_num(r.epsilon_avg_achieved),
            opt_num(r.epsilon_optimized)
        )
        .unwrap();
    }
    s
}

pub fn cmd_table(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    let id: TableId = RunConfig::need(&cfg.table, "table", "table")?.parse()?;
    let seed = seed_of(cfg, opts);
    let grid = cfg.window.map_or(metrics::DEFAULT_GRID_POINTS, |w| w.grid_points);
    let optimize_with = cfg.table_optimize.then_some((&cfg.bounds, &cfg.ga));
    let rows: Vec<&PublishedRow> = tables::rows(id).collect();
    let results: Vec<TableRowResult> = rows
        .par_iter()
        .map(|r| reproduce_row(r, cfg.refine_starts, seed, optimize_with, grid))
        .collect::<Result<_>>()?;
    let misses: Vec<String> = results
        .iter()
        .filter(|r| !r.within_tolerance)
        .map(|r| format!("{}.{}", r.table, r.row))
        .collect();
    let format = opts.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Csv => table_csv(&results),
        Format::Json => to_json(&serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "table": id.to_string(),
            "rows": results,
        }))?,
    };
    let summary = if misses.is_empty() {
        format!("table {id}: all {} rows within tolerance", results.len())
    } else {
        format!(
            "table {id}: {} of {} rows within tolerance; outside: {}",
            results.len() - misses.len(),
            results.len(),
            misses.join(", ")
        )
    };
    Ok(RunOutput {
        format,
        body,
        summary,
        tolerance_miss: !misses.is_empty(),
    })
}

/// Command-line arguments of the `css-eng` binary.
#[derive(Debug, Parser)]
#[command(name = "css-eng", version, about = "Conditional coherent-state-superposition engineering")]
pub struct Args {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Master RNG seed (overrides the configuration).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Machine-readable error line.
pub fn error_json(e: &Error) -> String {
    let kind = match e {
        Error::TailTooHeavy { .. } => "tail_too_heavy",
        Error::NotNormalized { .. } => "not_normalized",
        Error::DegenerateSuperposition { .. } => "degenerate_superposition",
        Error::AllOutcomesDegenerate => "all_outcomes_degenerate",
        Error::TargetUnbuildable(_) => "target_unbuildable",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
    };
    serde_json::json!({ "error": kind, "message": e.to_string(), "exit_code": exit_code(e) })
        .to_string()
}

/// Full command-line flow; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    let outcome = (|| -> Result<RunOutput> {
        let text = std::fs::read_to_string(&args.config)
            .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
        let cfg = RunConfig::from_json(&text)?;
        let opts = RunOptions {
            seed: args.seed,
            jobs: args.jobs,
            format: args.format,
        };
        let out = run(&cfg, &opts)?;
        match args.out.as_ref().or(cfg.output.as_ref()) {
            Some(path) => std::fs::write(path, &out.body)?,
            None => print!("{}", out.body),
        }
        Ok(out)
    })();
    match outcome {
        Ok(out) => {
            eprintln!("{}", out.summary);
            if out.tolerance_miss {
                EXIT_TOLERANCE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}
