//! Seeded genetic search over setup parameters, plus the small local
//! minimizers used around it.
//!
//! The output of either setup depends on `(α, φ)` only through
//! `β = α sin(φ/2)` and the interference phase `Φ = α² sin φ = 2β² cot(φ/2)`
//! (mod 2π). The genome therefore carries `(β, Φ, φ)`; decoding moves `β` to
//! the nearest value reproducing `Φ` at the given `φ` and reconstructs
//! `α = β / sin(φ/2)`. `φ` itself only sets the scale of `α`.

use std::f64::consts::{PI, TAU};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{self, SchemeKind, SchemeParams, DEFAULT_N_CSS};
use crate::state::{FockVector, DEFAULT_N_MAX};
use crate::targets::TargetSpec;

/// Truncation used for the final re-evaluation of the best point.
pub const FINAL_N_MAX: usize = 96;

/// Closed search intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bounds {
    pub x: (f64, f64),
    pub phi: (f64, f64),
    pub beta: (f64, f64),
    pub r: (f64, f64),
    pub gamma: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            x: (-10.0, 10.0),
            phi: (5e-4, 5e-2),
            beta: (0.05, 2.5),
            r: (0.0, 1.5),
            gamma: (0.1, 2.0),
        }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("x", self.x),
            ("phi", self.phi),
            ("beta", self.beta),
            ("r", self.r),
            ("gamma", self.gamma),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("bounds.{name}: need lower < upper")));
            }
        }
        if self.phi.0 <= 0.0 || self.phi.1 >= PI || self.beta.0 <= 0.0 || self.r.0 < 0.0 {
            return Err(Error::Config(
                "bounds: phi must lie in (0, pi), beta > 0, r >= 0".into(),
            ));
        }
        if self.gamma.0 <= 0.0 {
            return Err(Error::Config("bounds.gamma must be positive".into()));
        }
        Ok(())
    }
}

/// Genetic-algorithm settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Mutation step as a fraction of each gene's interval.
    pub mutation_sigma: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub restarts: usize,
    pub rng_seed: u64,
    /// Stop a restart after this many generations without improvement.
    pub stall_generations: usize,
    /// Finish the best restart with a Nelder–Mead descent.
    pub polish: bool,
    /// Constituents of the squeezed-vacuum superposition (setup 2).
    pub n_css: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 200,
            generations: 1500,
            tournament_size: 4,
            crossover_rate: 0.9,
            mutation_sigma: 0.05,
            mutation_rate: 0.15,
            elitism: 2,
            restarts: 10,
            rng_seed: 0,
            stall_generations: 200,
            polish: true,
            n_css: DEFAULT_N_CSS,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(format!("ga: {m}")));
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return err("population must be even and >= 4");
        }
        if self.elitism >= self.population || !self.elitism.is_multiple_of(2) {
            return err("elitism must be even and smaller than the population");
        }
        if self.tournament_size == 0 || self.tournament_size > self.population {
            return err("tournament_size must lie in 1..=population");
        }
        for (name, v) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
            ("mutation_sigma", self.mutation_sigma),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return err(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.restarts == 0 || self.generations == 0 {
            return err("restarts and generations must be positive");
        }
        if self.n_css == 0 || self.n_css.is_multiple_of(2) {
            return err("n_css must be odd");
        }
        Ok(())
    }
}

/// `β` closest to `beta_c` with `2β² cot(φ/2) ≡ big_phi (mod 2π)`.
pub fn snap_beta(beta_c: f64, big_phi: f64, phi: f64) -> f64 {
    let t = (0.5 * phi).tan();
    let p0 = 2.0 * beta_c * beta_c / t;
    let mut p = big_phi + TAU * ((p0 - big_phi) / TAU).round();
    while p <= 0.0 {
        p += TAU;
    }
    (0.5 * p * t).sqrt()
}

/// Search space and objective for one (setup, target) pair.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: SchemeKind,
    pub target: FockVector,
    pub bounds: Bounds,
    pub fixed_phi: Option<f64>,
    pub n_css: usize,
}

impl Problem {
    pub fn new(kind: SchemeKind, target: FockVector, bounds: Bounds) -> Self {
        Self {
            kind,
            target,
            bounds,
            fixed_phi: None,
            n_css: DEFAULT_N_CSS,
        }
    }

    pub fn dim(&self) -> usize {
        if self.kind.is_s1() {
            6
        } else {
            7
        }
    }

    /// Per-gene intervals: `β, Φ, φ, [r, γ], x…`.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let b = &self.bounds;
        let mut v = vec![b.beta, (0.0, TAU), self.fixed_phi.map_or(b.phi, |p| (p, p))];
        if !self.kind.is_s1() {
            v.push(b.r);
            v.push(b.gamma);
        }
        v.resize(self.dim(), b.x);
        v
    }

    /// Map genes (clamped into their intervals, `Φ` wrapped) to parameters.
    pub fn decode(&self, g: &[f64]) -> SchemeParams {
        let iv = self.intervals();
        let c = |i: usize| g[i].clamp(iv[i].0, iv[i].1);
        let phi = self.fixed_phi.unwrap_or_else(|| c(2));
        let beta = snap_beta(c(0), g[1].rem_euclid(TAU), phi);
        let alpha = beta / (0.5 * phi).sin();
        if self.kind.is_s1() {
            SchemeParams::s1(self.kind, alpha, phi, [c(3), c(4), c(5)])
        } else {
            let mut p = SchemeParams::s2(self.kind, alpha, phi, c(3), c(4), [c(5), c(6)]);
            p.n_css = self.n_css;
            p
        }
    }

    /// Inverse of [`Problem::decode`] up to the snapping.
    pub fn encode(&self, p: &SchemeParams) -> Vec<f64> {
        let mut g = vec![p.beta(), p.interference_phase().rem_euclid(TAU), p.phi];
        if !self.kind.is_s1() {
            g.push(p.r);
            g.push(p.gamma);
        }
        g.extend(p.outcomes());
        g
    }

    /// Misfit of the decoded output; degenerate points score 1.
    pub fn objective(&self, g: &[f64]) -> f64 {
        misfit_at(&self.decode(g), &self.target)
    }
}

/// Misfit of the output at `p`, with 1 for degenerate or invalid points.
pub fn misfit_at(p: &SchemeParams, target: &FockVector) -> f64 {
    scheme::raw_output(p)
        .and_then(|s| s.misfit_against(target))
        .unwrap_or(1.0)
}

/// Bookkeeping of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSummary {
    pub rng_seed: u64,
    pub restarts: usize,
    pub best_restart: usize,
    /// Best objective reached by each restart.
    pub restart_best: Vec<f64>,
    /// Generations run by each restart.
    pub generations: Vec<usize>,
    /// Best-so-far objective per generation of the winning restart.
    pub history: Vec<f64>,
    pub polished: bool,
    pub fixed_phi: Option<f64>,
    /// Final misfit at the search truncation.
    pub epsilon_search: f64,
    pub n_max_search: usize,
    pub n_max_final: usize,
}

/// Outcome of [`optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub params: SchemeParams,
    /// Misfit re-evaluated at [`FINAL_N_MAX`].
    pub epsilon: f64,
    pub summary: OptimizerSummary,
}

struct RestartResult {
    genes: Vec<f64>,
    cost: f64,
    history: Vec<f64>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for (restart, generation, slot).
fn stream(seed: u64, restart: usize, generation: usize, slot: usize) -> ChaCha8Rng {
    let key = splitmix(splitmix(seed ^ splitmix(restart as u64)) ^ generation as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(slot as u64);
    rng
}

fn evaluate_all(problem: &Problem, pop: &[Vec<f64>]) -> Vec<f64> {
    pop.par_iter().map(|g| problem.objective(g)).collect()
}

fn tournament(costs: &[f64], k: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.random_range(0..costs.len());
    for _ in 1..k {
        let c = rng.random_range(0..costs.len());
        if costs[c] < costs[best] || (costs[c] == costs[best] && c < best) {
            best = c;
        }
    }
    best
}

fn mutate(g: &mut [f64], iv: &[(f64, f64)], cfg: &GaConfig, rng: &mut ChaCha8Rng) {
    for (i, x) in g.iter_mut().enumerate() {
        let (lo, hi) = iv[i];
        let width = hi - lo;
        if width <= 0.0 || !rng.random_bool(cfg.mutation_rate) {
            continue;
        }
        let step = Normal::new(0.0, cfg.mutation_sigma * width).unwrap().sample(rng);
        *x = if i == 1 {
            (*x + step).rem_euclid(TAU)
        } else {
            (*x + step).clamp(lo, hi)
        };
    }
}

/// Blend crossover with a 50% overhang.
fn crossover(a: &[f64], b: &[f64], iv: &[(f64, f64)], rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    for i in 0..a.len() {
        let (lo, hi) = (a[i].min(b[i]), a[i].max(b[i]));
        let d = hi - lo;
        let pick = |rng: &mut ChaCha8Rng| {
            let v = rng.random_range(lo - 0.5 * d..=hi + 0.5 * d);
            if i == 1 {
                v.rem_euclid(TAU)
            } else {
                v.clamp(iv[i].0, iv[i].1)
            }
        };
        c1[i] = pick(rng);
        c2[i] = pick(rng);
    }
    (c1, c2)
}

fn run_restart(problem: &Problem, cfg: &GaConfig, restart: usize) -> RestartResult {
    let iv = problem.intervals();
    let n = cfg.population;
    let mut pop: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut rng = stream(cfg.rng_seed, restart, 0, i);
            iv.iter()
                .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo })
                .collect()
        })
        .collect();
    let mut costs = evaluate_all(problem, &pop);
    let mut history = Vec::with_capacity(cfg.generations);
    let mut best = f64::INFINITY;
    let mut stall = 0;
    for generation in 1..=cfg.generations {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
        let gen_best = costs[order[0]];
        if gen_best < best * (1.0 - 1e-12) {
            best = gen_best;
            stall = 0;
        } else {
            stall += 1;
        }
        history.push(best);
        if stall >= cfg.stall_generations {
            break;
        }
        let mut next: Vec<Vec<f64>> = order[..cfg.elitism].iter().map(|&i| pop[i].clone()).collect();
        let mut next_costs: Vec<f64> = order[..cfg.elitism].iter().map(|&i| costs[i]).collect();
        let children: Vec<Vec<f64>> = (0..(n - cfg.elitism) / 2)
            .flat_map(|slot| {
                let mut rng = stream(cfg.rng_seed, restart, generation, slot);
                let a = tournament(&costs, cfg.tournament_size, &mut rng);
                let b = tournament(&costs, cfg.tournament_size, &mut rng);
                let (mut c1, mut c2) = if rng.random_bool(cfg.crossover_rate) {
                    crossover(&pop[a], &pop[b], &iv, &mut rng)
                } else {
                    (pop[a].clone(), pop[b].clone())
                };
                mutate(&mut c1, &iv, cfg, &mut rng);
                mutate(&mut c2, &iv, cfg, &mut rng);
                [c1, c2]
            })
            .collect();
        next_costs.extend(evaluate_all(problem, &children));
        next.extend(children);
        pop = next;
        costs = next_costs;
    }
    let i = (0..n)
        .min_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)))
        .unwrap();
    RestartResult {
        genes: pop[i].clone(),
        cost: costs[i],
        history,
    }
}

/// Best of `restarts` seeded GA runs, optionally polished, re-scored at
/// [`FINAL_N_MAX`].
pub fn optimize(
    kind: SchemeKind,
    target: &TargetSpec,
    bounds: &Bounds,
    cfg: &GaConfig,
) -> Result<Optimized> {
    run(kind, target, bounds, cfg, None)
}

/// As [`optimize`] with `φ` frozen; only `α`, the outcomes (and `r, γ`) move.
pub fn reoptimize_fixed_phi(
    kind: SchemeKind,
    target: &TargetSpec,
    bounds: &Bounds,
    cfg: &GaConfig,
    phi_fixed: f64,
) -> Result<Optimized> {
    if !(phi_fixed > 0.0 && phi_fixed < PI) {
        return Err(Error::InvalidArgument(format!("phi must lie in (0, pi), got {phi_fixed}")));
    }
    run(kind, target, bounds, cfg, Some(phi_fixed))
}

fn run(
    kind: SchemeKind,
    target: &TargetSpec,
    bounds: &Bounds,
    cfg: &GaConfig,
    fixed_phi: Option<f64>,
) -> Result<Optimized> {
    bounds.validate()?;
    cfg.validate()?;
    let mut problem = Problem::new(kind, target.build(DEFAULT_N_MAX)?, *bounds);
    problem.fixed_phi = fixed_phi;
    problem.n_css = cfg.n_css;

    let runs: Vec<RestartResult> = (0..cfg.restarts).map(|r| run_restart(&problem, cfg, r)).collect();
    let best_restart = (0..runs.len())
        .min_by(|&a, &b| runs[a].cost.total_cmp(&runs[b].cost).then(a.cmp(&b)))
        .unwrap();
    let mut genes = runs[best_restart].genes.clone();
    let mut cost = runs[best_restart].cost;
    if cfg.polish {
        let iv = problem.intervals();
        let steps: Vec<f64> = iv.iter().map(|(lo, hi)| 0.02 * (hi - lo)).collect();
        let (g, c) = nelder_mead(|g| problem.objective(g), &genes, &steps, 4000);
        if c < cost {
            genes = g;
            cost = c;
        }
    }
    let params = problem.decode(&genes);
    let epsilon = misfit_at(&params, &target.build(FINAL_N_MAX)?);
    Ok(Optimized {
        params,
        epsilon,
        summary: OptimizerSummary {
            rng_seed: cfg.rng_seed,
            restarts: cfg.restarts,
            best_restart,
            restart_best: runs.iter().map(|r| r.cost).collect(),
            generations: runs.iter().map(|r| r.history.len()).collect(),
            history: runs[best_restart].history.clone(),
            polished: cfg.polish,
            fixed_phi,
            epsilon_search: cost,
            n_max_search: DEFAULT_N_MAX,
            n_max_final: FINAL_N_MAX,
        },
    })
}

struct Scalar<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<F> {
    type Param = f64;
    type Output = f64;
    fn cost(&self, p: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(*p))
    }
}

struct Multi<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Multi<F> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(p))
    }
}

/// Minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (a, b) = (a.min(b), a.max(b));
    let solver = GoldenSectionSearch::new(a, b)
        .and_then(|s| s.with_tolerance(tol))
        .expect("valid golden-section bracket");
    Executor::new(Scalar(f), solver)
        .configure(|s| s.param(0.5 * (a + b)).max_iters(500))
        .run()
        .ok()
        .and_then(|r| r.state().get_best_param().copied())
        .unwrap_or(0.5 * (a + b))
}

/// Nelder–Mead from `x0` with an axis-aligned initial simplex of the given
/// steps. Returns the best point and value.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    steps: &[f64],
    max_iters: u64,
) -> (Vec<f64>, f64) {
    let mut simplex = vec![x0.to_vec()];
    for (i, &s) in steps.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += if s != 0.0 { s } else { 1e-6 };
        simplex.push(v);
    }
    let f0 = f(x0);
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .expect("positive tolerance");
    match Executor::new(Multi(&f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
    {
        Ok(res) => {
            let st = res.state();
            match st.get_best_param() {
                Some(p) if st.get_best_cost() < f0 => (p.clone(), st.get_best_cost()),
                _ => (x0.to_vec(), f0),
            }
        }
        Err(_) => (x0.to_vec(), f0),
    }
}

/// Half a unit in the last printed digit of a decimal literal
/// (`"6.3e-3"` → `5e-5`, `"245"` → `0.5`).
pub fn half_last_digit(s: &str) -> f64 {
    let s = s.trim().to_ascii_lowercase();
    let (mantissa, exp) = match s.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i32>().unwrap_or(0)),
        None => (s.clone(), 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, d)| d.len()) as i32;
    0.5 * 10f64.powi(exp - decimals)
}

/// Minimize `f` over the box `center ± half` (each coordinate kept strictly
/// inside by a `tanh` map), from the center and `starts` seeded random points.
pub fn refine_in_box<F: Fn(&[f64]) -> f64 + Sync>(
    f: F,
    center: &[f64],
    half: &[f64],
    starts: usize,
    seed: u64,
) -> (Vec<f64>, f64) {
    let map = |u: &[f64]| -> Vec<f64> {
        center
            .iter()
            .zip(half)
            .zip(u)
            .map(|((c, h), u)| c + h * u.tanh())
            .collect()
    };
    let g = |u: &[f64]| f(&map(u));
    let dim = center.len();
    let mut best = (center.to_vec(), f(center));
    let results: Vec<(Vec<f64>, f64)> = (0..=starts)
        .into_par_iter()
        .map(|s| {
            let u0: Vec<f64> = if s == 0 {
                vec![0.0; dim]
            } else {
                let mut rng = stream(seed, s, 0, 0);
                (0..dim).map(|_| rng.random_range(-0.999f64..0.999).atanh()).collect()
            };
            let (u, v) = nelder_mead(g, &u0, &vec![0.5; dim], 3000);
            (map(&u), v)
        })
        .collect();
    for r in results {
        if r.1 < best.1 {
            best = r;
        }
    }
    best
}
