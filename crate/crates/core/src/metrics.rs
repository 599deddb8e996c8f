//! Window probabilities of the homodyne measurements and the average misfit
//! of the conditional preparation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::css::TwoModeCss;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::scheme::{self, pipeline, SchemeParams};
use crate::state::FockVector;

/// Version tag carried by every serialized report.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_GRID_POINTS: usize = 9;

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

/// Acceptance window `[x_opt − δ, x_opt + δ]`, shared by all measurements,
/// and the number of subranges per window used for the average misfit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub delta: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl WindowConfig {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }

    pub fn with_grid(delta: f64, grid_points: usize) -> Self {
        Self { delta, grid_points }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 2.0) {
            return Err(Error::InvalidArgument(format!(
                "window half-width must lie in (0, 2], got {}",
                self.delta
            )));
        }
        if self.grid_points < 3 || self.grid_points.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid_points must be odd and >= 3, got {}",
                self.grid_points
            )));
        }
        Ok(())
    }

    /// Subrange `(lo, hi, center)` triples partitioning the window around `x`.
    pub fn subranges(&self, x: f64) -> Vec<(f64, f64, f64)> {
        let h = 2.0 * self.delta / self.grid_points as f64;
        (0..self.grid_points)
            .map(|i| {
                let lo = x - self.delta + i as f64 * h;
                (lo, lo + h, lo + 0.5 * h)
            })
            .collect()
    }
}

/// Homodyne density of the measured mode of a normalized two-mode state.
pub fn reduced_density_quadrature_pdf(s: &TwoModeCss, theta: f64) -> impl Fn(f64) -> f64 + '_ {
    move |x| s.quadrature_density(theta, x)
}

/// Probability that the outcome falls in `[lo, hi]`.
pub fn window_probability(s: &TwoModeCss, theta: f64, lo: f64, hi: f64) -> f64 {
    let pdf = reduced_density_quadrature_pdf(s, theta);
    quadrature::integrate(pdf, lo, hi).clamp(0.0, 1.0)
}

/// `∫_{x−δ}^{x+δ} p(x′) dx′`
pub fn success_probability(s: &TwoModeCss, theta: f64, x_opt: f64, delta: f64) -> f64 {
    window_probability(s, theta, x_opt - delta, x_opt + delta)
}

/// Window probabilities with every later stage conditioned on the earlier
/// outcomes of `outcomes`.
pub fn stage_probabilities(p: &SchemeParams, outcomes: &[f64], delta: f64) -> Result<Vec<f64>> {
    Ok(pipeline::stages(p, outcomes)?
        .iter()
        .map(|st| success_probability(&st.state, st.theta, st.outcome, delta))
        .collect())
}

/// Overall and per-measurement success probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probabilities {
    /// Sum over the degenerate outcome tuples of the product of their windows.
    pub overall_p: f64,
    /// Windows of the outcome tuple of the parameters themselves.
    pub per_measurement_p: Vec<f64>,
    /// Number of outcome tuples counted in `overall_p`.
    pub degenerate_windows: usize,
}

pub fn overall_probability(p: &SchemeParams, w: &WindowConfig) -> Result<Probabilities> {
    w.validate()?;
    let per_measurement_p = stage_probabilities(p, &p.outcomes(), w.delta)?;
    let tuples = scheme::degenerate_outcomes(p);
    let mut overall_p = 0.0;
    for x in &tuples {
        overall_p += stage_probabilities(p, x, w.delta)?.iter().product::<f64>();
    }
    Ok(Probabilities {
        overall_p: overall_p.min(1.0),
        per_measurement_p,
        degenerate_windows: tuples.len(),
    })
}

/// One cell of the averaging grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub outcomes: Vec<f64>,
    pub probability: f64,
    /// `None` when the conditional state is degenerate.
    pub misfit: Option<f64>,
}

/// All `grid_points^m` cells in lexicographic order, with subrange centers as
/// outcomes. A cell's weight is the product of its per-axis subrange
/// probabilities, each stage conditioned on the optimal earlier outcomes.
pub fn misfit_grid(p: &SchemeParams, target: &FockVector, w: &WindowConfig) -> Result<Vec<GridCell>> {
    p.validate()?;
    w.validate()?;
    let axes: Vec<Vec<(f64, f64)>> = pipeline::stages(p, &p.outcomes())?
        .iter()
        .map(|st| {
            w.subranges(st.outcome)
                .into_iter()
                .map(|(lo, hi, c)| (c, window_probability(&st.state, st.theta, lo, hi)))
                .collect()
        })
        .collect();
    let g = w.grid_points;
    let total = g.pow(axes.len() as u32);
    Ok((0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut outcomes = vec![0.0; axes.len()];
            let mut probability = 1.0;
            for k in (0..axes.len()).rev() {
                let (c, pr) = axes[k][idx % g];
                outcomes[k] = c;
                probability *= pr;
                idx /= g;
            }
            let misfit = scheme::output_state(&p.with_outcomes(&outcomes))
                .and_then(|s| s.misfit_against(target))
                .ok();
            GridCell {
                outcomes,
                probability,
                misfit,
            }
        })
        .collect())
}

/// `ε_avg = Σ_j P_j ε_j / Σ_j P_j` over the non-degenerate cells.
pub fn average_misfit(p: &SchemeParams, target: &FockVector, w: &WindowConfig) -> Result<f64> {
    weighted_mean(&misfit_grid(p, target, w)?)
}

pub fn weighted_mean(cells: &[GridCell]) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for c in cells {
        if let Some(e) = c.misfit {
            num += c.probability * e;
            den += c.probability;
        }
    }
    if !(den > 0.0) {
        return Err(Error::AllOutcomesDegenerate);
    }
    Ok(num / den)
}

/// Result of evaluating or optimizing one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub target: String,
    pub params: SchemeParams,
    pub beta: f64,
    pub epsilon: f64,
    pub per_measurement_p: Vec<f64>,
    pub overall_p: f64,
    pub degenerate_windows: usize,
    pub epsilon_avg: f64,
    pub delta: f64,
    pub grid_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<crate::optimizer::OptimizerSummary>,
}

/// Misfit at the parameters, window probabilities and average misfit.
pub fn evaluate(
    p: &SchemeParams,
    target_label: &str,
    target: &FockVector,
    w: &WindowConfig,
) -> Result<RunReport> {
    p.validate()?;
    let epsilon = scheme::output_state(p)?.misfit_against(target)?;
    let probs = overall_probability(p, w)?;
    let epsilon_avg = average_misfit(p, target, w)?;
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        target: target_label.to_string(),
        params: *p,
        beta: p.beta(),
        epsilon,
        per_measurement_p: probs.per_measurement_p,
        overall_p: probs.overall_p,
        degenerate_windows: probs.degenerate_windows,
        epsilon_avg,
        delta: w.delta,
        grid_points: w.grid_points,
        optimizer: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::{CoherentSuperposition, Port};
    use crate::scheme::SchemeKind;
    use crate::targets::TargetSpec;
    use num_complex::Complex64;

    fn line_row() -> SchemeParams {
        SchemeParams::s1(SchemeKind::S1Line, 245.5, 6.31e-3, [-1.96796, -0.255, -1.945])
    }

    fn cat(a: f64) -> CoherentSuperposition {
        CoherentSuperposition::new([
            (Complex64::new(1.0, 0.0), Complex64::new(a, 0.0)),
            (Complex64::new(1.0, 0.0), Complex64::new(-a, 0.0)),
        ])
        .normalize()
        .unwrap()
    }

    #[test]
    fn single_term_density_is_gaussian() {
        let mu = Complex64::new(0.7, -0.4);
        let s = TwoModeCss::beam_splitter(
            &CoherentSuperposition::single(mu * std::f64::consts::SQRT_2),
            &CoherentSuperposition::single(Complex64::new(0.0, 0.0)),
            Port::Difference,
        );
        let pdf = reduced_density_quadrature_pdf(&s, 0.0);
        let c = std::f64::consts::SQRT_2 * mu.re;
        for x in [-1.0, 0.3, 2.1] {
            let g = (-(x - c) * (x - c)).exp() / std::f64::consts::PI.sqrt();
            assert!((pdf(x) - g).abs() < 1e-14);
        }
    }

    #[test]
    fn cat_density_is_even_and_normalized() {
        let s = TwoModeCss::beam_splitter(&cat(1.3), &cat(0.9), Port::Sum)
            .normalize()
            .unwrap();
        let pdf = reduced_density_quadrature_pdf(&s, 0.0);
        assert!((pdf(0.8) - pdf(-0.8)).abs() < 1e-14);
        let total = quadrature::integrate(&pdf, -12.0, 12.0);
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn window_additivity() {
        let st = pipeline::stages(&line_row(), &line_row().outcomes()).unwrap();
        let s = &st[2];
        let full = success_probability(&s.state, 0.0, s.outcome, 0.4);
        let left = window_probability(&s.state, 0.0, s.outcome - 0.4, s.outcome);
        let right = window_probability(&s.state, 0.0, s.outcome, s.outcome + 0.4);
        assert!((full - left - right).abs() < 1e-10);
    }

    #[test]
    fn small_window_matches_density() {
        let st = pipeline::stages(&line_row(), &line_row().outcomes()).unwrap();
        let s = &st[0];
        let d = 1e-4;
        let pr = success_probability(&s.state, 0.0, s.outcome, d);
        let dens = s.state.quadrature_density(0.0, s.outcome);
        assert!((pr / (2.0 * d) - dens).abs() < 1e-6 * dens);
    }

    #[test]
    fn probability_grows_with_window() {
        let p = line_row();
        let mut last = 0.0;
        for d in [0.05, 0.2, 0.5, 1.0] {
            let pr = overall_probability(&p, &WindowConfig::new(d)).unwrap().overall_p;
            assert!(pr >= last);
            last = pr;
        }
    }

    #[test]
    fn average_misfit_bounded_by_grid() {
        let p = line_row();
        let target = TargetSpec::AmplitudeSqueezed {
            alpha0: 1.0,
            u: 2.0,
            delta: 1.0,
        }
        .build(64)
        .unwrap();
        let cells = misfit_grid(&p, &target, &WindowConfig::with_grid(0.35, 3)).unwrap();
        assert_eq!(cells.len(), 27);
        let avg = weighted_mean(&cells).unwrap();
        let es: Vec<f64> = cells.iter().filter_map(|c| c.misfit).collect();
        let lo = es.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = es.iter().cloned().fold(0.0, f64::max);
        assert!(lo <= avg && avg <= hi);
    }

    #[test]
    fn tiny_window_recovers_point_misfit() {
        let p = line_row();
        let target = TargetSpec::AmplitudeSqueezed {
            alpha0: 1.0,
            u: 2.0,
            delta: 1.0,
        }
        .build(64)
        .unwrap();
        let e = scheme::output_state(&p).unwrap().misfit_against(&target).unwrap();
        let avg = average_misfit(&p, &target, &WindowConfig::with_grid(1e-6, 3)).unwrap();
        assert!((avg - e).abs() < 1e-8);
    }

    #[test]
    fn invalid_windows_rejected() {
        assert!(WindowConfig::with_grid(0.3, 4).validate().is_err());
        assert!(WindowConfig::new(0.0).validate().is_err());
        assert!(WindowConfig::new(2.5).validate().is_err());
    }
}
