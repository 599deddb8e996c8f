//! Conditional output states of the two splitter/homodyne setups.
//!
//! Setup 1 feeds two identical two-component inputs
//! `|α⟩ + |α e^{-iφ}⟩` into each of two 50:50 splitters, measures one port of
//! each, and interferes the two conditional states on a third splitter
//! followed by a third measurement. The output is a superposition on a line
//! (`kβ`, five amplitudes) or on a 3×3 lattice (`kβ + ilβ`), `β = α sin(φ/2)`.
//!
//! Setup 2 keeps the first unit and replaces the second by a finite
//! superposition approximating a squeezed vacuum, giving `3·N` amplitudes.
//!
//! Two independent routes are provided. The closed-form coefficient formulas
//! live at the top level of this module; [`pipeline`] pushes the actual input
//! superpositions through splitters and projections. The two agree, and the
//! Fock-basis simulator in [`crate::oracle`] referees both.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::css::CoherentSuperposition;
use crate::error::{Error, Result};
use crate::state::{quadrature_overlap, Amplitude, DEFAULT_N_MAX};
use crate::targets::squeezed_vacuum;

/// Default number of coherent states approximating the squeezed vacuum.
pub const DEFAULT_N_CSS: usize = 7;

/// Which setup and output geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Three measurements, five amplitudes on the real axis.
    S1Line,
    /// Three measurements, second one on `Y`; 3×3 lattice.
    S1Lattice,
    /// Two measurements, squeezed-vacuum input along the real axis (`θ = 0`).
    S2Line,
    /// Two measurements, squeezed-vacuum input along the imaginary axis (`θ = π`).
    S2Lattice,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::S1Line,
        SchemeKind::S1Lattice,
        SchemeKind::S2Line,
        SchemeKind::S2Lattice,
    ];

    pub fn is_s1(self) -> bool {
        matches!(self, SchemeKind::S1Line | SchemeKind::S1Lattice)
    }

    pub fn measurement_count(self) -> usize {
        if self.is_s1() {
            3
        } else {
            2
        }
    }

    /// Squeezing phase of the second input of setup 2.
    pub fn squeeze_theta(self) -> f64 {
        match self {
            SchemeKind::S2Lattice => PI,
            _ => 0.0,
        }
    }

    /// Homodyne phases `θ_i`, fixed by the geometry.
    pub fn homodyne_phases(self) -> Vec<f64> {
        match self {
            SchemeKind::S1Line => vec![0.0, 0.0, 0.0],
            SchemeKind::S1Lattice => vec![0.0, FRAC_PI_2, 0.0],
            SchemeKind::S2Line | SchemeKind::S2Lattice => vec![0.0, 0.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::S1Line => "s1_line",
            SchemeKind::S1Lattice => "s1_lattice",
            SchemeKind::S2Line => "s2_line",
            SchemeKind::S2Lattice => "s2_lattice",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

fn default_n_css() -> usize {
    DEFAULT_N_CSS
}

/// Every free parameter of one setup instance.
///
/// `alpha` is the magnitude of the input amplitude; its phase is fixed by the
/// unit (`π/2 + φ/2`, or `φ/2` for the lattice unit). For [`SchemeKind::S1Lattice`]
/// `x2` is the `Y`-quadrature result. `x3` is unused by setup 2, `r`, `gamma`
/// and `n_css` by setup 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeParams {
    pub kind: SchemeKind,
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
    #[serde(default = "default_n_css")]
    pub n_css: usize,
}

impl SchemeParams {
    pub fn s1(kind: SchemeKind, alpha: f64, phi: f64, x: [f64; 3]) -> Self {
        Self {
            kind,
            alpha,
            phi,
            x1: x[0],
            x2: x[1],
            x3: x[2],
            r: 0.0,
            gamma: 0.0,
            n_css: DEFAULT_N_CSS,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn s2(kind: SchemeKind, alpha: f64, phi: f64, r: f64, gamma: f64, x: [f64; 2]) -> Self {
        Self {
            kind,
            alpha,
            phi,
            x1: x[0],
            x2: x[1],
            x3: 0.0,
            r,
            gamma,
            n_css: DEFAULT_N_CSS,
        }
    }

    /// `β = α sin(φ/2)`
    pub fn beta(&self) -> f64 {
        self.alpha * (0.5 * self.phi).sin()
    }

    /// `α² sin φ`: the relative phase between the vacuum and cat parts of the
    /// conditional unit states. Together with `β` and the outcomes it fixes
    /// the output completely.
    pub fn interference_phase(&self) -> f64 {
        self.alpha * self.alpha * self.phi.sin()
    }

    pub fn outcomes(&self) -> Vec<f64> {
        match self.kind.measurement_count() {
            3 => vec![self.x1, self.x2, self.x3],
            _ => vec![self.x1, self.x2],
        }
    }

    /// Copy with the measurement outcomes replaced.
    pub fn with_outcomes(&self, x: &[f64]) -> Self {
        let mut p = *self;
        p.x1 = x[0];
        p.x2 = x[1];
        if x.len() > 2 {
            p.x3 = x[2];
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        let finite = [
            self.alpha, self.phi, self.x1, self.x2, self.x3, self.r, self.gamma,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return bad("scheme parameters must be finite".into());
        }
        if self.alpha <= 0.0 {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.phi > 0.0 && self.phi < PI) {
            return bad(format!("phi must lie in (0, pi), got {}", self.phi));
        }
        if !self.kind.is_s1() {
            if self.r < 0.0 {
                return bad(format!("r must be non-negative, got {}", self.r));
            }
            if self.gamma <= 0.0 {
                return bad(format!("gamma must be positive, got {}", self.gamma));
            }
            if self.n_css == 0 || self.n_css.is_multiple_of(2) {
                return bad(format!("n_css must be odd and >= 1, got {}", self.n_css));
            }
        }
        Ok(())
    }
}

/// Coefficients of the conditional unit states `c_0|0⟩ + c_1(|√2β⟩ + |−√2β⟩)`
/// (primed: the cat lies on the imaginary axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntermediateCoeffs {
    pub a0: Complex64,
    pub a1: Complex64,
    pub b0: Complex64,
    pub b1: Complex64,
    pub b0p: Complex64,
    pub b1p: Complex64,
}

/// `(c_0, c_1)` of a unit measured at `x` with phase `theta`, whose input
/// amplitudes are `base · e^{±iφ/2}`.
fn unit_coeffs(base: Amplitude, phi: f64, theta: f64, x: f64) -> (Complex64, Complex64) {
    let h = 0.5 * phi;
    let c0 = quadrature_overlap(x, theta, base * Complex64::from_polar(SQRT_2, h))
        + quadrature_overlap(x, theta, base * Complex64::from_polar(SQRT_2, -h));
    let c1 = quadrature_overlap(x, theta, base * (SQRT_2 * h.cos()));
    (c0, c1)
}

/// `a`'s from `x1`, `b`'s from `x2` on `X`, `b′`'s from `x2` read as `Y`.
pub fn intermediate_coeffs(p: &SchemeParams) -> IntermediateCoeffs {
    let i_alpha = Complex64::new(0.0, p.alpha);
    let re_alpha = Complex64::new(p.alpha, 0.0);
    let (a0, a1) = unit_coeffs(i_alpha, p.phi, 0.0, p.x1);
    let (b0, b1) = unit_coeffs(i_alpha, p.phi, 0.0, p.x2);
    let (b0p, b1p) = unit_coeffs(re_alpha, p.phi, FRAC_PI_2, p.x2);
    IntermediateCoeffs {
        a0,
        a1,
        b0,
        b1,
        b0p,
        b1p,
    }
}

fn require(p: &SchemeParams, kinds: &[SchemeKind]) -> Result<()> {
    p.validate()?;
    if kinds.contains(&p.kind) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "operation does not apply to scheme {}",
            p.kind.name()
        )))
    }
}

/// Unnormalized line coefficients `c_{-2} … c_2`.
pub fn line_coeffs(p: &SchemeParams) -> [Complex64; 5] {
    let IntermediateCoeffs { a0, a1, b0, b1, .. } = intermediate_coeffs(p);
    let beta = p.beta();
    let q = |amp: f64| quadrature_overlap(p.x3, 0.0, Complex64::new(amp, 0.0));
    [
        a1 * b1 * q(0.0),
        a0 * b1 * q(beta) + a1 * b0 * q(-beta),
        a0 * b0 * q(0.0) + a1 * b1 * q(2.0 * beta) + a1 * b1 * q(-2.0 * beta),
        a0 * b1 * q(-beta) + a1 * b0 * q(beta),
        a1 * b1 * q(0.0),
    ]
}

/// Unnormalized line output `Σ c_n |nβ⟩`.
pub fn scheme1_line_raw(p: &SchemeParams) -> Result<CoherentSuperposition> {
    require(p, &[SchemeKind::S1Line])?;
    let beta = p.beta();
    let c = line_coeffs(p);
    Ok(CoherentSuperposition::new(
        (-2i32..=2).zip(c).map(|(n, cn)| (cn, Complex64::new(n as f64 * beta, 0.0))),
    ))
}

pub fn scheme1_line_output(p: &SchemeParams) -> Result<CoherentSuperposition> {
    scheme1_line_raw(p)?.normalize()
}

/// How the central lattice coefficient is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentralTerm {
    /// Vacuum ⊗ vacuum leaves the measured port in vacuum: `a₀b₀′⟨x₃|0⟩`.
    Derived,
    /// `a₀b₀′⟨x₃|β⟩`, the form found in print.
    AsPrinted,
}

/// Unnormalized lattice coefficients indexed `[k+1][l+1]` for amplitude `kβ + ilβ`.
pub fn lattice_coeffs(p: &SchemeParams, central: CentralTerm) -> [[Complex64; 3]; 3] {
    let ic = intermediate_coeffs(p);
    let beta = p.beta();
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for k in -1i32..=1 {
        for l in -1i32..=1 {
            let a = if k == 0 { ic.a0 } else { ic.a1 };
            let b = if l == 0 { ic.b0p } else { ic.b1p };
            // measured port carries kβ − ilβ
            let measured = if k == 0 && l == 0 && central == CentralTerm::AsPrinted {
                Complex64::new(beta, 0.0)
            } else {
                Complex64::new(k as f64 * beta, -(l as f64) * beta)
            };
            out[(k + 1) as usize][(l + 1) as usize] =
                a * b * quadrature_overlap(p.x3, 0.0, measured);
        }
    }
    out
}

pub fn scheme1_lattice_raw_with(
    p: &SchemeParams,
    central: CentralTerm,
) -> Result<CoherentSuperposition> {
    require(p, &[SchemeKind::S1Lattice])?;
    let beta = p.beta();
    let c = lattice_coeffs(p, central);
    let mut terms = Vec::with_capacity(9);
    for k in -1i32..=1 {
        for l in -1i32..=1 {
            terms.push((
                c[(k + 1) as usize][(l + 1) as usize],
                Complex64::new(k as f64 * beta, l as f64 * beta),
            ));
        }
    }
    Ok(CoherentSuperposition::new(terms))
}

pub fn scheme1_lattice_raw(p: &SchemeParams) -> Result<CoherentSuperposition> {
    scheme1_lattice_raw_with(p, CentralTerm::Derived)
}

pub fn scheme1_lattice_output(p: &SchemeParams) -> Result<CoherentSuperposition> {
    scheme1_lattice_raw(p)?.normalize()
}

/// Result of approximating a squeezed vacuum by `N` coherent states.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedVacuumCss {
    pub state: CoherentSuperposition,
    pub gamma: f64,
    pub epsilon: f64,
}

/// `c′_l ∝ exp(−|lγ|²/(e^{2r}−1))`, `l = −n..n`, unnormalized.
pub fn squeezed_vacuum_weights(r: f64, gamma: f64, n_css: usize) -> Vec<f64> {
    let n = (n_css / 2) as i64;
    let denom = (2.0 * r).exp_m1();
    (-n..=n)
        .map(|l| {
            if l == 0 {
                1.0
            } else if denom <= 0.0 {
                0.0
            } else {
                (-((l as f64) * gamma).powi(2) / denom).exp()
            }
        })
        .collect()
}

/// `Σ_l c′_l |lγ e^{iθ/2}⟩`, normalized. Zero weights are dropped.
pub fn squeezed_vacuum_superposition(
    r: f64,
    theta: f64,
    gamma: f64,
    n_css: usize,
) -> Result<CoherentSuperposition> {
    let n = (n_css / 2) as i64;
    let dir = Complex64::from_polar(1.0, 0.5 * theta);
    let w = squeezed_vacuum_weights(r, gamma, n_css);
    CoherentSuperposition::new(
        (-n..=n)
            .zip(w)
            .filter(|(_, c)| *c > 0.0)
            .map(|(l, c)| (Complex64::new(c, 0.0), dir * (l as f64 * gamma))),
    )
    .normalize()
}

fn squeezed_vacuum_target(r: f64, theta: f64) -> Result<crate::state::FockVector> {
    let mut n_max = DEFAULT_N_MAX;
    loop {
        match squeezed_vacuum(r, theta, n_max) {
            Err(Error::TailTooHeavy { .. }) if n_max < 1024 => n_max *= 2,
            other => return other,
        }
    }
}

/// Squeezed-vacuum approximation. With `gamma = None` the spacing is chosen to
/// minimize the misfit against the exact squeezed vacuum (coarse scan plus
/// golden-section refinement).
pub fn squeezed_vacuum_css(
    r: f64,
    theta: f64,
    n_css: usize,
    gamma: Option<f64>,
) -> Result<SqueezedVacuumCss> {
    if !(r.is_finite() && r >= 0.0) || n_css == 0 || n_css.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "need r >= 0 and odd n_css >= 1, got r={r}, n_css={n_css}"
        )));
    }
    if r == 0.0 {
        return Ok(SqueezedVacuumCss {
            state: CoherentSuperposition::single(Complex64::new(0.0, 0.0)),
            gamma: gamma.unwrap_or(0.0),
            epsilon: 0.0,
        });
    }
    let target = squeezed_vacuum_target(r, theta)?;
    let eval = |g: f64| -> f64 {
        squeezed_vacuum_superposition(r, theta, g, n_css)
            .and_then(|s| s.misfit_against(&target))
            .unwrap_or(1.0)
    };
    let g = match gamma {
        Some(g) => g,
        None => {
            let (lo, hi, steps) = (0.02, 4.0, 200);
            let grid: Vec<f64> = (0..=steps)
                .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
                .collect();
            let (ib, _) = grid
                .iter()
                .map(|&g| eval(g))
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, e)| if e < acc.1 { (i, e) } else { acc });
            let a = grid[ib.saturating_sub(1)];
            let b = grid[(ib + 1).min(steps)];
            crate::optimizer::golden_section(eval, a, b, 1e-10)
        }
    };
    let state = squeezed_vacuum_superposition(r, theta, g, n_css)?;
    let epsilon = state.misfit_against(&target)?;
    Ok(SqueezedVacuumCss {
        state,
        gamma: g,
        epsilon,
    })
}

/// Unnormalized setup-2 output
/// `Σ_{k,l} a_{|k|} c′_l ⟨x₂|kβ + lγe^{iθ/2}/√2⟩ |kβ − lγe^{iθ/2}/√2⟩`.
pub fn scheme2_raw(p: &SchemeParams) -> Result<CoherentSuperposition> {
    require(p, &[SchemeKind::S2Line, SchemeKind::S2Lattice])?;
    let ic = intermediate_coeffs(p);
    let beta = p.beta();
    let theta = p.kind.squeeze_theta();
    let dir = Complex64::from_polar(FRAC_1_SQRT_2, 0.5 * theta);
    let n = (p.n_css / 2) as i64;
    let w = squeezed_vacuum_weights(p.r, p.gamma, p.n_css);
    let mut terms = Vec::with_capacity(3 * p.n_css);
    for k in -1i64..=1 {
        let a = if k == 0 { ic.a0 } else { ic.a1 };
        for (l, &cl) in (-n..=n).zip(&w) {
            if cl == 0.0 {
                continue;
            }
            let shift = dir * (l as f64 * p.gamma);
            let kb = Complex64::new(k as f64 * beta, 0.0);
            terms.push((a * cl * quadrature_overlap(p.x2, 0.0, kb + shift), kb - shift));
        }
    }
    Ok(CoherentSuperposition::new(terms))
}

pub fn scheme2_output(p: &SchemeParams) -> Result<CoherentSuperposition> {
    scheme2_raw(p)?.normalize()
}

/// Unnormalized output by the closed-form coefficients, for any scheme.
pub fn raw_output(p: &SchemeParams) -> Result<CoherentSuperposition> {
    match p.kind {
        SchemeKind::S1Line => scheme1_line_raw(p),
        SchemeKind::S1Lattice => scheme1_lattice_raw(p),
        SchemeKind::S2Line | SchemeKind::S2Lattice => scheme2_raw(p),
    }
}

/// Normalized output by the closed-form coefficients, for any scheme.
pub fn output_state(p: &SchemeParams) -> Result<CoherentSuperposition> {
    match p.kind {
        SchemeKind::S1Line => scheme1_line_output(p),
        SchemeKind::S1Lattice => scheme1_lattice_output(p),
        SchemeKind::S2Line | SchemeKind::S2Lattice => scheme2_output(p),
    }
}

/// Outcome tuples equivalent to `p`'s for the purposes of window counting.
///
/// Setup 1, line: `(x1,x2,x3) → (x2,x1,−x3)` and `(x1,x2) → (−x1,−x2)` are
/// exact; single sign flips of `x1` or `x2` are included as well, since they
/// reproduce the misfit at optimized points. Setup 1, lattice: only the joint
/// flip is exact; single flips are included on the same footing. Setup 2: the
/// sign of `x1` is exact. Duplicates (outcomes at zero) are removed.
pub fn degenerate_outcomes(p: &SchemeParams) -> Vec<Vec<f64>> {
    let x = p.outcomes();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut add = |v: Vec<f64>| {
        if !out.iter().any(|u| u.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12)) {
            out.push(v);
        }
    };
    match p.kind {
        SchemeKind::S1Line => {
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    add(vec![s1 * x[0], s2 * x[1], x[2]]);
                    add(vec![s1 * x[1], s2 * x[0], -x[2]]);
                }
            }
        }
        SchemeKind::S1Lattice => {
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    add(vec![s1 * x[0], s2 * x[1], x[2]]);
                }
            }
        }
        SchemeKind::S2Line | SchemeKind::S2Lattice => {
            add(vec![x[0], x[1]]);
            add(vec![-x[0], x[1]]);
        }
    }
    out
}

/// Input superpositions and splitter chain built from first principles.
pub mod pipeline {
    use super::*;
    use crate::css::{Port, TwoModeCss};

    /// The two kinds of splitter unit.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Unit {
        /// Input phase `π/2 + φ/2`, measured on `X`.
        Real,
        /// Input phase `φ/2`, measured on `Y`.
        Imaginary,
    }

    impl Unit {
        pub fn input_phase(self, phi: f64) -> f64 {
            match self {
                Unit::Real => FRAC_PI_2 + 0.5 * phi,
                Unit::Imaginary => 0.5 * phi,
            }
        }

        pub fn homodyne_phase(self) -> f64 {
            match self {
                Unit::Real => 0.0,
                Unit::Imaginary => FRAC_PI_2,
            }
        }
    }

    /// `|α⟩ + |α e^{-iφ}⟩`, normalized, with `α = |α| e^{i·input_phase}`.
    pub fn input_state(alpha: f64, phi: f64, unit: Unit) -> Result<CoherentSuperposition> {
        let a = Complex64::from_polar(alpha, unit.input_phase(phi));
        let b = a * Complex64::from_polar(1.0, -phi);
        CoherentSuperposition::new([(Complex64::new(1.0, 0.0), a), (Complex64::new(1.0, 0.0), b)])
            .normalize()
    }

    /// Two copies of the input on a 50:50 splitter; the sum port is measured.
    pub fn unit_state(alpha: f64, phi: f64, unit: Unit) -> Result<TwoModeCss> {
        let input = input_state(alpha, phi, unit)?;
        TwoModeCss::beam_splitter(&input, &input, Port::Sum).normalize()
    }

    /// One homodyne stage: the two-mode state right before the measurement.
    #[derive(Debug, Clone)]
    pub struct Stage {
        pub state: TwoModeCss,
        pub theta: f64,
        pub outcome: f64,
    }

    impl Stage {
        pub fn conditional(&self) -> Result<CoherentSuperposition> {
            self.state.project(self.theta, self.outcome).normalize()
        }
    }

    /// Pre-measurement states of every stage, each later stage conditioned on
    /// the given earlier outcomes.
    pub fn stages(p: &SchemeParams, outcomes: &[f64]) -> Result<Vec<Stage>> {
        p.validate()?;
        let first = Stage {
            state: unit_state(p.alpha, p.phi, Unit::Real)?,
            theta: 0.0,
            outcome: outcomes[0],
        };
        let kept1 = first.conditional()?;
        match p.kind {
            SchemeKind::S1Line | SchemeKind::S1Lattice => {
                let unit = if p.kind == SchemeKind::S1Line {
                    Unit::Real
                } else {
                    Unit::Imaginary
                };
                let second = Stage {
                    state: unit_state(p.alpha, p.phi, unit)?,
                    theta: unit.homodyne_phase(),
                    outcome: outcomes[1],
                };
                let kept2 = second.conditional()?;
                let third = Stage {
                    state: TwoModeCss::beam_splitter(&kept1, &kept2, Port::Difference)
                        .normalize()?,
                    theta: 0.0,
                    outcome: outcomes[2],
                };
                Ok(vec![first, second, third])
            }
            SchemeKind::S2Line | SchemeKind::S2Lattice => {
                let sv = squeezed_vacuum_superposition(
                    p.r,
                    p.kind.squeeze_theta(),
                    p.gamma,
                    p.n_css,
                )?;
                let second = Stage {
                    state: TwoModeCss::beam_splitter(&kept1, &sv, Port::Sum).normalize()?,
                    theta: 0.0,
                    outcome: outcomes[1],
                };
                Ok(vec![first, second])
            }
        }
    }

    /// Normalized output obtained by running the whole chain.
    pub fn output_state(p: &SchemeParams) -> Result<CoherentSuperposition> {
        let st = stages(p, &p.outcomes())?;
        st.last().unwrap().conditional()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::TargetSpec;

    fn table_i_row3() -> SchemeParams {
        SchemeParams::s1(SchemeKind::S1Lattice, 349.0, 4.9e-3, [1.97, -2.18, 3.75])
    }

    fn fidelity(a: &CoherentSuperposition, b: &CoherentSuperposition) -> f64 {
        a.inner(b).norm_sqr()
    }

    #[test]
    fn small_phi_limit_of_unit_coefficients() {
        let p = SchemeParams::s1(SchemeKind::S1Line, 1.0, 1e-9, [0.4, -0.3, 0.2]);
        let ic = intermediate_coeffs(&p);
        assert!((ic.a0 - 2.0 * ic.a1).norm() < 1e-12 * ic.a1.norm());
    }

    #[test]
    fn vacuum_part_suppressed_for_large_amplitudes() {
        // x1 = 0 and √2 β large: |a0| ≪ |a1| once the interference phase is π/2
        let mut p = SchemeParams::s1(SchemeKind::S1Line, 800.0, 1e-2, [0.0, 0.0, 0.0]);
        // nudge alpha so that α² sin φ = π/2 mod 2π
        let target = (p.interference_phase() / (2.0 * PI)).floor() * 2.0 * PI + FRAC_PI_2;
        p.alpha = (target / p.phi.sin()).sqrt();
        let ic = intermediate_coeffs(&p);
        assert!(ic.a0.norm() / ic.a1.norm() < 1e-10);
    }

    #[test]
    fn outer_line_coefficients_coincide() {
        let p = SchemeParams::s1(SchemeKind::S1Line, 245.0, 6.3e-3, [-1.97, -0.25, -1.94]);
        let c = line_coeffs(&p);
        assert_eq!(c[0], c[4]);
    }

    #[test]
    fn closed_form_and_pipeline_agree() {
        let cases = [
            SchemeParams::s1(SchemeKind::S1Line, 245.0, 6.3e-3, [-1.97, -0.25, -1.94]),
            table_i_row3(),
            SchemeParams::s2(SchemeKind::S2Line, 92.0, 7.7e-3, 0.85, 1.19, [0.67, 0.0]),
            SchemeParams::s2(SchemeKind::S2Lattice, 90.0, 7.5e-3, 0.1, 0.44, [0.11, 1.04]),
        ];
        for p in cases {
            let a = output_state(&p).unwrap();
            let b = pipeline::output_state(&p).unwrap();
            assert!(1.0 - fidelity(&a, &b) < 1e-12, "{:?}", p.kind);
        }
    }

    #[test]
    fn printed_central_term_disagrees_with_chain() {
        let p = table_i_row3();
        let printed = scheme1_lattice_raw_with(&p, CentralTerm::AsPrinted)
            .unwrap()
            .normalize()
            .unwrap();
        let chain = pipeline::output_state(&p).unwrap();
        assert!(1.0 - fidelity(&printed, &chain) > 1e-3);
    }

    #[test]
    fn outputs_are_normalized() {
        let p = table_i_row3();
        assert!((scheme1_lattice_output(&p).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_constituent_squeezed_vacuum() {
        let s = squeezed_vacuum_css(1.0, 0.0, 1, None).unwrap();
        assert!((s.epsilon - (1.0 - 1.0 / 1f64.cosh())).abs() < 1e-10);
    }

    #[test]
    fn seven_constituents_reach_small_misfit() {
        let s = squeezed_vacuum_css(0.85, 0.0, 7, None).unwrap();
        assert!(s.epsilon < 1e-4, "{}", s.epsilon);
    }

    #[test]
    fn zero_squeezing_is_vacuum() {
        let s = squeezed_vacuum_css(0.0, 0.0, 7, None).unwrap();
        assert_eq!(s.epsilon, 0.0);
        assert_eq!(s.state.len(), 1);
    }

    #[test]
    fn weights_vanish_for_weak_squeezing() {
        let w = squeezed_vacuum_weights(1e-3, 0.3, 7);
        assert!(w[2] / w[3] < 1e-12);
    }

    #[test]
    fn line_degeneracies_are_exact() {
        let target = TargetSpec::AmplitudeSqueezed {
            alpha0: 1.0,
            u: 2.0,
            delta: 1.0,
        }
        .build(64)
        .unwrap();
        let p = SchemeParams::s1(SchemeKind::S1Line, 310.0, 4.1e-3, [0.7, -1.3, 2.2]);
        let e0 = output_state(&p).unwrap().misfit_against(&target).unwrap();
        for q in [[-1.3, 0.7, -2.2], [-0.7, 1.3, 2.2]] {
            let e = output_state(&p.with_outcomes(&q))
                .unwrap()
                .misfit_against(&target)
                .unwrap();
            assert!((e - e0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_outcome_counts() {
        let p = SchemeParams::s1(SchemeKind::S1Line, 1.0, 0.1, [1.0, 2.0, 3.0]);
        assert_eq!(degenerate_outcomes(&p).len(), 8);
        let p = SchemeParams::s1(SchemeKind::S1Lattice, 1.0, 0.1, [0.0, 2.0, 3.0]);
        assert_eq!(degenerate_outcomes(&p).len(), 2);
        let p = SchemeParams::s2(SchemeKind::S2Line, 1.0, 0.1, 0.2, 0.5, [0.5, 0.0]);
        assert_eq!(degenerate_outcomes(&p).len(), 2);
    }

    #[test]
    fn wrong_scheme_is_rejected() {
        assert!(scheme1_line_output(&table_i_row3()).is_err());
    }
}
