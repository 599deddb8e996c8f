//! Brute-force two-mode Fock simulation of both setups, used to referee the
//! closed-form outputs.
//!
//! Input amplitudes reach `|α| ~ 10³`, far beyond any Fock truncation, so the
//! inputs are written as `D(d)χ` with `χ` a small superposition
//! `e^{-i Im(dγ₁*)}|γ₁⟩ + e^{-i Im(dγ₂*)}|γ₂⟩`. Two equal displacements on a
//! 50:50 splitter leave `D(√2 d)` on the sum port and nothing on the
//! difference port; the displacement of the measured port is absorbed into
//! a shift of the homodyne outcome, `⟨x_θ|D(δ) ∝ ⟨(x − √2 Re(δe^{-iθ}))_θ|`.
//! Everything else is plain matrix algebra on truncated Fock vectors.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scheme::{pipeline::Unit, squeezed_vacuum_weights, SchemeKind, SchemeParams};
use crate::state::{coherent_to_fock, hermite_psi_table, Amplitude, FockVector, TAIL_THRESHOLD, TAIL_WINDOW};

/// Truncation used by [`simulate_scheme`].
pub const ORACLE_N_MAX: usize = 80;

/// Blocks whose input weight is below this are skipped by the splitter.
const NEGLIGIBLE_BLOCK: f64 = 1e-40;

/// Two-mode state `Σ c_{mk} |m⟩|k⟩`, `m, k ≤ n_max`, stored row-major in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFock {
    n_max: usize,
    coeffs: Vec<Complex64>,
}

/// Which mode a projection acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    Second,
}

impl TwoModeFock {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            coeffs: vec![Complex64::new(0.0, 0.0); (n_max + 1) * (n_max + 1)],
        }
    }

    pub fn product(a: &FockVector, b: &FockVector) -> Result<Self> {
        if a.n_max() != b.n_max() {
            return Err(Error::InvalidArgument("mode truncations differ".into()));
        }
        let n = a.n_max();
        let mut s = Self::zeros(n);
        for (m, &ca) in a.coeffs().iter().enumerate() {
            for (k, &cb) in b.coeffs().iter().enumerate() {
                s.coeffs[m * (n + 1) + k] = ca * cb;
            }
        }
        Ok(s)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, m: usize, k: usize) -> Complex64 {
        self.coeffs[m * (self.n_max + 1) + k]
    }

    pub fn set(&mut self, m: usize, k: usize, v: Complex64) {
        self.coeffs[m * (self.n_max + 1) + k] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 1e-14) {
            return Err(Error::DegenerateSuperposition { norm_sqr: n2 });
        }
        let s = 1.0 / n2.sqrt();
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        Ok(self)
    }

    /// Photon-number distribution of one mode.
    pub fn marginal(&self, mode: Mode) -> Vec<f64> {
        let n = self.n_max;
        let mut p = vec![0.0; n + 1];
        for m in 0..=n {
            for k in 0..=n {
                let w = self.get(m, k).norm_sqr();
                match mode {
                    Mode::First => p[m] += w,
                    Mode::Second => p[k] += w,
                }
            }
        }
        p
    }

    pub fn mean_total_photons(&self) -> f64 {
        let n = self.n_max;
        let mut s = 0.0;
        for m in 0..=n {
            for k in 0..=n {
                s += (m + k) as f64 * self.get(m, k).norm_sqr();
            }
        }
        s / self.norm_sqr()
    }

    /// Fails when either mode has noticeable weight in its top levels.
    pub fn check_tail(&self) -> Result<()> {
        let total = self.norm_sqr();
        for mode in [Mode::First, Mode::Second] {
            let p = self.marginal(mode);
            let tail: f64 = p[self.n_max + 1 - TAIL_WINDOW.min(self.n_max + 1)..].iter().sum();
            if tail > TAIL_THRESHOLD * total {
                return Err(Error::TailTooHeavy {
                    tail: tail / total,
                    cutoff: self.n_max + 1 - TAIL_WINDOW,
                    n_max: self.n_max,
                });
            }
        }
        Ok(())
    }
}

/// Splitter restricted to `N` total photons, basis `|N−j, j⟩`, `j = 0..=N`:
/// `exp(−(π/4)(a†b − ab†))` after a parity flip of the second mode.
fn block_unitary(total: usize) -> Arc<DMatrix<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DMatrix<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(u) = cache.lock().unwrap().get(&total) {
        return u.clone();
    }
    let d = total + 1;
    let mut g = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let na = (total - j) as f64;
        let nb = j as f64;
        // a†b: |na, nb⟩ → √((na+1) nb) |na+1, nb−1⟩
        if j > 0 {
            g[(j - 1, j)] += ((na + 1.0) * nb).sqrt();
        }
        // a b†: |na, nb⟩ → √(na (nb+1)) |na−1, nb+1⟩
        if j < total {
            g[(j + 1, j)] -= (na * (nb + 1.0)).sqrt();
        }
    }
    let mut u = (g * (-FRAC_PI_4)).exp();
    for j in (1..d).step_by(2) {
        u.column_mut(j).neg_mut();
    }
    let u = Arc::new(u);
    cache.lock().unwrap().insert(total, u.clone());
    u
}

/// 50:50 splitter with `|u⟩|v⟩ → |(u+v)/√2⟩|(u−v)/√2⟩`.
pub fn bs50_fock(state: &TwoModeFock) -> Result<TwoModeFock> {
    state.check_tail()?;
    let n = state.n_max;
    let mut out = TwoModeFock::zeros(n);
    for total in 0..=2 * n {
        let j_lo = total.saturating_sub(n);
        let j_hi = total.min(n);
        let mut v = vec![Complex64::new(0.0, 0.0); total + 1];
        let mut w = 0.0;
        for j in j_lo..=j_hi {
            v[j] = state.get(total - j, j);
            w += v[j].norm_sqr();
        }
        if w < NEGLIGIBLE_BLOCK {
            continue;
        }
        let u = block_unitary(total);
        for i in j_lo..=j_hi {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in j_lo..=j_hi {
                acc += v[j] * u[(i, j)];
            }
            out.set(total - i, i, acc);
        }
    }
    Ok(out)
}

/// Contract `mode` with `⟨x_θ|m⟩ = e^{-imθ} ψ_m(x)`; the result is the
/// unnormalized state of the other mode.
pub fn project_quadrature(state: &TwoModeFock, mode: Mode, theta: f64, x: f64) -> FockVector {
    let n = state.n_max;
    let psi = hermite_psi_table(n, x);
    let bra: Vec<Complex64> = (0..=n)
        .map(|m| Complex64::from_polar(psi[m], -(m as f64) * theta))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for m in 0..=n {
        for k in 0..=n {
            match mode {
                Mode::First => out[k] += bra[m] * state.get(m, k),
                Mode::Second => out[m] += bra[k] * state.get(m, k),
            }
        }
    }
    FockVector::from_coeffs(out)
}

fn combine(terms: &[(Complex64, Amplitude)], n_max: usize) -> Result<FockVector> {
    let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for &(c, a) in terms {
        for (vi, ci) in v.iter_mut().zip(coherent_to_fock(a, n_max)?.coeffs()) {
            *vi += c * ci;
        }
    }
    FockVector::from_coeffs(v).normalized()
}

/// Displacement `d` and residual `χ` of one unit input.
fn displaced_input(alpha: f64, phi: f64, unit: Unit, n_max: usize) -> Result<(Amplitude, FockVector)> {
    let a = Complex64::from_polar(alpha, unit.input_phase(phi));
    let amps = [a, a * Complex64::from_polar(1.0, -phi)];
    let d = 0.5 * (amps[0] + amps[1]);
    let terms: Vec<(Complex64, Amplitude)> = amps
        .iter()
        .map(|&amp| {
            let g = amp - d;
            (Complex64::from_polar(1.0, -(d * g.conj()).im), g)
        })
        .collect();
    Ok((d, combine(&terms, n_max)?))
}

/// Conditional state of the kept (difference) port of one unit measured at `x`.
fn unit_conditional(alpha: f64, phi: f64, unit: Unit, x: f64, n_max: usize) -> Result<FockVector> {
    let (d, chi) = displaced_input(alpha, phi, unit, n_max)?;
    let out = bs50_fock(&TwoModeFock::product(&chi, &chi)?)?;
    let theta = unit.homodyne_phase();
    let delta = d * SQRT_2;
    let shift = SQRT_2 * (delta * Complex64::from_polar(1.0, -theta)).re;
    project_quadrature(&out, Mode::First, theta, x - shift).normalized()
}

/// Normalized output of the whole chain, computed in the Fock basis.
pub fn simulate_scheme(p: &SchemeParams, n_max: usize) -> Result<FockVector> {
    p.validate()?;
    let k1 = unit_conditional(p.alpha, p.phi, Unit::Real, p.x1, n_max)?;
    match p.kind {
        SchemeKind::S1Line | SchemeKind::S1Lattice => {
            let unit = if p.kind == SchemeKind::S1Line {
                Unit::Real
            } else {
                Unit::Imaginary
            };
            let k2 = unit_conditional(p.alpha, p.phi, unit, p.x2, n_max)?;
            let out = bs50_fock(&TwoModeFock::product(&k1, &k2)?)?;
            project_quadrature(&out, Mode::Second, 0.0, p.x3).normalized()
        }
        SchemeKind::S2Line | SchemeKind::S2Lattice => {
            let n = (p.n_css / 2) as i64;
            let dir = Complex64::from_polar(1.0, 0.5 * p.kind.squeeze_theta());
            let terms: Vec<(Complex64, Amplitude)> = (-n..=n)
                .zip(squeezed_vacuum_weights(p.r, p.gamma, p.n_css))
                .filter(|(_, w)| *w > 0.0)
                .map(|(l, w)| (Complex64::new(w, 0.0), dir * (l as f64 * p.gamma)))
                .collect();
            let sv = combine(&terms, n_max)?;
            let out = bs50_fock(&TwoModeFock::product(&k1, &sv)?)?;
            project_quadrature(&out, Mode::First, 0.0, p.x2).normalized()
        }
    }
}
