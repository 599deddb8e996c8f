//! Single-mode building blocks: truncated photon-number vectors, harmonic
//! oscillator eigenfunctions, coherent-state overlaps and the misfit measure.
//!
//! Quadrature convention: the rotated quadrature eigenstate `|x_θ⟩` satisfies
//! `⟨x_θ|α⟩ = π^{-1/4} exp(-|α|²/2 - x²/2 + √2 e^{-iθ} x α - α² e^{-2iθ}/2)`.
//! Everything else (the Hermite functions, the oracle projector) is derived
//! from that expression and property-tested against it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex phase-space label of a coherent state (`x = Re`, `y = Im`).
pub type Amplitude = Complex64;

/// Default photon-number cutoff for single-mode work.
pub const DEFAULT_N_MAX: usize = 64;
/// Maximum mass allowed in the last [`TAIL_WINDOW`] retained entries.
pub const TAIL_THRESHOLD: f64 = 1e-10;
/// Number of top entries inspected by the truncation predicate.
pub const TAIL_WINDOW: usize = 5;

const NORM_TOLERANCE: f64 = 1e-8;
const EXACT_FACTORIAL_LIMIT: usize = 150;

/// `ln(n!)`: exact running product up to 150, log-domain sum above.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= EXACT_FACTORIAL_LIMIT {
        let mut p = 1.0f64;
        for k in 2..=n {
            p *= k as f64;
        }
        p.ln()
    } else {
        let mut s = ln_factorial(EXACT_FACTORIAL_LIMIT);
        for k in EXACT_FACTORIAL_LIMIT + 1..=n {
            s += (k as f64).ln();
        }
        s
    }
}

/// `π^{-1/4}`
pub fn pi_quarter() -> f64 {
    std::f64::consts::PI.powf(-0.25)
}

/// Truncated photon-number-basis state, coefficients indexed by `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n_max + 1],
        }
    }

    /// The number state `|n⟩`.
    pub fn basis(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidArgument(format!(
                "number state |{n}> does not fit below n_max = {n_max}"
            )));
        }
        let mut v = Self::zeros(n_max);
        v.coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::basis(0, n_max).expect("vacuum always fits")
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a Fock vector needs at least one entry");
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, zero-padding the shorter vector.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&mut self, s: Complex64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    /// Rescale to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::DegenerateSuperposition { norm_sqr: n2 });
        }
        self.scale(Complex64::new(1.0 / n2.sqrt(), 0.0));
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Mass carried by the top [`TAIL_WINDOW`] entries.
    pub fn tail_mass(&self) -> f64 {
        let start = self.coeffs.len().saturating_sub(TAIL_WINDOW);
        self.coeffs[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Truncation predicate: tail mass below `threshold`.
    pub fn is_converged(&self, threshold: f64) -> bool {
        self.tail_mass() < threshold
    }

    /// Error out unless the tail predicate passes at the default threshold.
    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail_mass();
        if tail < TAIL_THRESHOLD {
            Ok(())
        } else {
            Err(Error::TailTooHeavy {
                tail,
                cutoff: self.n_max().saturating_sub(TAIL_WINDOW),
                n_max: self.n_max(),
            })
        }
    }

    /// `⟨n⟩` for a normalized vector.
    pub fn mean_photon_number(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Copy into a vector with a different cutoff (truncating or zero-padding).
    pub fn resized(&self, n_max: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n_max + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }
}

/// Harmonic-oscillator eigenfunction `ψ_n(x)` by the stable two-term recurrence.
pub fn hermite_psi(n: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!(
            "Hermite function order must be non-negative, got {n}"
        )));
    }
    Ok(*hermite_psi_table(n as usize, x).last().unwrap())
}

/// `[ψ_0(x), …, ψ_{n_max}(x)]` in one recurrence sweep.
pub fn hermite_psi_table(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = pi_quarter() * (-0.5 * x * x).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for n in 2..=n_max {
        let nf = n as f64;
        let v = (2.0 / nf).sqrt() * x * out[n - 1] - ((nf - 1.0) / nf).sqrt() * out[n - 2];
        out.push(v);
    }
    out
}

/// `⟨x_θ|α⟩`.
///
/// Evaluated in the algebraically identical form
/// `π^{-1/4} exp(-(x - √2 a)²/2 + i(√2 x b - a b))` with `a + ib = α e^{-iθ}`,
/// which stays finite for the very large input amplitudes used by the schemes.
pub fn quadrature_overlap(x: f64, theta: f64, alpha: Amplitude) -> Complex64 {
    let z = alpha * Complex64::from_polar(1.0, -theta);
    let (a, b) = (z.re, z.im);
    let d = x - std::f64::consts::SQRT_2 * a;
    let phase = std::f64::consts::SQRT_2 * x * b - a * b;
    Complex64::from_polar(pi_quarter() * (-0.5 * d * d).exp(), phase)
}

/// `⟨a|b⟩ = exp(-|a|²/2 - |b|²/2 + a* b)`, evaluated as
/// `exp(-|a - b|²/2 + i Im(a* b))`.
pub fn coherent_overlap(a: Amplitude, b: Amplitude) -> Complex64 {
    let cross = a.conj() * b;
    Complex64::from_polar((-0.5 * (a - b).norm_sqr()).exp(), cross.im)
}

/// Coherent state `|α⟩` truncated at `n_max`.
pub fn coherent_to_fock(alpha: Amplitude, n_max: usize) -> Result<FockVector> {
    let v = coherent_to_fock_unchecked(alpha, n_max);
    v.check_tail()?;
    Ok(v)
}

/// Coherent coefficients `e^{-|α|²/2} αⁿ/√(n!)` without the tail check.
pub(crate) fn coherent_to_fock_unchecked(alpha: Amplitude, n_max: usize) -> FockVector {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let r = alpha.norm();
    if r == 0.0 {
        coeffs[0] = Complex64::new(1.0, 0.0);
        return FockVector { coeffs };
    }
    let (ln_r, arg) = (r.ln(), alpha.arg());
    let mut ln_sqrt_fact = 0.0;
    for (n, c) in coeffs.iter_mut().enumerate() {
        if n > 0 {
            ln_sqrt_fact += 0.5 * (n as f64).ln();
        }
        let ln_mag = -0.5 * r * r + n as f64 * ln_r - ln_sqrt_fact;
        *c = Complex64::from_polar(ln_mag.exp(), n as f64 * arg);
    }
    FockVector { coeffs }
}

/// `ε = 1 - |⟨a|b⟩|²` for two normalized vectors.
pub fn misfit(a: &FockVector, b: &FockVector) -> Result<f64> {
    for v in [a, b] {
        let n2 = v.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: n2 });
        }
    }
    Ok((1.0 - a.inner(b).norm_sqr()).clamp(0.0, 1.0))
}

/// `|⟨a|b⟩|²` for normalized vectors.
pub fn fidelity(a: &FockVector, b: &FockVector) -> Result<f64> {
    misfit(a, b).map(|e| 1.0 - e)
}
