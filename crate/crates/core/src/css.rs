//! Finite coherent-state superpositions and their two-mode counterparts.
//!
//! Coherent states are not orthogonal, so norms and inner products go through
//! the Gram matrix `⟨α_j|α_k⟩`. With at most a few dozen terms the direct
//! `O(k²)` evaluation is used everywhere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{
    coherent_overlap, coherent_to_fock_unchecked, quadrature_overlap, Amplitude, FockVector,
};

/// Amplitudes closer than this are treated as the same coherent state.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Gram norm² at or below this marks a destructively interfering superposition.
pub const DEGENERATE_NORM_SQR: f64 = 1e-14;
const RENORM_DRIFT: f64 = 1e-8;

/// One `(coefficient, amplitude)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CssTerm {
    pub coeff: Complex64,
    pub amp: Amplitude,
}

/// `Σ_j c_j |α_j⟩` with distinct amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentSuperposition {
    terms: Vec<CssTerm>,
    normalized: bool,
}

impl CoherentSuperposition {
    /// Build from pairs, merging coincident amplitudes.
    pub fn new<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Complex64, Amplitude)>,
    {
        let mut out = Self {
            terms: Vec::new(),
            normalized: false,
        };
        for (c, a) in terms {
            out.push(c, a);
        }
        out
    }

    pub fn single(amp: Amplitude) -> Self {
        Self {
            terms: vec![CssTerm {
                coeff: Complex64::new(1.0, 0.0),
                amp,
            }],
            normalized: true,
        }
    }

    /// Add a term, folding it into an existing one with the same amplitude.
    pub fn push(&mut self, coeff: Complex64, amp: Amplitude) {
        self.normalized = false;
        if let Some(t) = self
            .terms
            .iter_mut()
            .find(|t| (t.amp - amp).norm() < MERGE_TOLERANCE)
        {
            t.coeff += coeff;
        } else {
            self.terms.push(CssTerm { coeff, amp });
        }
    }

    pub fn terms(&self) -> &[CssTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Largest `|α_j|`.
    pub fn max_amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.amp.norm()).fold(0.0, f64::max)
    }

    /// `⟨self|other⟩` through coherent overlaps.
    pub fn inner(&self, other: &CoherentSuperposition) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &other.terms {
                s += a.coeff.conj() * b.coeff * coherent_overlap(a.amp, b.amp);
            }
        }
        s
    }

    /// Gram quadratic form `Σ_{jk} c_j* c_k ⟨α_j|α_k⟩`.
    pub fn norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for (j, a) in self.terms.iter().enumerate() {
            s += a.coeff.norm_sqr();
            for b in &self.terms[j + 1..] {
                s += 2.0 * (a.coeff.conj() * b.coeff * coherent_overlap(a.amp, b.amp)).re;
            }
        }
        s.max(0.0)
    }

    /// Scaled copy with unit Gram norm.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > DEGENERATE_NORM_SQR) || !n2.is_finite() {
            return Err(Error::DegenerateSuperposition { norm_sqr: n2 });
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|t| CssTerm {
                    coeff: t.coeff * s,
                    amp: t.amp,
                })
                .collect(),
            normalized: true,
        })
    }

    /// Multiply every coefficient by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| CssTerm {
                    coeff: t.coeff * s,
                    amp: t.amp,
                })
                .collect(),
            normalized: self.normalized && (s.norm() - 1.0).abs() < 1e-15,
        }
    }

    /// Photon-number expansion of a normalized superposition.
    pub fn to_fock(&self, n_max: usize) -> Result<FockVector> {
        if !self.normalized {
            return Err(Error::NotNormalized {
                norm_sqr: self.norm_sqr(),
            });
        }
        let mut v = FockVector::zeros(n_max);
        for t in &self.terms {
            let coh = coherent_to_fock_unchecked(t.amp, n_max);
            coh.check_tail()?;
            for (dst, src) in v.coeffs_mut().iter_mut().zip(coh.coeffs()) {
                *dst += t.coeff * src;
            }
        }
        let n2 = v.norm_sqr();
        if (n2 - 1.0).abs() > RENORM_DRIFT {
            return Err(Error::TailTooHeavy {
                tail: (n2 - 1.0).abs(),
                cutoff: n_max,
                n_max,
            });
        }
        v.normalize()?;
        Ok(v)
    }

    /// `⟨target|self⟩` for a truncated target, exact up to the target's own tail.
    pub fn overlap_with_fock(&self, target: &FockVector) -> Complex64 {
        let n_max = target.n_max();
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let coh = coherent_to_fock_unchecked(t.amp, n_max);
            s += t.coeff * target.inner(&coh);
        }
        s
    }

    /// Misfit against a normalized Fock target using the Gram norm of `self`
    /// (no truncation of the superposition itself is involved).
    pub fn misfit_against(&self, target: &FockVector) -> Result<f64> {
        let n2 = self.norm_sqr();
        if !(n2 > DEGENERATE_NORM_SQR) {
            return Err(Error::DegenerateSuperposition { norm_sqr: n2 });
        }
        let f = self.overlap_with_fock(target).norm_sqr() / n2;
        Ok((1.0 - f).clamp(0.0, 1.0))
    }

    /// Conditional single-mode state after projecting a second mode; see
    /// [`TwoModeCss::project`].
    fn from_projection(terms: impl Iterator<Item = (Complex64, Amplitude)>) -> Self {
        Self::new(terms)
    }
}

/// Output port of a 50:50 splitter: `|u⟩|v⟩ → |(u+v)/√2⟩_sum |(u−v)/√2⟩_diff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Port {
    Sum,
    Difference,
}

/// One two-mode product term `c |μ⟩_measured |ν⟩_kept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeTerm {
    pub coeff: Complex64,
    pub measured: Amplitude,
    pub kept: Amplitude,
}

/// Superposition of two-mode coherent products, one mode destined for a
/// homodyne measurement and the other kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModeCss {
    terms: Vec<TwoModeTerm>,
}

impl TwoModeCss {
    pub fn new(terms: Vec<TwoModeTerm>) -> Self {
        let mut out: Vec<TwoModeTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(e) = out.iter_mut().find(|e| {
                (e.measured - t.measured).norm() < MERGE_TOLERANCE
                    && (e.kept - t.kept).norm() < MERGE_TOLERANCE
            }) {
                e.coeff += t.coeff;
            } else {
                out.push(t);
            }
        }
        Self { terms: out }
    }

    /// Two single-mode superpositions combined on a 50:50 splitter
    /// (first argument in the first input port); `measured` selects which
    /// output port is sent to the detector.
    pub fn beam_splitter(
        first: &CoherentSuperposition,
        second: &CoherentSuperposition,
        measured: Port,
    ) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut terms = Vec::with_capacity(first.len() * second.len());
        for a in first.terms() {
            for b in second.terms() {
                let sum = (a.amp + b.amp) * r;
                let diff = (a.amp - b.amp) * r;
                let (m, k) = match measured {
                    Port::Sum => (sum, diff),
                    Port::Difference => (diff, sum),
                };
                terms.push(TwoModeTerm {
                    coeff: a.coeff * b.coeff,
                    measured: m,
                    kept: k,
                });
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[TwoModeTerm] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for (j, a) in self.terms.iter().enumerate() {
            s += a.coeff.norm_sqr();
            for b in &self.terms[j + 1..] {
                s += 2.0
                    * (a.coeff.conj()
                        * b.coeff
                        * coherent_overlap(a.measured, b.measured)
                        * coherent_overlap(a.kept, b.kept))
                    .re;
            }
        }
        s.max(0.0)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > DEGENERATE_NORM_SQR) {
            return Err(Error::DegenerateSuperposition { norm_sqr: n2 });
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|t| TwoModeTerm {
                    coeff: t.coeff * s,
                    ..*t
                })
                .collect(),
        })
    }

    /// Apply `⟨x_θ|` to the measured mode; the result is the unnormalized
    /// conditional state of the kept mode.
    pub fn project(&self, theta: f64, x: f64) -> CoherentSuperposition {
        CoherentSuperposition::from_projection(
            self.terms
                .iter()
                .map(|t| (t.coeff * quadrature_overlap(x, theta, t.measured), t.kept)),
        )
    }

    /// Homodyne density of the measured mode,
    /// `p(x) = Σ_{jk} c_j c_k* ⟨ν_k|ν_j⟩ ⟨x_θ|μ_j⟩ ⟨x_θ|μ_k⟩*`.
    pub fn quadrature_density(&self, theta: f64, x: f64) -> f64 {
        let proj: Vec<Complex64> = self
            .terms
            .iter()
            .map(|t| t.coeff * quadrature_overlap(x, theta, t.measured))
            .collect();
        let mut s = 0.0;
        for (j, a) in self.terms.iter().enumerate() {
            s += proj[j].norm_sqr();
            for (k, b) in self.terms.iter().enumerate().skip(j + 1) {
                s += 2.0 * (proj[j] * proj[k].conj() * coherent_overlap(b.kept, a.kept)).re;
            }
        }
        s.max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }
    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    #[test]
    fn norm_of_single_term() {
        let s = CoherentSuperposition::new([(one(), c(0.7, -0.2))]);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cat_norm_orthogonal_limit() {
        let s = CoherentSuperposition::new([(one(), c(9.0, 0.0)), (one(), c(-9.0, 0.0))]);
        assert!((s.norm_sqr() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cancelling_terms_are_degenerate() {
        let s = CoherentSuperposition::new([(one(), c(0.5, 0.0)), (-one(), c(0.5, 0.0))]);
        assert_eq!(s.len(), 1);
        assert_eq!(s.norm_sqr(), 0.0);
        assert!(matches!(
            s.normalize(),
            Err(Error::DegenerateSuperposition { .. })
        ));
    }

    #[test]
    fn normalize_gives_unit_gram_norm() {
        let s = CoherentSuperposition::new([
            (c(0.3, 0.1), c(0.2, 0.4)),
            (c(-1.0, 0.5), c(-0.6, 0.0)),
            (c(0.2, 0.0), c(1.0, 1.0)),
        ]);
        let n = s.normalize().unwrap();
        assert!(n.is_normalized());
        assert!((n.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn merging_within_tolerance() {
        let s = CoherentSuperposition::new([(one(), c(2.0, 0.0)), (one(), c(2.0 + 1e-14, 0.0))]);
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].coeff, c(2.0, 0.0));
    }

    #[test]
    fn vacuum_term_to_fock() {
        let v = CoherentSuperposition::single(c(0.0, 0.0)).to_fock(10).unwrap();
        assert_eq!(v, FockVector::vacuum(10));
    }

    #[test]
    fn even_cat_has_no_odd_components() {
        let s = CoherentSuperposition::new([(one(), c(1.3, 0.0)), (one(), c(-1.3, 0.0))])
            .normalize()
            .unwrap();
        let v = s.to_fock(40).unwrap();
        for n in (1..=40).step_by(2) {
            assert!(v.coeffs()[n].norm() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_to_fock_rejected() {
        let s = CoherentSuperposition::new([(one(), c(0.1, 0.0)), (one(), c(-0.1, 0.0))]);
        assert!(s.to_fock(20).is_err());
    }

    #[test]
    fn gram_misfit_matches_fock_misfit() {
        let s = CoherentSuperposition::new([(c(0.4, 0.2), c(0.9, 0.3)), (one(), c(-0.5, 0.1))])
            .normalize()
            .unwrap();
        let target = FockVector::from_real(&[3.0, 0.0, 1.0]).resized(60).normalized().unwrap();
        let direct = crate::state::misfit(&s.to_fock(60).unwrap(), &target).unwrap();
        let gram = s.misfit_against(&target).unwrap();
        assert!((direct - gram).abs() < 1e-12);
    }

    #[test]
    fn splitter_density_single_term() {
        let mu = c(0.6, -0.3);
        let t = TwoModeCss::new(vec![TwoModeTerm {
            coeff: one(),
            measured: mu,
            kept: c(0.2, 0.0),
        }]);
        for &x in &[-1.0, 0.0, 0.85, 2.0] {
            let expect = std::f64::consts::PI.powf(-0.5)
                * (-(x - std::f64::consts::SQRT_2 * mu.re).powi(2)).exp();
            assert!((t.quadrature_density(0.0, x) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn splitter_maps_coherent_products() {
        let a = CoherentSuperposition::single(c(1.0, 0.5));
        let b = CoherentSuperposition::single(c(-0.4, 0.2));
        let t = TwoModeCss::beam_splitter(&a, &b, Port::Sum);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((t.terms()[0].measured - c(0.6, 0.7) * r).norm() < 1e-15);
        assert!((t.terms()[0].kept - c(1.4, 0.3) * r).norm() < 1e-15);
    }
}
