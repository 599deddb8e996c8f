//! Target states: amplitude-squeezed, binomial, squeezed number, squeezed
//! vacuum and hand-picked photon-number superpositions.
//!
//! Squeezing convention: `S(ζ) = exp(½(ζ a†² − ζ* a²))`, `ζ = r e^{iθ}`. For
//! real `ζ = r > 0` the `Y` quadrature is squeezed, so the state is elongated
//! along the real phase-space axis.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{ln_factorial, FockVector};

/// Extra levels carried while exponentiating a truncated generator; the
/// result is cut back to the requested size afterwards.
const EXP_PADDING: usize = 48;

/// A target family together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    /// `|α₀, u, δ⟩_AS`
    AmplitudeSqueezed { alpha0: f64, u: f64, delta: f64 },
    /// `|p, M⟩_B`
    Binomial { p: f64, m: usize },
    /// `|n, ζ=r⟩_NS`
    SqueezedNumber { n: usize, r: f64 },
    /// `|ζ = r e^{iθ}, 0⟩`
    SqueezedVacuum { r: f64, theta: f64 },
    /// Normalized `Σ c_n |n⟩` with real coefficients.
    AdHoc { coeffs: Vec<f64> },
}

impl TargetSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match self {
            TargetSpec::AmplitudeSqueezed { alpha0, u, delta } => {
                if !(alpha0.is_finite() && u.is_finite() && delta.is_finite()) {
                    return bad("amplitude-squeezed parameters must be finite".into());
                }
                if *u <= 0.0 || *alpha0 <= 0.0 {
                    return bad(format!("need u > 0 and alpha0 > 0, got u={u}, alpha0={alpha0}"));
                }
            }
            TargetSpec::Binomial { p, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return bad(format!("binomial p must lie in [0,1], got {p}"));
                }
            }
            TargetSpec::SqueezedNumber { r, .. } => {
                if !(r.is_finite() && *r >= 0.0) {
                    return bad(format!("squeezing r must be finite and >= 0, got {r}"));
                }
            }
            TargetSpec::SqueezedVacuum { r, theta } => {
                if !(r.is_finite() && *r >= 0.0 && theta.is_finite()) {
                    return bad(format!("invalid squeezed vacuum ({r}, {theta})"));
                }
            }
            TargetSpec::AdHoc { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return bad("ad hoc coefficients must be finite".into());
                }
                if coeffs.iter().all(|&c| c == 0.0) {
                    return bad("ad hoc superposition needs a nonzero coefficient".into());
                }
            }
        }
        Ok(())
    }

    /// Normalized photon-number vector truncated at `n_max`.
    pub fn build(&self, n_max: usize) -> Result<FockVector> {
        self.validate()?;
        match self {
            TargetSpec::AmplitudeSqueezed { alpha0, u, delta } => {
                amplitude_squeezed(*alpha0, *u, *delta, n_max)
            }
            TargetSpec::Binomial { p, m } => binomial_state(*p, *m, n_max),
            TargetSpec::SqueezedNumber { n, r } => squeezed_number(*n, *r, n_max),
            TargetSpec::SqueezedVacuum { r, theta } => squeezed_vacuum(*r, *theta, n_max),
            TargetSpec::AdHoc { coeffs } => adhoc_superposition(coeffs, n_max),
        }
    }

    /// Named hand-picked superpositions (`psi02`, `psi012''`, …).
    pub fn named(name: &str) -> Option<Self> {
        let coeffs: &[f64] = match name {
            "psi02" => &[3.0, 0.0, 1.0],
            "psi02'" => &[1.0, 0.0, 1.0],
            "psi012" => &[4.0, 1.0, 1.0],
            "psi012'" => &[2.0, 1.0, 1.0],
            "psi012''" => &[2.0, 2.0, 1.0],
            "psi0123" => &[8.0, 5.0, 3.0, 1.0],
            _ => return None,
        };
        Some(TargetSpec::AdHoc {
            coeffs: coeffs.to_vec(),
        })
    }
}

/// Text form: `AS(α₀,u,δ)`, `B(p,M)`, `NS(n,r)`, `SV(r,θ)`, `ADHOC(c0,c1,…)`,
/// or one of the names accepted by [`TargetSpec::named`]. Numeric arguments
/// may be written as `sqrt(v)`.
impl FromStr for TargetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(t) = TargetSpec::named(s) {
            return Ok(t);
        }
        let err = |m: &str| Error::Config(format!("malformed target '{s}': {m}"));
        let open = s.find('(').ok_or_else(|| err("expected KIND(args)"))?;
        if !s.ends_with(')') {
            return Err(err("missing closing parenthesis"));
        }
        let kind = s[..open].trim().to_ascii_uppercase();
        let body = &s[open + 1..s.len() - 1];
        let args = split_args(body).map_err(|m| err(&m))?;
        let nums = args
            .iter()
            .map(|a| parse_number(a))
            .collect::<std::result::Result<Vec<f64>, String>>()
            .map_err(|m| err(&m))?;
        let want = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(err(&format!("expected {n} arguments, got {}", nums.len())))
            }
        };
        let as_count = |v: f64, what: &str| {
            if v >= 0.0 && v.fract() == 0.0 && v < 1e6 {
                Ok(v as usize)
            } else {
                Err(err(&format!("{what} must be a non-negative integer")))
            }
        };
        let spec = match kind.as_str() {
            "AS" => {
                want(3)?;
                TargetSpec::AmplitudeSqueezed {
                    alpha0: nums[0],
                    u: nums[1],
                    delta: nums[2],
                }
            }
            "B" => {
                want(2)?;
                TargetSpec::Binomial {
                    p: nums[0],
                    m: as_count(nums[1], "M")?,
                }
            }
            "NS" => {
                want(2)?;
                TargetSpec::SqueezedNumber {
                    n: as_count(nums[0], "n")?,
                    r: nums[1],
                }
            }
            "SV" => {
                want(2)?;
                TargetSpec::SqueezedVacuum {
                    r: nums[0],
                    theta: nums[1],
                }
            }
            "ADHOC" => {
                if nums.is_empty() {
                    return Err(err("ADHOC needs at least one coefficient"));
                }
                TargetSpec::AdHoc { coeffs: nums }
            }
            other => return Err(err(&format!("unknown kind '{other}'"))),
        };
        spec.validate()
            .map_err(|e| Error::Config(format!("invalid target '{s}': {e}")))?;
        Ok(spec)
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::AmplitudeSqueezed { alpha0, u, delta } => {
                write!(f, "AS({alpha0:?},{u:?},{delta:?})")
            }
            TargetSpec::Binomial { p, m } => write!(f, "B({p:?},{m})"),
            TargetSpec::SqueezedNumber { n, r } => write!(f, "NS({n},{r:?})"),
            TargetSpec::SqueezedVacuum { r, theta } => write!(f, "SV({r:?},{theta:?})"),
            TargetSpec::AdHoc { coeffs } => {
                write!(f, "ADHOC(")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c:?}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn split_args(body: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in body.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parentheses".into());
                }
                cur.push(ch);
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur);
    }
    Ok(out.into_iter().map(|a| a.trim().to_string()).collect())
}

fn parse_number(tok: &str) -> std::result::Result<f64, String> {
    let t = tok.trim();
    let v = if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        inner
            .trim()
            .parse::<f64>()
            .map(f64::sqrt)
            .map_err(|_| format!("bad number '{t}'"))?
    } else {
        t.parse::<f64>().map_err(|_| format!("bad number '{t}'"))?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number '{t}'"))
    }
}

fn normalize_checked(mut v: FockVector) -> Result<FockVector> {
    v.normalize()?;
    v.check_tail()?;
    Ok(v)
}

/// `c Σ_n √(2π) α₀ⁿ/(u√n!) exp[−(δ−n)²/2u²] |n⟩`, normalized by summation.
pub fn amplitude_squeezed(alpha0: f64, u: f64, delta: f64, n_max: usize) -> Result<FockVector> {
    TargetSpec::AmplitudeSqueezed { alpha0, u, delta }.validate()?;
    // log-weights; the common factor √(2π)/u drops out with c
    let logs: Vec<f64> = (0..=n_max)
        .map(|n| {
            let nf = n as f64;
            nf * alpha0.ln() - 0.5 * ln_factorial(n) - (delta - nf).powi(2) / (2.0 * u * u)
        })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let coeffs: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    normalize_checked(FockVector::from_real(&coeffs))
}

/// `Σ_{n≤M} √(C(M,n) pⁿ (1−p)^{M−n}) |n⟩`.
pub fn binomial_state(p: f64, m: usize, n_max: usize) -> Result<FockVector> {
    TargetSpec::Binomial { p, m }.validate()?;
    if m > n_max {
        return Err(Error::TailTooHeavy {
            tail: 1.0,
            cutoff: n_max,
            n_max,
        });
    }
    let mut coeffs = vec![0.0; n_max + 1];
    for (n, c) in coeffs.iter_mut().enumerate().take(m + 1) {
        let k = (m - n) as f64;
        let nf = n as f64;
        *c = if p == 0.0 {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        } else if p == 1.0 {
            if n == m {
                1.0
            } else {
                0.0
            }
        } else {
            let ln_binom = ln_factorial(m) - ln_factorial(n) - ln_factorial(m - n);
            (0.5 * (ln_binom + nf * p.ln() + k * (1.0 - p).ln())).exp()
        };
    }
    // finite support: exact whenever m <= n_max
    Ok(FockVector::from_real(&coeffs))
}

/// Closed-form squeezed vacuum
/// `(cosh r)^{-1/2} Σ_m (e^{iθ} tanh r)^m √((2m)!)/(2^m m!) |2m⟩`.
pub fn squeezed_vacuum(r: f64, theta: f64, n_max: usize) -> Result<FockVector> {
    TargetSpec::SqueezedVacuum { r, theta }.validate()?;
    let mut v = FockVector::zeros(n_max);
    let t = r.tanh();
    let pref = r.cosh().powf(-0.5);
    for m in 0..=n_max / 2 {
        let mag = if t == 0.0 {
            if m == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (m as f64 * t.ln() + 0.5 * ln_factorial(2 * m)
                - m as f64 * std::f64::consts::LN_2
                - ln_factorial(m))
            .exp()
        };
        v.coeffs_mut()[2 * m] = Complex64::from_polar(pref * mag, m as f64 * theta);
    }
    v.check_tail()?;
    Ok(v)
}

/// Truncated squeeze generator `½(ζ a†² − ζ* a²)` on `dim` levels.
pub fn squeeze_generator(r: f64, theta: f64, dim: usize) -> DMatrix<Complex64> {
    let zeta = Complex64::from_polar(r, theta);
    let mut g = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..dim.saturating_sub(2) {
        // ⟨n+2| a†² |n⟩ = √((n+1)(n+2))
        let s = (((n + 1) * (n + 2)) as f64).sqrt();
        g[(n + 2, n)] += 0.5 * zeta * s;
        g[(n, n + 2)] -= 0.5 * zeta.conj() * s;
    }
    g
}

/// Column `n` of the squeeze operator, built by exponentiating the padded
/// truncated generator and cut back to `n_max`.
pub fn squeeze_column(n: usize, r: f64, theta: f64, n_max: usize) -> Result<FockVector> {
    let dim = n_max + 1 + EXP_PADDING;
    if n >= dim {
        return Err(Error::InvalidArgument(format!("|{n}> exceeds n_max = {n_max}")));
    }
    let u = squeeze_generator(r, theta, dim).exp();
    let coeffs: Vec<Complex64> = (0..=n_max).map(|m| u[(m, n)]).collect();
    let v = FockVector::from_coeffs(coeffs);
    let n2 = v.norm_sqr();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::TailTooHeavy {
            tail: (1.0 - n2).abs(),
            cutoff: n_max,
            n_max,
        });
    }
    normalize_checked(v)
}

/// `S(r)|n⟩` for real squeezing.
pub fn squeezed_number(n: usize, r: f64, n_max: usize) -> Result<FockVector> {
    TargetSpec::SqueezedNumber { n, r }.validate()?;
    if n > n_max {
        return Err(Error::TailTooHeavy {
            tail: 1.0,
            cutoff: n_max,
            n_max,
        });
    }
    if r == 0.0 {
        return FockVector::basis(n, n_max);
    }
    squeeze_column(n, r, 0.0, n_max)
}

/// Normalized `Σ c_n |n⟩`.
pub fn adhoc_superposition(coeffs: &[f64], n_max: usize) -> Result<FockVector> {
    TargetSpec::AdHoc {
        coeffs: coeffs.to_vec(),
    }
    .validate()?;
    if coeffs.len() > n_max + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} coefficients do not fit below n_max = {n_max}",
            coeffs.len()
        )));
    }
    FockVector::from_real(coeffs).resized(n_max).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{coherent_to_fock, misfit};

    #[test]
    fn amplitude_squeezed_number_state_limit() {
        let v = amplitude_squeezed(1.0, 0.01, 3.0, 64).unwrap();
        let n3 = FockVector::basis(3, 64).unwrap();
        assert!(misfit(&v, &n3).unwrap() < 1e-6);
    }

    #[test]
    fn amplitude_squeezed_coherent_limit() {
        let v = amplitude_squeezed(1.0, 1e3, 1.0, 64).unwrap();
        let coh = coherent_to_fock(Complex64::new(1.0, 0.0), 64).unwrap();
        assert!(misfit(&v, &coh.normalized().unwrap()).unwrap() < 1e-3);
    }

    #[test]
    fn amplitude_squeezed_norm() {
        let v = amplitude_squeezed(1.0, 2.0, 1.0, 64).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_limits() {
        assert_eq!(binomial_state(0.0, 7, 30).unwrap(), FockVector::vacuum(30));
        assert_eq!(
            binomial_state(1.0, 7, 30).unwrap(),
            FockVector::basis(7, 30).unwrap()
        );
        let v = binomial_state(0.5, 1, 5).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v.coeffs()[0].re - h).abs() < 1e-15);
        assert!((v.coeffs()[1].re - h).abs() < 1e-15);
    }

    #[test]
    fn squeezed_vacuum_examples() {
        assert_eq!(squeezed_vacuum(0.0, 0.0, 20).unwrap(), FockVector::vacuum(20));
        let v = squeezed_vacuum(1.0, 0.0, 160).unwrap();
        assert!((v.coeffs()[0].norm_sqr() - 1.0 / 1f64.cosh()).abs() < 1e-14);
        // Y squeezed: positive |2> amplitude for real r
        assert!(v.coeffs()[2].re > 0.0);
    }

    #[test]
    fn squeezed_vacuum_matches_exponential() {
        let closed = squeezed_vacuum(0.85, 0.0, 64).unwrap();
        let expo = squeeze_column(0, 0.85, 0.0, 64).unwrap();
        for (a, b) in closed.coeffs().iter().zip(expo.coeffs()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn squeezed_number_examples() {
        assert_eq!(
            squeezed_number(3, 0.0, 30).unwrap(),
            FockVector::basis(3, 30).unwrap()
        );
        let a = squeezed_number(0, 0.6, 64).unwrap();
        let b = squeezed_vacuum(0.6, 0.0, 64).unwrap();
        assert!(misfit(&a, &b).unwrap() < 1e-12);
        let v = squeezed_number(2, 0.3, 64).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-9);
        for m in (1..=64).step_by(2) {
            assert_eq!(v.coeffs()[m], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn adhoc_examples() {
        let v = adhoc_superposition(&[3.0, 0.0, 1.0], 10).unwrap();
        assert!((v.coeffs()[0].re - 3.0 / 10f64.sqrt()).abs() < 1e-15);
        let v = adhoc_superposition(&[8.0, 5.0, 3.0, 1.0], 10).unwrap();
        assert!((v.coeffs()[3].re - 1.0 / 99f64.sqrt()).abs() < 1e-15);
        assert_eq!(adhoc_superposition(&[1.0], 4).unwrap(), FockVector::vacuum(4));
        assert!(adhoc_superposition(&[0.0, 0.0], 4).is_err());
    }

    #[test]
    fn text_form_parses() {
        assert_eq!(
            "AS(1,2,1)".parse::<TargetSpec>().unwrap(),
            TargetSpec::AmplitudeSqueezed {
                alpha0: 1.0,
                u: 2.0,
                delta: 1.0
            }
        );
        let t: TargetSpec = "as(sqrt(2), 2.5, 2)".parse().unwrap();
        assert!(matches!(t, TargetSpec::AmplitudeSqueezed { alpha0, .. }
            if (alpha0 - 2f64.sqrt()).abs() < 1e-15));
        assert_eq!(
            "B(0.2,10)".parse::<TargetSpec>().unwrap(),
            TargetSpec::Binomial { p: 0.2, m: 10 }
        );
        assert_eq!(
            "psi012''".parse::<TargetSpec>().unwrap(),
            TargetSpec::AdHoc {
                coeffs: vec![2.0, 2.0, 1.0]
            }
        );
    }

    #[test]
    fn text_form_rejects_garbage() {
        for bad in ["", "AS(1,2)", "B(1.5,3)", "NS(-1,0.2)", "Q(1)", "B(0.2,10", "AS(1,0,1)"] {
            assert!(bad.parse::<TargetSpec>().is_err(), "{bad}");
        }
    }
}
