//! Adaptive Gauss–Legendre panels.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Default absolute tolerance of [`integrate`].
pub const ABS_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 48;

/// Widest initial panel, so that features narrower than the whole interval
/// cannot slip between the nodes of both rules.
const MAX_PANEL: f64 = 0.25;

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| {
        (
            GaussLegendre::new(NonZeroUsize::new(10).unwrap()),
            GaussLegendre::new(NonZeroUsize::new(21).unwrap()),
        )
    })
}

/// `∫_a^b f` to absolute tolerance `tol`. Each panel is accepted when the 10- and
/// 21-point rules agree to the tolerance assigned to it; otherwise it is
/// bisected with the tolerance halved.
pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -integrate_tol(f, b, a, tol);
    }
    let n = ((b - a) / MAX_PANEL).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let t = tol / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == n { b } else { lo + h };
            panel(&f, lo, hi, t, 0)
        })
        .sum()
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate_tol(f, a, b, ABS_TOL)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (lo, hi) = rules();
    let coarse = lo.integrate(a, b, f);
    let fine = hi.integrate(a, b, f);
    if (fine - coarse).abs() <= tol || depth >= MAX_DEPTH {
        return fine;
    }
    let m = 0.5 * (a + b);
    panel(f, a, m, 0.5 * tol, depth + 1) + panel(f, m, b, 0.5 * tol, depth + 1)
}
