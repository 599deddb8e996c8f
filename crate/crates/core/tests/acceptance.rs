//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line
//! (straight to stderr, so it shows without `--nocapture`) and then asserts.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use css_engineering::cli::prob_sweep;
use css_engineering::css::CoherentSuperposition;
use css_engineering::metrics::{self, WindowConfig};
use css_engineering::optimizer::{self, Bounds, GaConfig};
use css_engineering::oracle::{simulate_scheme, ORACLE_N_MAX};
use css_engineering::scheme::{self, SchemeKind, SchemeParams};
use css_engineering::state::{fidelity, quadrature_overlap, DEFAULT_N_MAX};
use css_engineering::tables::{self, PublishedRow};
use css_engineering::targets::TargetSpec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// criteria run one at a time so that their timings are not shared
static SERIAL: Mutex<()> = Mutex::new(());

const REFINE_STARTS: usize = 16;
const REFINE_SEED: u64 = 2024;

fn line(s: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{s}");
}

fn verdict(n: usize, pass: bool, detail: &str) {
    line(&format!(
        "criterion {n}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    ));
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn refined(row: &PublishedRow) -> (SchemeParams, f64) {
    tables::refine_row(row, REFINE_STARTS, REFINE_SEED).unwrap()
}

#[test]
fn criterion_1_squeezed_vacuum() {
    let _g = lock();
    let t0 = Instant::now();
    let mut pass = true;
    for r in [0.3, 0.5, 0.85] {
        let eps: Vec<f64> = [1, 3, 5, 7]
            .iter()
            .map(|&n| scheme::squeezed_vacuum_css(r, 0.0, n, None).unwrap().epsilon)
            .collect();
        let monotone = eps.windows(2).all(|w| w[1] <= w[0]);
        let small = eps[3] < 1e-4;
        line(&format!(
            "  r = {r}: epsilon(N=1,3,5,7) = {:.3e} {:.3e} {:.3e} {:.3e}  N=7 < 1e-4: {small}  monotone: {monotone}",
            eps[0], eps[1], eps[2], eps[3]
        ));
        pass &= monotone && small;
    }
    let dt = t0.elapsed();
    pass &= dt < Duration::from_secs(10);
    verdict(1, pass, &format!("squeezed vacuum by 7-term superposition ({dt:.2?}, limit 10 s)"));
    assert!(pass);
}

#[test]
fn criterion_2_tabulated_parameters() {
    let _g = lock();
    let t0 = Instant::now();
    let rows = tables::designated();
    let mut within = 0;
    for row in &rows {
        let target = row.target_spec().build(DEFAULT_N_MAX).unwrap();
        let printed = tables::misfit(&row.params(), &target);
        let (p, eps) = refined(row);
        let factor = row.tolerance_factor();
        let ok = eps <= factor * row.epsilon && eps >= row.epsilon / factor;
        within += ok as usize;
        line(&format!(
            "  {:6} {:16} published {:.2e}  printed {:.2e}  in rounding box {:.2e}  ratio {:7.2}  (x{factor}) {}  beta {:.2}/{:.2}",
            row.id(),
            row.state,
            row.epsilon,
            printed,
            eps,
            eps / row.epsilon,
            if ok { "ok" } else { "MISS" },
            row.beta,
            p.beta()
        ));
    }
    let dt = t0.elapsed();
    let pass = within >= 8 && dt < Duration::from_secs(60);
    verdict(
        2,
        pass,
        &format!("{within} of {} designated rows within tolerance, need 8 ({dt:.2?}, limit 60 s)", rows.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_3_optimization() {
    let _g = lock();
    let t0 = Instant::now();
    let cases: [(SchemeKind, &str, f64, u64); 4] = [
        (SchemeKind::S1Line, "AS(1,2,1)", 2.6e-4, 1),
        (SchemeKind::S1Lattice, "B(0.1,4)", 1.7e-4, 2),
        (SchemeKind::S2Line, "NS(2,0.3)", 1.3e-5, 3),
        (SchemeKind::S2Lattice, "psi012'", 9.2e-5, 4),
    ];
    let mut pass = true;
    for (kind, target, published, seed) in cases {
        let spec: TargetSpec = target.parse().unwrap();
        let ga = GaConfig {
            rng_seed: seed,
            restarts: 10,
            ..GaConfig::default()
        };
        let t = Instant::now();
        let best = optimizer::optimize(kind, &spec, &Bounds::default(), &ga).unwrap();
        let gate = (2.0 * published).max(1e-3);
        let ok = best.epsilon <= gate;
        pass &= ok;
        line(&format!(
            "  {:10} {:10} epsilon {:.3e}  gate {:.1e}  published {:.1e}  {} ({:.1?})",
            kind.name(),
            target,
            best.epsilon,
            gate,
            published,
            if ok { "ok" } else { "MISS" },
            t.elapsed()
        ));
    }
    let dt = t0.elapsed();
    pass &= dt < Duration::from_secs(15 * 60);
    verdict(3, pass, &format!("GA with 10 restarts ({dt:.1?}, limit 15 min)"));
    assert!(pass);
}

#[test]
fn criterion_4_probabilities() {
    let _g = lock();
    let mut pass = true;
    for id in ["II.2", "V.2", "III.6"] {
        let row = tables::row(id).unwrap();
        let w = row.window.unwrap();
        let (p, _) = refined(row);
        let target = row.target_spec().build(DEFAULT_N_MAX).unwrap();
        let wc = WindowConfig::new(w.delta);
        let probs = metrics::overall_probability(&p, &wc).unwrap();
        let avg = metrics::average_misfit(&p, &target, &wc).unwrap();
        let rp = probs.overall_p / w.p;
        let ra = avg / w.epsilon_avg;
        let ok_p = (0.5..=2.0).contains(&rp);
        let ok_a = (1.0 / 3.0..=3.0).contains(&ra);
        pass &= ok_p && ok_a;
        line(&format!(
            "  {id:6} delta {}  P {:.3e} vs {} (ratio {rp:.2}, {})  epsilon_avg {:.3e} vs {} (ratio {ra:.2}, {})  windows {:?} x{}",
            w.delta,
            probs.overall_p,
            w.p,
            if ok_p { "ok" } else { "MISS" },
            avg,
            w.epsilon_avg,
            if ok_a { "ok" } else { "MISS" },
            probs
                .per_measurement_p
                .iter()
                .map(|v| format!("{v:.3}"))
                .collect::<Vec<_>>(),
            probs.degenerate_windows
        ));
    }
    verdict(4, pass, "P within x2 and epsilon_avg within x3 of published");
    assert!(pass);
}

#[test]
fn criterion_5_oracle_equivalence() {
    let _g = lock();
    let mut worst: f64 = 0.0;
    for row in tables::designated() {
        for (label, p) in [("printed", row.params()), ("refined", refined(row).0)] {
            let analytic = scheme::output_state(&p)
                .unwrap()
                .to_fock(ORACLE_N_MAX)
                .unwrap();
            let fock = simulate_scheme(&p, ORACLE_N_MAX).unwrap();
            let gap = 1.0 - fidelity(&analytic, &fock).unwrap();
            worst = worst.max(gap);
            line(&format!("  {:6} {label}: 1 - F = {gap:.2e}", row.id()));
        }
    }
    let pass = worst <= 1e-8;
    verdict(5, pass, &format!("oracle fidelity, worst 1 - F = {worst:.2e} (limit 1e-8)"));
    assert!(pass);
}

fn random_s1(kind: SchemeKind, rng: &mut ChaCha8Rng) -> SchemeParams {
    let phi: f64 = rng.random_range(5e-4..5e-2);
    let beta: f64 = rng.random_range(0.2..1.5);
    let alpha = beta / (phi / 2.0).sin();
    let x = [
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
    ];
    SchemeParams::s1(kind, alpha, phi, x)
}

fn eps_at(p: &SchemeParams, x: &[f64], target: &css_engineering::FockVector) -> f64 {
    scheme::output_state(&p.with_outcomes(x))
        .unwrap()
        .misfit_against(target)
        .unwrap()
}

#[test]
fn criterion_6_symmetries() {
    let _g = lock();
    let target = "AS(1,2,1)".parse::<TargetSpec>().unwrap().build(DEFAULT_N_MAX).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut swap, mut joint) = (0.0_f64, 0.0_f64);
    let mut single = [0.0_f64; 2];
    let mut single_over = 0;
    for i in 0..100 {
        let kind = if i % 2 == 0 { SchemeKind::S1Line } else { SchemeKind::S1Lattice };
        let p = random_s1(kind, &mut rng);
        let [x1, x2, x3] = [p.x1, p.x2, p.x3];
        let e = eps_at(&p, &[x1, x2, x3], &target);
        if kind == SchemeKind::S1Line {
            swap = swap.max((eps_at(&p, &[x2, x1, -x3], &target) - e).abs());
        }
        joint = joint.max((eps_at(&p, &[-x1, -x2, x3], &target) - e).abs());
        let flips = [
            (eps_at(&p, &[-x1, x2, x3], &target) - e).abs(),
            (eps_at(&p, &[x1, -x2, x3], &target) - e).abs(),
        ];
        for (k, d) in flips.iter().enumerate() {
            single[k] = single[k].max(*d);
            single_over += (*d > 1e-6) as usize;
        }
    }
    line(&format!("  swap (x1<->x2, x3->-x3), line draws: max |d epsilon| = {swap:.2e}"));
    line(&format!("  joint flip (x1,x2)->(-x1,-x2), all draws: max |d epsilon| = {joint:.2e}"));
    line(&format!(
        "  single flips (recorded only): max |d epsilon| = {:.2e} (x1), {:.2e} (x2); {single_over} of 200 above 1e-6",
        single[0], single[1]
    ));
    let pass = swap <= 1e-12 && joint <= 1e-12;
    verdict(6, pass, "exact symmetries within 1e-12 over 100 random draws");
    assert!(pass);
}

#[test]
fn criterion_7_properties() {
    let _g = lock();
    let mut checks: Vec<(&str, bool)> = Vec::new();

    let specs = [
        "AS(1,2,1)", "AS(sqrt(2),3,2)", "B(0.1,4)", "B(0.2,10)", "B(0.5,5)", "NS(2,0.3)",
        "NS(1,0.05)", "SV(0.5,0)", "SV(0.85,1.2)", "psi02", "psi012'", "psi0123",
    ];
    let norms_ok = specs.iter().all(|s| {
        let v = s.parse::<TargetSpec>().unwrap().build(DEFAULT_N_MAX).unwrap();
        (v.norm_sqr() - 1.0).abs() < 1e-10
    });
    checks.push(("factory states unit norm (1e-10)", norms_ok));

    let b0 = "B(0,6)".parse::<TargetSpec>().unwrap().build(16).unwrap();
    let b1 = "B(1,6)".parse::<TargetSpec>().unwrap().build(16).unwrap();
    let limits_ok = b0.coeffs()[0] == Complex64::new(1.0, 0.0)
        && b0.coeffs()[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0))
        && b1.coeffs()[6] == Complex64::new(1.0, 0.0)
        && b1.coeffs().iter().enumerate().all(|(n, c)| n == 6 || *c == Complex64::new(0.0, 0.0));
    checks.push(("binomial p=0 -> |0>, p=1 -> |M> exactly", limits_ok));

    let g = Complex64::new(1.3, 0.4);
    let cat = CoherentSuperposition::new([(Complex64::new(1.0, 0.0), g), (Complex64::new(1.0, 0.0), -g)])
        .normalize()
        .unwrap()
        .to_fock(DEFAULT_N_MAX)
        .unwrap();
    let parity_ok = cat.coeffs().iter().skip(1).step_by(2).all(|c| c.norm() < 1e-12);
    checks.push(("even cat has no odd Fock weight (1e-12)", parity_ok));

    let pdf_ok = [0.0, 0.7, std::f64::consts::FRAC_PI_2].iter().all(|&theta| {
        let pdf = |x: f64| {
            let a = quadrature_overlap(x, theta, g);
            let b = quadrature_overlap(x, theta, -g);
            let n2 = 2.0 + 2.0 * (-2.0 * g.norm_sqr()).exp();
            (a + b).norm_sqr() / n2
        };
        let total = css_engineering::quadrature::integrate(pdf, -12.0, 12.0);
        (total - 1.0).abs() < 1e-9
    });
    checks.push(("quadrature pdf integrates to 1 (1e-9)", pdf_ok));

    let row = tables::row("II.2").unwrap();
    let p = row.params();
    let target = row.target_spec().build(DEFAULT_N_MAX).unwrap();
    let cells = metrics::misfit_grid(&p, &target, &WindowConfig::with_grid(0.35, 5)).unwrap();
    let avg = metrics::weighted_mean(&cells).unwrap();
    let eps: Vec<f64> = cells.iter().filter_map(|c| c.misfit).collect();
    let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    checks.push(("epsilon_avg within grid min/max", lo <= avg && avg <= hi));

    let ga = GaConfig {
        population: 40,
        generations: 60,
        restarts: 2,
        rng_seed: 99,
        ..GaConfig::default()
    };
    let spec: TargetSpec = "NS(2,0.3)".parse().unwrap();
    let run = || {
        let best = optimizer::optimize(SchemeKind::S2Line, &spec, &Bounds::default(), &ga).unwrap();
        serde_json::to_string(&(best.params, best.epsilon, best.summary)).unwrap()
    };
    checks.push(("GA seed determinism byte-exact", run() == run()));

    for (name, ok) in &checks {
        line(&format!("  {name}: {}", if *ok { "ok" } else { "MISS" }));
    }
    let pass = checks.iter().all(|c| c.1);
    verdict(7, pass, &format!("{} property checks", checks.len()));
    assert!(pass);
}

#[test]
fn criterion_8_trade_off_curve() {
    let _g = lock();
    let t0 = Instant::now();
    let row = tables::row("III.6").unwrap();
    let (p, _) = refined(row);
    let target = row.target_spec().build(DEFAULT_N_MAX).unwrap();
    let deltas: Vec<f64> = (0..24).map(|i| 0.05 + 0.05 * i as f64).collect();
    let pts = prob_sweep(&p, &target, &deltas, metrics::DEFAULT_GRID_POINTS).unwrap();
    for pt in &pts {
        line(&format!(
            "  delta {:.2}  P {:.4e}  epsilon_avg {:.4e}",
            pt.delta, pt.overall_p, pt.epsilon_avg
        ));
    }
    let increasing = pts
        .windows(2)
        .all(|w| w[1].overall_p > w[0].overall_p && w[1].epsilon_avg > w[0].epsilon_avg);
    let dt = t0.elapsed();
    let pass = increasing && dt < Duration::from_secs(300);
    verdict(
        8,
        pass,
        &format!("epsilon_avg strictly increasing with P over delta 0.05..1.2 ({dt:.1?}, limit 5 min)"),
    );
    assert!(pass);
}
