use css_engineering::metrics::{self, WindowConfig};
use css_engineering::state::DEFAULT_N_MAX;
use css_engineering::tables::{self, PublishedRow};

fn refined(id: &str) -> (&'static PublishedRow, css_engineering::SchemeParams, f64) {
    let row = tables::row(id).unwrap();
    let (p, e) = tables::refine_row(row, 12, 3).unwrap();
    (row, p, e)
}

fn within(got: f64, want: f64, factor: f64) -> bool {
    got <= want * factor && got >= want / factor
}

#[test]
fn misfits_at_tabulated_points() {
    for id in ["III.8", "II.8"] {
        let (row, p, e) = refined(id);
        assert!(within(e, row.epsilon, 10.0), "{id}: {e:e}");
        // printed inputs only pin beta to about one unit in the second decimal
        assert!((p.beta() - row.beta).abs() <= 0.01, "{id}: {}", p.beta());
    }
}

#[test]
fn probabilities_at_tabulated_points() {
    for (id, factor) in [("V.2", 2.0), ("IV.7", 2.0)] {
        let (row, p, _) = refined(id);
        let w = row.window.unwrap();
        let pr = metrics::overall_probability(&p, &WindowConfig::new(w.delta)).unwrap();
        assert!(within(pr.overall_p, w.p, factor), "{id}: {}", pr.overall_p);
    }
}

#[test]
fn average_misfit_of_binomial_lattice() {
    let (row, p, _) = refined("III.6");
    let w = row.window.unwrap();
    let target = row.target_spec().build(DEFAULT_N_MAX).unwrap();
    let avg = metrics::average_misfit(&p, &target, &WindowConfig::new(w.delta)).unwrap();
    assert!(within(avg, w.epsilon_avg, 3.0), "{avg}");
}

// centre-point weighting converges like a midpoint rule: about 1 % from 9 to 17
#[test]
fn grid_refinement_changes_average_by_about_one_percent() {
    for id in ["IV.7", "V.2"] {
        let (row, p, _) = refined(id);
        let d = row.window.unwrap().delta;
        let target = row.target_spec().build(DEFAULT_N_MAX).unwrap();
        let a = metrics::average_misfit(&p, &target, &WindowConfig::with_grid(d, 9)).unwrap();
        let b = metrics::average_misfit(&p, &target, &WindowConfig::with_grid(d, 17)).unwrap();
        let rel = (b - a).abs() / b;
        eprintln!("{id}: {a:.6e} -> {b:.6e} ({rel:.2e} relative)");
        assert!(rel < 2e-2, "{id}: {rel}");
    }
}

#[test]
fn small_windows_recover_the_point_misfit() {
    let (row, p, e) = refined("IV.7");
    let target = row.target_spec().build(DEFAULT_N_MAX).unwrap();
    let gap = |d: f64| {
        let avg = metrics::average_misfit(&p, &target, &WindowConfig::with_grid(d, 3)).unwrap();
        (avg - e).abs() / e
    };
    let (g3, g5) = (gap(1e-3), gap(1e-5));
    assert!(g5 < 1e-3 && g5 < g3, "{g3:e} {g5:e}");
}
