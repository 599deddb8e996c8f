//! Evaluate a published parameter set: misfit as printed and within the
//! printed rounding, window probability and average misfit.
//!
//! ```text
//! cargo run --release --example evaluate_row -- II.2
//! ```

use css_engineering::metrics::{self, WindowConfig};
use css_engineering::tables;

fn main() -> css_engineering::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "II.2".into());
    let row = tables::row(&id).expect("unknown row id");
    let target = row.target_spec().build(64)?;

    let printed = row.params();
    println!("{} {} on {}", row.id(), row.state, row.kind().name());
    println!("  published epsilon   {:.3e}", row.epsilon);
    println!("  as printed          {:.3e}", tables::misfit(&printed, &target));

    let (p, eps) = tables::refine_row(row, 16, 1)?;
    println!("  in rounding box     {eps:.3e}");
    println!(
        "    alpha = {}, phi = {:.7e}, beta = {:.4} (table {}), x = {:?}",
        p.alpha,
        p.phi,
        p.beta(),
        row.beta,
        p.outcomes()
    );

    if let Some(w) = row.window {
        let wc = WindowConfig::new(w.delta);
        let pr = metrics::overall_probability(&p, &wc)?;
        let avg = metrics::average_misfit(&p, &target, &wc)?;
        println!("  delta {}: P = {:.3e} (table {}), epsilon_avg = {:.3e} (table {})", w.delta, pr.overall_p, w.p, avg, w.epsilon_avg);
        println!("    per measurement {:?}, {} equivalent outcome tuples", pr.per_measurement_p, pr.degenerate_windows);
    }
    Ok(())
}
