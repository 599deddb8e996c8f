//! Average misfit against success probability as the windows widen.
//! Prints CSV on stdout.
//!
//! ```text
//! cargo run --release --example trade_off > curve.csv
//! ```

use css_engineering::cli::{fmt_num, prob_sweep};
use css_engineering::tables;

fn main() -> css_engineering::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "III.6".into());
    let row = tables::row(&id).expect("unknown row id");
    let (p, _) = tables::refine_row(row, 16, 1)?;
    let target = row.target_spec().build(64)?;
    let deltas: Vec<f64> = (1..=24).map(|i| 0.05 * i as f64).collect();

    println!("delta,overall_p,epsilon_avg");
    for pt in prob_sweep(&p, &target, &deltas, 9)? {
        println!("{},{},{}", fmt_num(pt.delta), fmt_num(pt.overall_p), fmt_num(pt.epsilon_avg));
    }
    Ok(())
}
