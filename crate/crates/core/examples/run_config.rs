//! Drive a run from a JSON configuration, as the `css-eng` binary does.
//!
//! ```text
//! cargo run --release --example run_config -- configs/sweep_binomial_lattice.json
//! ```

use css_engineering::cli::{run, RunConfig, RunOptions};

fn main() -> css_engineering::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/evaluate_row.json").into());
    let cfg = RunConfig::from_json(&std::fs::read_to_string(path)?)?;
    let out = run(&cfg, &RunOptions::default())?;
    print!("{}", out.body);
    eprintln!("{}", out.summary);
    Ok(())
}
