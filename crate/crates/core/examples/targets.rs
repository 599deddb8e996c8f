//! Build the target states and print their photon statistics.
//!
//! ```text
//! cargo run --example targets -- "B(0.2,10)" "NS(2,0.3)"
//! ```

use css_engineering::targets::TargetSpec;

fn main() -> css_engineering::Result<()> {
    let mut specs: Vec<String> = std::env::args().skip(1).collect();
    if specs.is_empty() {
        specs = ["AS(1,2,1)", "B(0.1,4)", "B(0.2,10)", "NS(2,0.3)", "SV(0.5,0)", "psi012", "psi012'"]
            .map(String::from)
            .to_vec();
    }
    for s in specs {
        let spec: TargetSpec = s.parse()?;
        let v = spec.build(64)?;
        let probs: Vec<String> = v
            .coeffs()
            .iter()
            .take(8)
            .map(|c| format!("{:.4}", c.norm_sqr()))
            .collect();
        println!(
            "{s:12} <n> = {:7.4}  tail = {:.1e}  P(n<8) = [{}]",
            v.mean_photon_number(),
            v.tail_mass(),
            probs.join(", ")
        );
    }
    Ok(())
}
