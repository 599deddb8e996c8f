//! Genetic search for the setup parameters that best approximate a target.
//!
//! ```text
//! cargo run --release --example optimize -- s2_line "NS(2,0.3)" 3
//! ```

use css_engineering::optimizer::{optimize, Bounds, GaConfig};
use css_engineering::scheme::SchemeKind;
use css_engineering::targets::TargetSpec;

fn main() -> css_engineering::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind: SchemeKind = args.first().map_or("s1_line", String::as_str).parse()?;
    let target: TargetSpec = args.get(1).map_or("AS(1,2,1)", String::as_str).parse()?;
    let restarts = args.get(2).map_or(Ok(4), |s| s.parse()).expect("restart count");

    let ga = GaConfig {
        restarts,
        rng_seed: 17,
        ..GaConfig::default()
    };
    let best = optimize(kind, &target, &Bounds::default(), &ga)?;
    let p = &best.params;
    println!("epsilon {:.4e}", best.epsilon);
    println!("alpha {:.6}  phi {:.6e}  beta {:.4}", p.alpha, p.phi, p.beta());
    if !kind.is_s1() {
        println!("r {:.5}  gamma {:.5}", p.r, p.gamma);
    }
    println!("x {:?}", p.outcomes());
    println!("restart bests {:?}", best.summary.restart_best);
    Ok(())
}
