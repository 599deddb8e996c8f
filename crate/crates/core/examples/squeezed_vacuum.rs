//! Squeezed vacuum as a finite superposition of coherent states on a line.
//!
//! ```text
//! cargo run --release --example squeezed_vacuum -- 0.85
//! ```

use css_engineering::scheme::squeezed_vacuum_css;

fn main() -> css_engineering::Result<()> {
    let rs: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("squeezing parameter"))
        .collect();
    let rs = if rs.is_empty() { vec![0.3, 0.5, 0.85] } else { rs };

    println!("{:>6} {:>3} {:>10} {:>12}", "r", "N", "gamma", "misfit");
    for r in rs {
        for n in [1, 3, 5, 7, 9] {
            let s = squeezed_vacuum_css(r, 0.0, n, None)?;
            println!("{r:6.3} {n:3} {:10.6} {:12.4e}", s.gamma, s.epsilon);
        }
    }
    Ok(())
}
