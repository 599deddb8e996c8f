//! Cross-check the closed-form output against a brute-force simulation of
//! the optical network in a truncated Fock space.

use css_engineering::oracle::{simulate_scheme, ORACLE_N_MAX};
use css_engineering::scheme::output_state;
use css_engineering::state::fidelity;
use css_engineering::tables;

fn main() -> css_engineering::Result<()> {
    for row in tables::ROWS {
        let p = row.params();
        let closed = output_state(&p)?.to_fock(ORACLE_N_MAX)?;
        let brute = simulate_scheme(&p, ORACLE_N_MAX)?;
        let f = fidelity(&closed, &brute)?;
        println!("{:6} {:16} {:10}  1 - F = {:.2e}", row.id(), row.state, row.kind().name(), 1.0 - f);
    }
    Ok(())
}
