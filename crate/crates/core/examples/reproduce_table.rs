//! Reproduce one of the published tables row by row.
//!
//! ```text
//! cargo run --release --example reproduce_table -- IV
//! ```

use css_engineering::cli::{reproduce_row, table_csv};
use css_engineering::tables::{self, TableId};

fn main() -> css_engineering::Result<()> {
    let id: TableId = std::env::args().nth(1).unwrap_or_else(|| "II".into()).parse()?;
    let mut rows = Vec::new();
    for row in tables::rows(id) {
        let r = reproduce_row(row, 12, 0, None, 9)?;
        eprintln!(
            "{}.{:<2} {:16} published {:.2e}  achieved {:.2e}  {}",
            r.table,
            r.row,
            r.state,
            r.epsilon_published,
            r.epsilon_refined,
            if r.within_tolerance { "ok" } else { "outside tolerance" }
        );
        rows.push(r);
    }
    print!("{}", table_csv(&rows));
    Ok(())
}
