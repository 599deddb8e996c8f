//! Published optimization results, kept as printed so that the rounding of
//! every entry is known.
//!
//! Table I lists several optima of one target on the three-measurement
//! lattice setup at different `(α, φ)` scales; Tables II and III the
//! three-measurement setup on a line and on a lattice; Tables IV and V the
//! two-measurement setup along a line (`θ = 0`) and on a lattice (`θ = π`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::half_last_digit;
use crate::scheme::{SchemeKind, SchemeParams, DEFAULT_N_CSS};
use crate::targets::TargetSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    I,
    II,
    III,
    IV,
    V,
}

impl TableId {
    pub const ALL: [TableId; 5] = [TableId::I, TableId::II, TableId::III, TableId::IV, TableId::V];

    pub fn kind(self) -> SchemeKind {
        match self {
            TableId::I | TableId::III => SchemeKind::S1Lattice,
            TableId::II => SchemeKind::S1Line,
            TableId::IV => SchemeKind::S2Line,
            TableId::V => SchemeKind::S2Lattice,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TableId::I => "I",
            TableId::II => "II",
            TableId::III => "III",
            TableId::IV => "IV",
            TableId::V => "V",
        };
        f.write_str(s)
    }
}

impl FromStr for TableId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(TableId::I),
            "II" | "2" => Ok(TableId::II),
            "III" | "3" => Ok(TableId::III),
            "IV" | "4" => Ok(TableId::IV),
            "V" | "5" => Ok(TableId::V),
            _ => Err(Error::Config(format!("unknown table '{s}', expected I..V"))),
        }
    }
}

/// Window columns (absent for Table I).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedWindow {
    pub delta: f64,
    pub p: f64,
    pub epsilon_avg: f64,
}

/// One printed row. Parameters are the literal strings of the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    pub table: TableId,
    /// Row number within the table, from 1.
    pub row: usize,
    pub state: &'static str,
    /// Target in the text form of [`TargetSpec`].
    pub target: &'static str,
    pub epsilon: f64,
    pub alpha: &'static str,
    pub phi: &'static str,
    pub beta: f64,
    /// `(r, γ)` of the two-measurement setup.
    pub squeeze: Option<(&'static str, &'static str)>,
    pub x: &'static [&'static str],
    pub window: Option<PublishedWindow>,
}

fn num(s: &str) -> f64 {
    s.parse().expect("table entries are valid numbers")
}

impl PublishedRow {
    pub fn kind(&self) -> SchemeKind {
        self.table.kind()
    }

    pub fn target_spec(&self) -> TargetSpec {
        self.target.parse().expect("table targets parse")
    }

    /// Parameter strings in the order `α, φ, [r, γ], x…`.
    pub fn fields(&self) -> Vec<&'static str> {
        let mut v = vec![self.alpha, self.phi];
        if let Some((r, g)) = self.squeeze {
            v.push(r);
            v.push(g);
        }
        v.extend_from_slice(self.x);
        v
    }

    /// Printed values in [`PublishedRow::fields`] order.
    pub fn values(&self) -> Vec<f64> {
        self.fields().iter().map(|s| num(s)).collect()
    }

    /// Half a unit of the last printed digit of each field.
    pub fn rounding(&self) -> Vec<f64> {
        self.fields().iter().map(|s| half_last_digit(s)).collect()
    }

    /// Parameters from values in [`PublishedRow::fields`] order.
    pub fn params_from(&self, v: &[f64]) -> SchemeParams {
        let kind = self.kind();
        if kind.is_s1() {
            SchemeParams::s1(kind, v[0], v[1], [v[2], v[3], v[4]])
        } else {
            let mut p = SchemeParams::s2(kind, v[0], v[1], v[2], v[3], [v[4], v[5]]);
            p.n_css = DEFAULT_N_CSS;
            p
        }
    }

    /// Parameters exactly as printed.
    pub fn params(&self) -> SchemeParams {
        self.params_from(&self.values())
    }

    /// Misfit tolerance factor: 10, or 100 below `1e-5` where two printed
    /// digits cannot pin the optimum.
    pub fn tolerance_factor(&self) -> f64 {
        if self.epsilon < 1e-5 {
            100.0
        } else {
            10.0
        }
    }

    pub fn id(&self) -> String {
        format!("{}.{}", self.table, self.row)
    }
}

macro_rules! w {
    ($d:expr, $p:expr, $e:expr) => {
        Some(PublishedWindow {
            delta: $d,
            p: $p,
            epsilon_avg: $e,
        })
    };
}

macro_rules! s1 {
    ($t:ident, $n:expr, $state:expr, $target:expr, $eps:expr, $a:expr, $phi:expr, $beta:expr,
     [$x1:expr, $x2:expr, $x3:expr], $win:expr) => {
        PublishedRow {
            table: TableId::$t,
            row: $n,
            state: $state,
            target: $target,
            epsilon: $eps,
            alpha: $a,
            phi: $phi,
            beta: $beta,
            squeeze: None,
            x: &[$x1, $x2, $x3],
            window: $win,
        }
    };
}

macro_rules! s2 {
    ($t:ident, $n:expr, $state:expr, $target:expr, $eps:expr, $a:expr, $phi:expr, $beta:expr,
     $r:expr, $g:expr, [$x1:expr, $x2:expr], $win:expr) => {
        PublishedRow {
            table: TableId::$t,
            row: $n,
            state: $state,
            target: $target,
            epsilon: $eps,
            alpha: $a,
            phi: $phi,
            beta: $beta,
            squeeze: Some(($r, $g)),
            x: &[$x1, $x2],
            window: $win,
        }
    };
}

const AS121: &str = "AS(1,2,1)";

/// Every printed row, in table order.
pub static ROWS: &[PublishedRow] = &[
    s1!(I, 1, "|1,2,1>_AS", AS121, 1.421e-4, "22981", "7.1e-5", 0.82, ["2.26", "-2.18", "4.13"], None),
    s1!(I, 2, "|1,2,1>_AS", AS121, 1.031e-4, "4363", "3.9e-4", 0.85, ["2.039", "-2.2", "3.81"], None),
    s1!(I, 3, "|1,2,1>_AS", AS121, 1.027e-4, "349", "4.9e-3", 0.86, ["1.97", "-2.18", "3.75"], None),
    s1!(I, 4, "|1,2,1>_AS", AS121, 1.137e-4, "886", "2e-3", 0.89, ["1.83", "2.15", "3.54"], None),
    s1!(I, 5, "|1,2,1>_AS", AS121, 1.046e-4, "347", "5.1e-3", 0.87, ["-1.91", "2.17", "3.65"], None),
    s1!(I, 6, "|1,2,1>_AS", AS121, 1.055e-4, "238", "7.3e-3", 0.88, ["1.88", "-2.16", "3.62"], None),
    s1!(I, 7, "|1,2,1>_AS", AS121, 1.586e-4, "698", "2.3e-3", 0.8, ["2.35", "-2.19", "4.241"], None),
    s1!(I, 8, "|1,2,1>_AS", AS121, 1.046e-4, "417", "4.2e-3", 0.88, ["-1.89", "2.17", "3.62"], None),
    s1!(I, 9, "|1,2,1>_AS", AS121, 1.106e-4, "307", "5.5e-3", 0.85, ["2.08", "2.2", "3.87"], None),
    s1!(II, 1, "|1,1.5,1>_AS", "AS(1,1.5,1)", 8.8e-5, "616", "1.7e-3", 0.55, ["1.14", "0.82", "2.63"], w!(0.75, 0.004, 0.073)),
    s1!(II, 2, "|1,2,1>_AS", AS121, 2.6e-4, "245", "6.3e-3", 0.77, ["-1.97", "-0.25", "-1.94"], w!(0.35, 0.025, 0.011)),
    s1!(II, 3, "|sqrt2,2.5,2>_AS", "AS(sqrt(2),2.5,2)", 7.5e-3, "698", "3.7e-3", 1.29, ["2.13", "-1.03", "-1.52"], w!(0.3, 0.005, 0.043)),
    s1!(II, 4, "|sqrt2,3,2>_AS", "AS(sqrt(2),3,2)", 4.4e-3, "691", "3.1e-3", 1.31, ["-2.17", "-1.0", "-1.61"], w!(0.4, 0.012, 0.068)),
    s1!(II, 5, "|0.1,5>_B", "B(0.1,5)", 2.5e-4, "780", "6.4e-3", 0.6, ["0.29", "3.72", "2.62"], w!(1.0, 0.004, 0.041)),
    s1!(II, 6, "|0.3,6>_B", "B(0.3,6)", 9.6e-3, "492", "5.2e-3", 1.29, ["-0.38", "2.52", "0.8"], w!(0.4, 0.014, 0.024)),
    s1!(II, 7, "|0.2,8>_B", "B(0.2,8)", 2.8e-3, "939", "2.9e-3", 1.39, ["0.54", "-1.86", "2.17"], w!(0.5, 0.017, 0.024)),
    s1!(II, 8, "psi012", "psi012", 3.4e-4, "269", "1.9e-3", 0.26, ["-3.99", "0.1", "-0.45"], w!(0.5, 0.085, 0.019)),
    s1!(II, 9, "psi0123", "psi0123", 2.0e-3, "540", "2.6e-3", 0.71, ["3.44", "1.63", "-3.59"], w!(1.5, 0.005, 0.077)),
    s1!(III, 1, "|1,1,1>_AS", "AS(1,1,1)", 2.3e-4, "1114", "1.1e-3", 0.63, ["1.77", "0.23", "2.02"], w!(0.5, 0.005, 0.078)),
    s1!(III, 2, "|sqrt2,1.5,2>_AS", "AS(sqrt(2),1.5,2)", 4.2e-3, "341", "5.1e-3", 0.86, ["0.92", "-1.04", "2.37"], w!(0.4, 0.002, 0.082)),
    s1!(III, 3, "|0.1,4>_B", "B(0.1,4)", 1.7e-4, "481", "2.3e-3", 0.56, ["0.84", "1.51", "2.03"], w!(0.4, 0.001, 0.028)),
    s1!(III, 4, "|0.4,3>_B", "B(0.4,3)", 6e-3, "1105", "1.9e-3", 1.02, ["0", "-1.58", "1.55"], w!(0.3, 0.003, 0.049)),
    s1!(III, 5, "|0.2,8>_B", "B(0.2,8)", 6.3e-3, "449", "6.9e-3", 1.54, ["0", "-2.15", "2.1"], w!(0.5, 0.004, 0.054)),
    s1!(III, 6, "|0.2,10>_B", "B(0.2,10)", 1.5e-3, "1679", "1.7e-3", 1.42, ["0", "-2.39", "1.93"], w!(0.8, 0.002, 0.051)),
    s1!(III, 7, "|0.3,10>_B", "B(0.3,10)", 6.1e-3, "407", "8.3e-3", 1.71, ["0", "-2.43", "2.44"], w!(0.7, 0.001, 0.057)),
    s1!(III, 8, "|2,0.1>_NS", "NS(2,0.1)", 5.5e-4, "671", "1.3e-3", 0.45, ["0.56", "-2.45", "0"], w!(0.15, 0.009, 0.088)),
    s1!(III, 9, "psi02", "psi02", 6.4e-4, "227", "1.5e-3", 0.17, ["-0.09", "-2.99", "0"], w!(0.3, 0.003, 0.062)),
    s1!(III, 10, "psi012", "psi012", 7.9e-4, "374", "5.8e-3", 1.1, ["-2.47", "-1.93", "1.61"], w!(0.5, 0.008, 0.087)),
    s2!(IV, 1, "|1,1,1>_AS", "AS(1,1,1)", 1.7e-3, "549", "1.4e-3", 0.38, "0.1", "0.44", ["0.68", "1.25"], w!(0.25, 0.032, 0.045)),
    s2!(IV, 2, "|1,2,1>_AS", AS121, 3.4e-3, "1355", "1.2e-3", 0.78, "0.1", "0.44", ["0.42", "1.35"], w!(0.3, 0.094, 0.011)),
    s2!(IV, 3, "|sqrt2,3,2>_AS", "AS(sqrt(2),3,2)", 5.9e-3, "383", "6.8e-3", 1.31, "0.002", "0.32", ["0.5", "0.92"], w!(0.3, 0.04, 0.011)),
    s2!(IV, 4, "|0.2,8>_B", "B(0.2,8)", 6e-3, "1883", "1.2e-3", 1.14, "0.1", "0.44", ["0.41", "1.08"], w!(0.35, 0.098, 0.012)),
    s2!(IV, 5, "|1,0.05>_NS", "NS(1,0.05)", 2.1e-4, "258", "2.2e-3", 0.29, "0.17", "0.51", ["1.49", "2.11"], w!(0.15, 0.002, 0.043)),
    s2!(IV, 6, "|1,0.15>_NS", "NS(1,0.15)", 2.6e-4, "206", "6.1e-3", 0.63, "0.3", "0.66", ["1.51", "2.14"], w!(0.15, 0.005, 0.038)),
    s2!(IV, 7, "|2,0.3>_NS", "NS(2,0.3)", 1.3e-5, "92", "7.7e-3", 0.36, "0.85", "1.19", ["0.67", "0"], w!(0.15, 0.01, 0.048)),
    s2!(IV, 8, "|2,0.5>_NS", "NS(2,0.5)", 2.8e-3, "509", "4.5e-3", 1.13, "0.53", "0.89", ["0.84", "0"], w!(0.15, 0.002, 0.039)),
    s2!(IV, 9, "psi02'", "psi02'", 9.1e-4, "731", "1.1e-3", 0.38, "0.002", "0.32", ["0", "0"], w!(0.15, 0.028, 0.025)),
    s2!(IV, 10, "psi012''", "psi012''", 4.2e-3, "242", "3.9e-3", 0.47, "0.001", "0.32", ["0.23", "1.2"], w!(0.4, 0.17, 0.019)),
    s2!(V, 1, "|1,1,1>_AS", "AS(1,1,1)", 3.2e-4, "264", "2.5e-3", 0.33, "0.1", "0.44", ["1.06", "1.75"], w!(0.3, 0.008, 0.05)),
    s2!(V, 2, "|1,2,1>_AS", AS121, 3.2e-6, "586", "2.7e-3", 0.78, "0.13", "0.47", ["0.42", "1.5"], w!(0.35, 0.13, 0.003)),
    s2!(V, 3, "|sqrt2,1.5,2>_AS", "AS(sqrt(2),1.5,2)", 2.5e-3, "1595", "1.4e-3", 1.14, "0.37", "0.73", ["1.51", "1.72"], w!(0.25, 0.026, 0.04)),
    s2!(V, 4, "|0.2,8>_B", "B(0.2,8)", 6.9e-6, "1810", "1.5e-3", 1.31, "0.2", "0.55", ["0", "1.46"], w!(0.35, 0.13, 0.001)),
    s2!(V, 5, "|0.4,6>_B", "B(0.4,6)", 3.7e-4, "771", "4.6e-3", 1.76, "0.43", "0.79", ["1.12", "1.62"], w!(0.4, 0.028, 0.009)),
    s2!(V, 6, "|0.5,5>_B", "B(0.5,5)", 3.3e-3, "2751", "1.3e-3", 1.83, "0.54", "0.9", ["1.49", "1.65"], w!(0.45, 0.014, 0.028)),
    s2!(V, 7, "psi02'", "psi02'", 1.5e-6, "267", "4.7e-3", 0.63, "0.11", "0.45", ["0", "0"], w!(0.15, 0.016, 0.03)),
    s2!(V, 8, "psi012'", "psi012'", 9.2e-5, "90", "7.5e-3", 0.33, "0.1", "0.44", ["0.11", "1.04"], w!(0.2, 0.051, 0.003)),
    s2!(V, 9, "psi012''", "psi012''", 1.5e-3, "403", "2.7e-3", 0.55, "0.13", "0.47", ["0", "0.4"], w!(0.15, 0.031, 0.011)),
];

pub fn rows(table: TableId) -> impl Iterator<Item = &'static PublishedRow> {
    ROWS.iter().filter(move |r| r.table == table)
}

/// Row by identifier such as `"II.2"`.
pub fn row(id: &str) -> Option<&'static PublishedRow> {
    let (t, n) = id.split_once('.')?;
    let t: TableId = t.parse().ok()?;
    let n: usize = n.parse().ok()?;
    ROWS.iter().find(|r| r.table == t && r.row == n)
}

/// Rows singled out for evaluation at their printed parameters.
pub const DESIGNATED: &[&str] = &[
    "I.3", "II.1", "II.2", "II.5", "II.8", "III.3", "III.6", "III.8", "IV.5", "IV.7", "V.2", "V.4",
    "V.8",
];

pub fn designated() -> Vec<&'static PublishedRow> {
    DESIGNATED.iter().map(|id| row(id).expect("designated rows exist")).collect()
}

/// Misfit of the output at `p`; 1 for degenerate points.
pub fn misfit(p: &SchemeParams, target: &crate::state::FockVector) -> f64 {
    crate::optimizer::misfit_at(p, target)
}

/// Best parameters within the rounding box of the printed row: every entry
/// may move by half a unit of its last printed digit.
pub fn refine_row(row: &PublishedRow, starts: usize, seed: u64) -> Result<(SchemeParams, f64)> {
    let target = row.target_spec().build(crate::state::DEFAULT_N_MAX)?;
    let (v, e) = crate::optimizer::refine_in_box(
        |v| misfit(&row.params_from(v), &target),
        &row.values(),
        &row.rounding(),
        starts,
        seed,
    );
    Ok((row.params_from(&v), e))
}
