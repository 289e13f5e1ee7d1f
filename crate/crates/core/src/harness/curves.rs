//! Tabulated security curves and the solver summary.

use std::fmt;
use std::path::Path;

use crate::analysis::{collective_bound, find_eve_optimum, find_security_threshold, SecurityCurve};
use crate::error::Result;

use super::csv::CsvTable;

pub const CURVE_COLUMNS: [&str; 5] = ["p_d", "I_AB", "I_AE", "p_e", "sum"];

pub fn curve_table(grid_step: f64) -> Result<CsvTable> {
    let curve = SecurityCurve::sample(grid_step)?;
    let mut table = CsvTable::new(CURVE_COLUMNS)?;
    for p in &curve.points {
        table.push_row(&[p.p_d, p.i_ab, p.i_ae, p.p_e, p.sum()])?;
    }
    Ok(table)
}

/// Writes the curve table to `output_path` and returns it.
pub fn emit_curves(grid_step: f64, output_path: &Path) -> Result<CsvTable> {
    let table = curve_table(grid_step)?;
    table.write(output_path)?;
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub threshold: f64,
    pub eve_optimum: f64,
    pub collective_bound: f64,
}

pub fn solve_report() -> SolveReport {
    SolveReport {
        threshold: find_security_threshold(),
        eve_optimum: find_eve_optimum(),
        collective_bound: collective_bound(),
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<18}{:>10}", "quantity", "p_d")?;
        writeln!(f, "{:<18}{:>10.6}", "threshold", self.threshold)?;
        writeln!(f, "{:<18}{:>10.6}", "eve_optimum", self.eve_optimum)?;
        writeln!(f, "{:<18}{:>10.6}", "collective_bound", self.collective_bound)
    }
}
