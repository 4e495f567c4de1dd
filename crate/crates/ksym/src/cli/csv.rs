//! CSV emission: header `t1,..,tk,<names>`, one row per node with t1 fastest.

use crate::solver::grid::FieldGrid;
use std::fmt::Write as _;

/// Seventeen significant digits, enough to round-trip an f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn grid_csv(grid: &FieldGrid) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=grid.k()).map(|a| format!("t{a}")).chain(grid.names.iter().cloned()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for node in 0..grid.node_count() {
        let row: Vec<String> = grid.t(node).into_iter().chain(grid.value(node).iter().copied()).map(fmt_f64).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Parses a CSV written by [`grid_csv`] into its header and numeric rows.
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines.next()?.split(',').map(str::to_string).collect::<Vec<_>>();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|s| s.parse::<f64>().ok()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    Some((header, rows))
}
