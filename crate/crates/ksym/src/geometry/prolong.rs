use crate::error::Result;
use crate::solver::grid::FieldGrid;

/// First prolongation of a sampled map ℝᵏ → Q: appends `u{α}_{name}` columns
/// holding second-order finite-difference partials. Used for residual checks only.
pub fn prolong_discrete(phi: &FieldGrid) -> Result<FieldGrid> {
    let k = phi.k();
    let n = phi.dim();
    let derivs = (0..k).map(|a| phi.differentiate(a, 2)).collect::<Result<Vec<_>>>()?;
    let mut names = phi.names.clone();
    for a in 0..k {
        names.extend(phi.names.iter().map(|s| format!("u{}_{}", a + 1, s)));
    }
    let mut values = Vec::with_capacity(phi.node_count() * n * (k + 1));
    for node in 0..phi.node_count() {
        values.extend_from_slice(phi.value(node));
        for d in &derivs {
            values.extend_from_slice(&d[node * n..(node + 1) * n]);
        }
    }
    FieldGrid::new(phi.axes.clone(), names, values)
}
