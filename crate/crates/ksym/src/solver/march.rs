use super::grid::{multi_index, node_index, FieldGrid};
use crate::error::{Error, Result};
use crate::geometry::field::KVectorField;

/// Classical RK4 step of size `h` along the α-th member of `field`.
///
/// A negative `h` integrates backwards.
pub fn rk4_step<F: KVectorField + ?Sized>(field: &F, alpha: usize, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !h.is_finite() || h.abs() < 1e-300 {
        return Err(Error::StepRejected(h));
    }
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
    let k1 = field.component(alpha, x)?;
    let k2 = field.component(alpha, &axpy(x, h / 2.0, &k1))?;
    let k3 = field.component(alpha, &axpy(x, h / 2.0, &k2))?;
    let k4 = field.component(alpha, &axpy(x, h, &k3))?;
    let out: Vec<f64> = (0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: Vec::new() });
    }
    Ok(out)
}

/// Integrates from `t0` to `t1` along axis `alpha` in equal steps no longer than `h_max`.
pub fn integrate_segment<F: KVectorField + ?Sized>(field: &F, alpha: usize, x: &[f64], t0: f64, t1: f64, h_max: f64) -> Result<Vec<f64>> {
    let dt = t1 - t0;
    if dt == 0.0 {
        return Ok(x.to_vec());
    }
    let steps = ((dt.abs() / h_max) - 1e-9).ceil().max(1.0) as usize;
    let h = dt / steps as f64;
    let mut s = x.to_vec();
    for _ in 0..steps {
        s = rk4_step(field, alpha, &s, h)?;
    }
    Ok(s)
}

/// Integrates from `from` to `to` one axis at a time in the listed order.
pub fn integrate_path<F: KVectorField + ?Sized>(
    field: &F,
    x: &[f64],
    from: &[f64],
    to: &[f64],
    order: &[usize],
    h_max: &[f64],
) -> Result<Vec<f64>> {
    let mut s = x.to_vec();
    for &a in order {
        s = integrate_segment(field, a, &s, from[a], to[a], h_max[a])?;
    }
    Ok(s)
}

/// Axis visiting order for [`grid_march`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepOrder(pub Vec<usize>);

impl SweepOrder {
    pub fn natural(k: usize) -> Self {
        SweepOrder((0..k).collect())
    }
    pub fn reversed(k: usize) -> Self {
        SweepOrder((0..k).rev().collect())
    }
    /// Parses digit strings such as `12` or `21` (1-based axes).
    pub fn parse(s: &str, k: usize) -> Option<Self> {
        let v: Option<Vec<usize>> = s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect();
        let v = v?;
        let mut sorted: Vec<usize> = v.clone();
        sorted.sort_unstable();
        if sorted != (1..=k).collect::<Vec<_>>() {
            return None;
        }
        Some(SweepOrder(v.into_iter().map(|d| d - 1).collect()))
    }
}

#[derive(Clone, Debug)]
pub struct MarchOptions {
    /// RK4 substeps per grid spacing.
    pub substeps: usize,
    pub order: Option<SweepOrder>,
    /// Whether to measure the cross-order defect on a probe subgrid.
    pub probe: bool,
    pub defect_warning: f64,
}

impl Default for MarchOptions {
    fn default() -> Self {
        MarchOptions { substeps: 8, order: None, probe: true, defect_warning: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct MarchResult {
    pub grid: FieldGrid,
    /// Max-norm difference between the two sweep orders on the probe subgrid.
    pub cross_order_defect: Option<f64>,
    pub defect_warning: f64,
}

impl MarchResult {
    pub fn warning(&self) -> Option<String> {
        match self.cross_order_defect {
            Some(d) if d > self.defect_warning => {
                Some(format!("cross-order defect {d:.3e} exceeds {:.1e}; the field may not be integrable", self.defect_warning))
            }
            _ => None,
        }
    }
}

fn step_limits(axes: &[Vec<f64>], substeps: usize) -> Vec<f64> {
    axes.iter()
        .map(|ax| {
            let span = if ax.len() > 1 { (ax[ax.len() - 1] - ax[0]) / (ax.len() - 1) as f64 } else { ax[0].abs().max(1.0) };
            span / substeps.max(1) as f64
        })
        .collect()
}

fn march_core<F: KVectorField + ?Sized>(field: &F, init: &[f64], axes: &[Vec<f64>], order: &[usize], h_max: &[f64]) -> Result<Vec<f64>> {
    let k = axes.len();
    let d = init.len();
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut values = vec![f64::NAN; total * d];
    let zero = vec![0.0; k];
    let start: Vec<f64> = axes.iter().map(|ax| ax[0]).collect();
    let s0 = integrate_path(field, init, &zero, &start, order, h_max)?;
    values[..d].copy_from_slice(&s0);
    let mut done = vec![false; k];
    for &a in order {
        for node in 0..total {
            let idx = multi_index(&shape, node);
            let seed_node = (0..k).all(|b| done[b] || idx[b] == 0) && idx[a] == 0;
            if !seed_node {
                continue;
            }
            let mut s = values[node * d..(node + 1) * d].to_vec();
            let mut j = idx.clone();
            for i in 1..shape[a] {
                let t: Vec<f64> = j.iter().zip(axes).map(|(&m, ax)| ax[m]).collect();
                s = integrate_segment(field, a, &s, axes[a][i - 1], axes[a][i], h_max[a]).map_err(|e| match e {
                    Error::NonFiniteState { .. } => Error::NonFiniteState { t },
                    other => other,
                })?;
                j[a] = i;
                let n = node_index(&shape, &j);
                values[n * d..(n + 1) * d].copy_from_slice(&s);
            }
        }
        done[a] = true;
    }
    Ok(values)
}

fn probe_indices(n: usize) -> Vec<usize> {
    let step = n.div_ceil(4).max(1);
    let mut v: Vec<usize> = (0..n).step_by(step).collect();
    if *v.last().unwrap() != n - 1 {
        v.push(n - 1);
    }
    v
}

/// Integrates a k-vector field over a grid by commuting sweeps.
///
/// The state `init` is taken at t = 0. The march moves to the first grid
/// node, fills the first axis of the sweep order, then sweeps each further
/// axis from every node already computed. With `probe` set and k ≥ 2, the
/// probe subgrid (every ⌈N/4⌉-th node and the last node per axis) is recomputed
/// in the reversed axis order and the largest disagreement is reported.
pub fn grid_march<F: KVectorField + ?Sized>(
    field: &F,
    init: &[f64],
    axes: &[Vec<f64>],
    names: Vec<String>,
    opts: &MarchOptions,
) -> Result<MarchResult> {
    let k = axes.len();
    if k != field.k() {
        return Err(Error::Invalid(format!("grid has {} axes for a {}-vector field", k, field.k())));
    }
    if init.len() != field.dim() || names.len() != field.dim() {
        return Err(Error::Invalid(format!(
            "initial state has {} entries and {} names for a field on R^{}",
            init.len(),
            names.len(),
            field.dim()
        )));
    }
    let order = opts.order.clone().unwrap_or_else(|| SweepOrder::natural(k));
    let h_max = step_limits(axes, opts.substeps);
    let values = march_core(field, init, axes, &order.0, &h_max)?;
    let grid = FieldGrid::new(axes.to_vec(), names, values)?;

    let mut defect = None;
    if opts.probe && k >= 2 {
        let pidx: Vec<Vec<usize>> = axes.iter().map(|ax| probe_indices(ax.len())).collect();
        let paxes: Vec<Vec<f64>> = pidx.iter().zip(axes).map(|(ix, ax)| ix.iter().map(|&i| ax[i]).collect()).collect();
        let rev: Vec<usize> = order.0.iter().rev().copied().collect();
        let pvals = march_core(field, init, &paxes, &rev, &h_max)?;
        let pshape: Vec<usize> = paxes.iter().map(Vec::len).collect();
        let d = init.len();
        let mut worst: f64 = 0.0;
        for pn in 0..pshape.iter().product::<usize>() {
            let pm = multi_index(&pshape, pn);
            let full: Vec<usize> = pm.iter().zip(&pidx).map(|(&m, ix)| ix[m]).collect();
            let a = grid.value(grid.node_index(&full));
            let b = &pvals[pn * d..(pn + 1) * d];
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        defect = Some(worst);
    }
    Ok(MarchResult { grid, cross_order_defect: defect, defect_warning: opts.defect_warning })
}
