use super::ReducedLagrangian;
use crate::diff::gradient;
use crate::error::{Error, Result};
use crate::scalar::HyperDual;
use crate::solver::grid::{differentiate, FieldGrid};

/// Node-wise residuals of the Lagrange-Poincaré field equations on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LpResidual {
    /// Largest `|∂φ^i/∂t^α − v_α^i|` at each node.
    pub kinematic: Vec<f64>,
    /// Largest base-equation residual at each node.
    pub base: Vec<f64>,
    /// Largest vertical-equation residual at each node.
    pub vertical: Vec<f64>,
}

impl LpResidual {
    pub fn per_node(&self) -> Vec<f64> {
        (0..self.kinematic.len()).map(|n| self.kinematic[n].max(self.base[n]).max(self.vertical[n])).collect()
    }
    pub fn max(&self) -> f64 {
        self.per_node().into_iter().fold(0.0, f64::max)
    }
}

/// Evaluates the three residual blocks at every node of a grid of reduced
/// states. Derivatives of `l` come from AD; t-derivatives from second-order
/// finite differences.
pub fn lp_residual(rl: &ReducedLagrangian<'_>, grid: &FieldGrid) -> Result<LpResidual> {
    let lay = rl.layout;
    let (nb, nf, k) = (lay.nb, lay.nf, lay.k);
    let d = lay.dim();
    if grid.dim() != d || grid.k() != k {
        return Err(Error::Invalid(format!("grid has {} fields over {} axes, expected {} over {}", grid.dim(), grid.k(), d, k)));
    }
    let idx: Vec<usize> = (0..d).collect();
    let nodes = grid.node_count();
    let mut grads = Vec::with_capacity(nodes * d);
    for node in 0..nodes {
        grads.extend(gradient(|h: &[HyperDual<f64>]| rl.eval(h), grid.value(node), &idx)?);
    }
    let dy: Vec<Vec<f64>> = (0..k).map(|a| grid.differentiate(a, 2)).collect::<Result<_>>()?;
    let dp: Vec<Vec<f64>> = (0..k).map(|a| differentiate(&grid.axes, &grads, d, a, 2)).collect::<Result<_>>()?;
    let mut out = LpResidual { kinematic: vec![0.0; nodes], base: vec![0.0; nodes], vertical: vec![0.0; nodes] };
    for node in 0..nodes {
        let y = grid.value(node);
        let g = &grads[node * d..(node + 1) * d];
        let q = rl.data.representative(&y[..nb]);
        let kc = rl.data.curvature(&q)?;
        let ups = rl.data.upsilon(&q)?;
        let at = |a: usize, i: usize| dy[a][node * d + i];
        let dpa = |a: usize, i: usize| dp[a][node * d + i];
        let mut kin: f64 = 0.0;
        for a in 0..k {
            for i in 0..nb {
                kin = kin.max((at(a, i) - y[lay.v(a, i)]).abs());
            }
        }
        let mut base: f64 = 0.0;
        for i in 0..nb {
            let mut r = -g[i];
            for a in 0..k {
                r += dpa(a, lay.v(a, i));
            }
            for be in 0..k {
                for b in 0..nf {
                    let mut c = 0.0;
                    for kk in 0..nb {
                        c += kc[(b * nb + i) * nb + kk] * y[lay.v(be, kk)];
                    }
                    for cc in 0..nf {
                        c -= ups[(i * nf + cc) * nf + b] * y[lay.w(be, cc)];
                    }
                    r -= c * g[lay.w(be, b)];
                }
            }
            base = base.max(r.abs());
        }
        let mut vert: f64 = 0.0;
        for a0 in 0..nf {
            let mut r = 0.0;
            for a in 0..k {
                r += dpa(a, lay.w(a, a0));
            }
            for be in 0..k {
                for b in 0..nf {
                    let mut c = 0.0;
                    for kk in 0..nb {
                        c += ups[(kk * nf + a0) * nf + b] * y[lay.v(be, kk)];
                    }
                    for cc in 0..nf {
                        c -= rl.data.algebra.c(b, a0, cc) * y[lay.w(be, cc)];
                    }
                    r -= c * g[lay.w(be, b)];
                }
            }
            vert = vert.max(r.abs());
        }
        out.kinematic[node] = kin;
        out.base[node] = base;
        out.vertical[node] = vert;
    }
    Ok(out)
}
