use super::{btilde_index, MechanicalKConnection};
use crate::diff::{gradient, jvp};
use crate::error::{Error, Result};
use crate::geometry::field::KVectorField;
use crate::geometry::frame::{to_natural, FrameFn};
use crate::geometry::point::TkLayout;
use crate::lagrange_poincare::{lp_names, LpLayout};
use crate::scalar::{HyperDual, Scalar};
use crate::solver::grid::{differentiate, FieldGrid};
use crate::solver::linalg::{Lu, Mat, PIVOT_TOL};
use crate::solver::march::{grid_march, MarchOptions};
use crate::symmetry::BundleFrame;

/// Natural state over `q_H = (x, φ_H)` whose hat-frame quasi-velocities are the
/// reduced `(v_α, w_α)`.
fn state_over<S: Scalar>(conn: &MechanicalKConnection, layout: LpLayout, y: &[S], fiber: &[S]) -> Result<Vec<S>> {
    let mut q: Vec<S> = y[..layout.nb].to_vec();
    q.extend_from_slice(fiber);
    let z = BundleFrame::hat(conn.data).matrix(&q)?;
    let mut x = q;
    for a in 0..layout.k {
        x.extend(to_natural(&z, &y[layout.block(a)]));
    }
    Ok(x)
}

fn fiber_rates<S: Scalar>(conn: &MechanicalKConnection, layout: LpLayout, y: &[S], fiber: &[S]) -> Result<(Vec<Vec<S>>, Vec<Vec<S>>)> {
    let (nb, nf, k) = (layout.nb, layout.nf, layout.k);
    let x = state_over(conn, layout, y, fiber)?;
    let n = nb + nf;
    let q = &x[..n];
    let bt = conn.blocks(&x)?.btilde()?;
    let z = BundleFrame::tilde(conn.data).matrix(q)?;
    let amat = conn.data.a_at(q)?;
    let mut lift = Vec::with_capacity(k);
    let mut xi = Vec::with_capacity(k);
    for a in 0..k {
        // Connection correction −v_γ^i B̃_{αi}^{γb}, shared by both rates.
        let mut corr = vec![S::zero(); nf];
        for g in 0..k {
            for i in 0..nb {
                let v = y[layout.v(g, i)];
                for (c, cr) in corr.iter_mut().enumerate() {
                    *cr -= v * bt[btilde_index(k, nb, nf, a, i, g, c)];
                }
            }
        }
        let mut rate = vec![S::zero(); nf];
        for (b, r) in rate.iter_mut().enumerate() {
            for i in 0..nb {
                *r += y[layout.v(a, i)] * z[(i, nb + b)];
            }
            for c in 0..nf {
                *r += corr[c] * z[(nb + c, nb + b)];
            }
        }
        lift.push(rate);
        let vt = amat.vecmat(&y[layout.w_range(a)]);
        xi.push(vt.iter().zip(&corr).map(|(&p, &c)| p - c).collect());
    }
    Ok((lift, xi))
}

/// `∂φ_H^a/∂t^α = −v_γ^i K_b^a (γ_i^c A_c^b δ_α^γ + B̃_{αi}^{γb})`, row α.
pub fn horizontal_lift_rhs<S: Scalar>(conn: &MechanicalKConnection, layout: LpLayout, y: &[S], fiber: &[S]) -> Result<Vec<Vec<S>>> {
    Ok(fiber_rates(conn, layout, y, fiber)?.0)
}

/// `ξ_α^a = v_α^b A_b^a + v_γ^i B̃_{αi}^{γa}` at the lifted point, row α.
pub fn reconstruction_rhs<S: Scalar>(conn: &MechanicalKConnection, layout: LpLayout, y: &[S], fiber: &[S]) -> Result<Vec<Vec<S>>> {
    Ok(fiber_rates(conn, layout, y, fiber)?.1)
}

/// The reduced field extended by the horizontal-lift equation and, with
/// `group` set, by `∂g/∂t^α = T L_g ξ_α`. State layout `[y, φ_H, g]`.
pub struct LiftedField<'a, F> {
    pub reduced: F,
    pub conn: MechanicalKConnection<'a>,
    pub layout: LpLayout,
    pub group: bool,
}

impl<F: KVectorField> LiftedField<'_, F> {
    fn split<'s, S>(&self, x: &'s [S]) -> (&'s [S], &'s [S], &'s [S]) {
        let ry = self.layout.dim();
        let nf = self.layout.nf;
        (&x[..ry], &x[ry..ry + nf], &x[ry + nf..])
    }
}

impl<F: KVectorField> KVectorField for LiftedField<'_, F> {
    fn k(&self) -> usize {
        self.layout.k
    }
    fn dim(&self) -> usize {
        self.layout.dim() + self.layout.nf * if self.group { 2 } else { 1 }
    }
    fn component<S: Scalar>(&self, alpha: usize, x: &[S]) -> Result<Vec<S>> {
        let (y, fiber, g) = self.split(x);
        let mut out = self.reduced.component(alpha, y)?;
        let (lift, xi) = fiber_rates(&self.conn, self.layout, y, fiber)?;
        out.extend_from_slice(&lift[alpha]);
        if self.group {
            out.extend(self.conn.data.left_translate(g, &xi[alpha])?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructOptions {
    pub march: MarchOptions,
    /// Largest tolerated disagreement between sweep orders.
    pub sweep_tol: f64,
    /// Box the group coordinates must stay in, per fiber coordinate.
    pub chart_box: Option<Vec<(f64, f64)>>,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { march: MarchOptions::default(), sweep_tol: 1e-6, chart_box: None }
    }
}

/// Initial data at t = 0: the reduced state, `φ_H(0)` and `g(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructInit {
    pub reduced: Vec<f64>,
    pub fiber: Vec<f64>,
    pub group: Vec<f64>,
}

/// Group coordinates `g(t)` with the samples `ξ_α(t)` that drove them.
#[derive(Clone, Debug)]
pub struct GroupPath {
    pub grid: FieldGrid,
    /// Per node, row α holds `ξ_α`.
    pub xi: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub reduced: FieldGrid,
    /// `φ_H` over Q (base then fiber coordinates).
    pub horizontal: FieldGrid,
    pub group: GroupPath,
    /// `φ = g φ_H` over Q.
    pub full: FieldGrid,
    /// `(φ, ∂φ/∂t^α)` as flat natural states.
    pub prolongation: FieldGrid,
    pub cross_order_defect: Option<f64>,
}

fn check_init<F: KVectorField>(field: &LiftedField<F>, init: &ReconstructInit) -> Result<()> {
    let l = field.layout;
    if field.reduced.dim() != l.dim() || field.reduced.k() != l.k {
        return Err(Error::Invalid("reduced field does not match the reduced layout".into()));
    }
    if init.reduced.len() != l.dim() || init.fiber.len() != l.nf || (field.group && init.group.len() != l.nf) {
        return Err(Error::Invalid(format!(
            "initial data sizes {}/{}/{} do not match layout ({}, {} fiber)",
            init.reduced.len(),
            init.fiber.len(),
            init.group.len(),
            l.dim(),
            l.nf
        )));
    }
    Ok(())
}

fn q_names(base: &[String], fiber: &[String], prefix: &str) -> Vec<String> {
    base.iter().cloned().chain(fiber.iter().map(|s| format!("{prefix}{s}"))).collect()
}

/// Horizontal lift of the reduced solution through `init.fiber`, over Q,
/// with the cross-order defect of the march.
pub fn horizontal_lift_path<F: KVectorField>(
    reduced: F,
    conn: MechanicalKConnection,
    init: &ReconstructInit,
    axes: &[Vec<f64>],
    base_names: &[String],
    fiber_names: &[String],
    opts: &ReconstructOptions,
) -> Result<(FieldGrid, Option<f64>)> {
    let layout = LpLayout::new(conn.data.n_base, conn.data.n_fiber, conn.k());
    let field = LiftedField { reduced, conn, layout, group: false };
    check_init(&field, init)?;
    let mut x0 = init.reduced.clone();
    x0.extend_from_slice(&init.fiber);
    let names = (0..field.dim()).map(|i| format!("s{i}")).collect();
    let res = grid_march(&field, &x0, axes, names, &opts.march)?;
    let ry = layout.dim();
    let mut values = Vec::with_capacity(res.grid.node_count() * layout.n());
    for node in 0..res.grid.node_count() {
        let s = res.grid.value(node);
        values.extend_from_slice(&s[..layout.nb]);
        values.extend_from_slice(&s[ry..ry + layout.nf]);
    }
    Ok((FieldGrid::new(axes.to_vec(), q_names(base_names, fiber_names, ""), values)?, res.cross_order_defect))
}

/// Runs the three reconstruction steps together: the reduced field, the
/// horizontal lift and the group path are marched as one k-vector field, and
/// `φ = g φ_H` is formed at every node.
pub fn reconstruct_solution<F: KVectorField>(
    reduced: F,
    conn: MechanicalKConnection,
    init: &ReconstructInit,
    axes: &[Vec<f64>],
    base_names: &[String],
    fiber_names: &[String],
    opts: &ReconstructOptions,
) -> Result<Reconstruction> {
    let data = conn.data;
    let (nb, nf, k) = (data.n_base, data.n_fiber, conn.k());
    let layout = LpLayout::new(nb, nf, k);
    let field = LiftedField { reduced, conn, layout, group: true };
    check_init(&field, init)?;
    let mut x0 = init.reduced.clone();
    x0.extend_from_slice(&init.fiber);
    x0.extend_from_slice(&init.group);
    let names = (0..field.dim()).map(|i| format!("s{i}")).collect();
    let res = grid_march(&field, &x0, axes, names, &opts.march)?;
    if let Some(d) = res.cross_order_defect {
        if d > opts.sweep_tol {
            return Err(Error::NonCommutingSweeps { defect: d, tol: opts.sweep_tol });
        }
    }

    let ry = layout.dim();
    let n = nb + nf;
    let tk = TkLayout::new(n, k);
    let count = res.grid.node_count();
    let (mut yv, mut hv, mut gv, mut fv, mut pv) = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut xis = Vec::with_capacity(count);
    for node in 0..count {
        let s = res.grid.value(node);
        let (y, fiber, g) = (&s[..ry], &s[ry..ry + nf], &s[ry + nf..]);
        if let Some(bx) = &opts.chart_box {
            for (i, (&v, &(lo, hi))) in g.iter().zip(bx).enumerate() {
                if !(lo..=hi).contains(&v) {
                    return Err(Error::ChartExit { index: i, value: v, lo, hi });
                }
            }
        }
        yv.extend_from_slice(y);
        hv.extend_from_slice(&y[..nb]);
        hv.extend_from_slice(fiber);
        gv.extend_from_slice(g);
        let mut qh: Vec<f64> = y[..nb].to_vec();
        qh.extend_from_slice(fiber);
        let phi = data.act(g, &qh)?;
        fv.extend_from_slice(&phi);

        // Exact prolongation: differentiate (g, q_H) ↦ g q_H along the field.
        pv.extend_from_slice(&phi);
        let mut xi_node = Vec::with_capacity(k);
        let (lift, xi) = fiber_rates(&conn, layout, y, fiber)?;
        for a in 0..k {
            let dg = data.left_translate(g, &xi[a])?;
            let mut point: Vec<f64> = g.to_vec();
            point.extend_from_slice(&qh);
            let mut dir = dg;
            dir.extend_from_slice(&y[layout.v_range(a)]);
            dir.extend_from_slice(&lift[a]);
            let u = jvp(|h: &[HyperDual<f64>]| data.act(&h[..nf], &h[nf..]), &point, &dir)?.1;
            pv.extend_from_slice(&u);
            xi_node.push(xi[a].clone());
        }
        xis.push(xi_node);
    }
    debug_assert_eq!(pv.len(), count * tk.dim());
    let full_names = q_names(base_names, fiber_names, "");
    let mut pnames = full_names.clone();
    for a in 1..=k {
        pnames.extend(full_names.iter().map(|s| format!("u{a}_{s}")));
    }
    Ok(Reconstruction {
        reduced: FieldGrid::new(axes.to_vec(), lp_names(k, base_names, fiber_names), yv)?,
        horizontal: FieldGrid::new(axes.to_vec(), q_names(base_names, fiber_names, "h_"), hv)?,
        group: GroupPath { grid: FieldGrid::new(axes.to_vec(), fiber_names.iter().map(|s| format!("g_{s}")).collect(), gv)?, xi: xis },
        full: FieldGrid::new(axes.to_vec(), full_names, fv)?,
        prolongation: FieldGrid::new(axes.to_vec(), pnames, pv)?,
        cross_order_defect: res.cross_order_defect,
    })
}

fn fd_order(grid: &FieldGrid) -> usize {
    if grid.axes.iter().all(|ax| ax.len() >= 5) {
        4
    } else {
        2
    }
}

/// Largest `|g⁻¹ ∂g/∂t^α − ξ_α|` with the derivative taken by finite differences.
pub fn group_path_defect(conn: &MechanicalKConnection, path: &GroupPath) -> Result<f64> {
    let data = conn.data;
    let nf = data.n_fiber;
    if nf == 0 {
        return Ok(0.0);
    }
    let order = fd_order(&path.grid);
    let mut worst: f64 = 0.0;
    for a in 0..path.grid.k() {
        let dg = path.grid.differentiate(a, order)?;
        for node in 0..path.grid.node_count() {
            let g = path.grid.value(node);
            let mut jac = Mat::zeros(nf, nf);
            for c in 0..nf {
                let mut e = vec![0.0; nf];
                e[c] = 1.0;
                let col = data.left_translate(g, &e)?;
                for r in 0..nf {
                    jac[(r, c)] = col[r];
                }
            }
            let xi = Lu::new(&jac, PIVOT_TOL)?.solve(&dg[node * nf..(node + 1) * nf]);
            for (p, q) in xi.iter().zip(&path.xi[node][a]) {
                worst = worst.max((p - q).abs());
            }
        }
    }
    Ok(worst)
}

/// Euler-Lagrange residual `Σ_α ∂_α(∂L/∂u_α^A) − ∂L/∂q^A` along a grid of flat
/// natural states, with the t-derivatives taken by finite differences.
pub fn el_certificate(l: &crate::lagrangian::Lagrangian, prolongation: &FieldGrid) -> Result<f64> {
    let lay = l.layout;
    let (n, k) = (lay.n, lay.k);
    if prolongation.dim() != lay.dim() {
        return Err(Error::Invalid("prolongation grid does not match the Lagrangian".into()));
    }
    let count = prolongation.node_count();
    let mut p = Vec::with_capacity(count * n * k);
    let mut dq = Vec::with_capacity(count * n);
    let qidx: Vec<usize> = (0..n).collect();
    for node in 0..count {
        let x = prolongation.value(node);
        p.extend(l.velocity_gradient(x)?);
        dq.extend(gradient(|h: &[HyperDual<f64>]| l.eval(h), x, &qidx)?);
    }
    let order = fd_order(prolongation);
    let mut res: Vec<f64> = dq.iter().map(|v| -v).collect();
    for a in 0..k {
        let dp = differentiate(&prolongation.axes, &p, n * k, a, order)?;
        for node in 0..count {
            for i in 0..n {
                res[node * n + i] += dp[node * n * k + a * n + i];
            }
        }
    }
    Ok(res.iter().fold(0.0, |m, v| m.max(v.abs())))
}
