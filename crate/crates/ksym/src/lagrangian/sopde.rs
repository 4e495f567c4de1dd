use super::{eval_matrix, Lagrangian, LagrangianKind};
use crate::diff::{dir_deriv, gradient, hessian_block, hessian_sym};
use crate::error::{Error, Result};
use crate::exprlang::CExpr;
use crate::geometry::field::KVectorField;
use crate::geometry::field::VectorField;
use crate::geometry::frame::{factor, matrix_jvp, to_natural, to_quasi, FrameFn, FrameVector};
use crate::geometry::lifts::complete_lift;
use crate::geometry::point::TkLayout;
use crate::scalar::{HyperDual, Scalar};
use crate::solver::linalg::{pinv_solve, Lu, Mat, PIVOT_TOL};

/// Force coefficients of a SOPDE in natural coordinates:
/// `Γ_α = u_α^A ∂/∂q^A + F_{αβ}^A ∂/∂u_β^A`, with `F_{αβ}^A` stored at `(α·k + β)·n + A`.
pub trait ForceFn {
    fn layout(&self) -> TkLayout;
    fn forces<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>>;
}

impl<T: ForceFn + ?Sized> ForceFn for &T {
    fn layout(&self) -> TkLayout {
        (**self).layout()
    }
    fn forces<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        (**self).forces(x)
    }
}

pub fn force_index(l: TkLayout, alpha: usize, beta: usize, a: usize) -> usize {
    (alpha * l.k + beta) * l.n + a
}

/// The k-vector field on T¹ₖQ assembled from natural force coefficients.
#[derive(Clone, Debug)]
pub struct SopdeField<F> {
    pub forces: F,
}

impl<F: ForceFn> KVectorField for SopdeField<F> {
    fn k(&self) -> usize {
        self.forces.layout().k
    }
    fn dim(&self) -> usize {
        self.forces.layout().dim()
    }
    fn component<S: Scalar>(&self, alpha: usize, x: &[S]) -> Result<Vec<S>> {
        let l = self.forces.layout();
        let f = self.forces.forces(x)?;
        let mut out = Vec::with_capacity(l.dim());
        out.extend_from_slice(&x[l.u_range(alpha)]);
        out.extend_from_slice(&f[force_index(l, alpha, 0, 0)..force_index(l, alpha, l.k - 1, l.n)]);
        Ok(out)
    }
}

/// `Γ^A_{BC} = ½ h^{AD}(∂_B h_DC + ∂_C h_DB − ∂_D h_BC)` stored at `(A·n + B)·n + C`.
pub fn christoffel<S: Scalar>(h: &[Vec<CExpr>], q: &[S]) -> Result<Vec<S>> {
    let n = h.len();
    let m = eval_matrix(h, q)?;
    let lu = Lu::new(&m, PIVOT_TOL).map_err(|_| Error::SingularMetric(q.iter().map(|v| v.re()).collect()))?;
    // dh[D] = ∂_D h.
    let mut dh = Vec::with_capacity(n);
    for d in 0..n {
        let dir: Vec<S> = (0..n).map(|i| if i == d { S::one() } else { S::zero() }).collect();
        let qs = crate::scalar::seed(q, Some(&dir), None);
        dh.push(eval_matrix(h, &qs)?.map(|v: HyperDual<S>| v.d1));
    }
    let mut out = vec![S::zero(); n * n * n];
    for b in 0..n {
        for c in 0..n {
            // Lowered symbol Γ_{D,BC}.
            let low: Vec<S> = (0..n).map(|d| (dh[b][(d, c)] + dh[c][(d, b)] - dh[d][(b, c)]).scale(0.5)).collect();
            let up = lu.solve(&low);
            for a in 0..n {
                out[(a * n + b) * n + c] = up[a];
            }
        }
    }
    Ok(out)
}

/// Forces `F_{αβ}^A = −Γ^A_{BC} u_α^B u_β^C` of a metric Lagrangian.
#[derive(Clone, Debug)]
pub struct ChristoffelForces {
    pub layout: TkLayout,
    pub h: Vec<Vec<CExpr>>,
}

impl ForceFn for ChristoffelForces {
    fn layout(&self) -> TkLayout {
        self.layout
    }
    fn forces<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        let l = self.layout;
        let n = l.n;
        let g = christoffel(&self.h, &x[l.q_range()])?;
        let mut out = vec![S::zero(); l.k * l.k * n];
        for a in 0..l.k {
            let ua = &x[l.u_range(a)];
            for b in a..l.k {
                let ub = &x[l.u_range(b)];
                for i in 0..n {
                    let mut s = S::zero();
                    for p in 0..n {
                        for r in 0..n {
                            s += g[(i * n + p) * n + r] * ua[p] * ub[r];
                        }
                    }
                    out[force_index(l, a, b, i)] = -s;
                    out[force_index(l, b, a, i)] = -s;
                }
            }
        }
        Ok(out)
    }
}

/// The Christoffel SOPDE of a metric Lagrangian.
pub fn metric_sopde(l: &Lagrangian) -> Result<SopdeField<ChristoffelForces>> {
    match &l.kind {
        LagrangianKind::Metric(h) => Ok(SopdeField { forces: ChristoffelForces { layout: l.layout, h: h.clone() } }),
        LagrangianKind::Expression(_) => Err(Error::Invalid("metric SOPDE requires a metric Lagrangian".into())),
    }
}

/// Minimum-norm symmetric solution of the Euler-Lagrange conditions, solved pointwise.
///
/// With symmetric natural forces the unknowns are `F_{αβ}^B` for α ≤ β. The
/// off-diagonal unknowns are rescaled by √2 so that the Euclidean norm of the
/// unknown vector equals the Frobenius norm of the full force array.
#[derive(Clone, Debug)]
pub struct MinNormForces {
    pub lagrangian: Lagrangian,
}

impl ForceFn for MinNormForces {
    fn layout(&self) -> TkLayout {
        self.lagrangian.layout
    }
    fn forces<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        let lag = &self.lagrangian;
        let l = lag.layout;
        let (n, k) = (l.n, l.k);
        let qi: Vec<usize> = l.q_range().collect();
        let ui = l.u_indices();
        let f = |h: &[HyperDual<S>]| lag.eval(h);
        let lq = gradient(f, x, &qi)?;
        // luq[(αA)·n + B] = ∂²L/∂u_α^A ∂q^B.
        let luq = hessian_block(f, x, &ui, &qi)?;
        let m = n * k;
        let hess = hessian_sym(f, x, &ui)?;
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
        let cols = pairs.len() * n;
        let mut mat = Mat::zeros(n, cols);
        let mut rhs = lq.clone();
        let inv_sqrt2 = S::cst(std::f64::consts::FRAC_1_SQRT_2);
        for a in 0..n {
            for al in 0..k {
                for b in 0..n {
                    rhs[a] -= x[l.u(al, b)] * luq[(al * n + a) * n + b];
                }
            }
            for (p, &(al, be)) in pairs.iter().enumerate() {
                for b in 0..n {
                    let c = if al == be {
                        hess[(be * n + b) * m + al * n + a]
                    } else {
                        (hess[(be * n + b) * m + al * n + a] + hess[(al * n + b) * m + be * n + a]) * inv_sqrt2
                    };
                    mat[(a, p * n + b)] = c;
                }
            }
        }
        if Lu::new(&mat.matmul(&mat.transpose()), PIVOT_TOL).is_err() {
            return Err(Error::RankDeficient);
        }
        let y = pinv_solve(&mat, &rhs)?;
        let mut out = vec![S::zero(); k * k * n];
        for (p, &(al, be)) in pairs.iter().enumerate() {
            for b in 0..n {
                let v = if al == be { y[p * n + b] } else { y[p * n + b] * inv_sqrt2 };
                out[force_index(l, al, be, b)] = v;
                out[force_index(l, be, al, b)] = v;
            }
        }
        Ok(out)
    }
}

pub fn general_sopde(l: &Lagrangian) -> SopdeField<MinNormForces> {
    SopdeField { forces: MinNormForces { lagrangian: l.clone() } }
}

/// The SOPDE forces used for a Lagrangian: Christoffel forces for a metric,
/// the minimum-norm solution otherwise.
#[derive(Clone, Debug)]
pub enum LagrangianForces {
    Christoffel(ChristoffelForces),
    MinNorm(MinNormForces),
}

impl ForceFn for LagrangianForces {
    fn layout(&self) -> TkLayout {
        match self {
            LagrangianForces::Christoffel(f) => f.layout(),
            LagrangianForces::MinNorm(f) => f.layout(),
        }
    }
    fn forces<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        match self {
            LagrangianForces::Christoffel(f) => f.forces(x),
            LagrangianForces::MinNorm(f) => f.forces(x),
        }
    }
}

pub fn lagrangian_sopde(l: &Lagrangian) -> SopdeField<LagrangianForces> {
    let forces = match metric_sopde(l) {
        Ok(s) => LagrangianForces::Christoffel(s.forces),
        Err(_) => LagrangianForces::MinNorm(general_sopde(l).forces),
    };
    SopdeField { forces }
}

/// Fixed force array, independent of the state.
#[derive(Clone, Debug)]
pub struct ConstantForces {
    pub layout: TkLayout,
    pub values: Vec<f64>,
}

impl ForceFn for ConstantForces {
    fn layout(&self) -> TkLayout {
        self.layout
    }
    fn forces<S: Scalar>(&self, _: &[S]) -> Result<Vec<S>> {
        Ok(self.values.iter().map(|&v| S::cst(v)).collect())
    }
}

/// Frame force coefficients `(Γ̂_α)_β^A` of `Γ_α = v_α^A Z_A^C + (Γ̂_α)_β^A Z_A^{Vβ}`,
/// same storage as the natural forces.
pub fn frame_forces<S: Scalar, F: ForceFn + ?Sized, Z: FrameFn + ?Sized>(forces: &F, frame: &Z, x: &[S]) -> Result<Vec<S>> {
    let l = forces.layout();
    let fnat = forces.forces(x)?;
    let q = &x[l.q_range()];
    let z = frame.matrix(q)?;
    let lu = factor(&z, q)?;
    let v: Vec<Vec<S>> = (0..l.k).map(|a| to_quasi(&lu, &x[l.u_range(a)])).collect();
    let mut out = vec![S::zero(); fnat.len()];
    for b in 0..l.k {
        let dz = matrix_jvp(frame, q, &x[l.u_range(b)])?.1;
        for a in 0..l.k {
            let lift = dz.vecmat(&v[a]);
            let i0 = force_index(l, a, b, 0);
            let r: Vec<S> = (0..l.n).map(|c| fnat[i0 + c] - lift[c]).collect();
            out[i0..i0 + l.n].copy_from_slice(&to_quasi(&lu, &r));
        }
    }
    Ok(out)
}

/// Inverse of [`frame_forces`]: natural forces from frame forces at the state `x`.
pub fn natural_forces<S: Scalar, Z: FrameFn + ?Sized>(layout: TkLayout, frame: &Z, x: &[S], hat: &[S]) -> Result<Vec<S>> {
    let l = layout;
    let q = &x[l.q_range()];
    let z = frame.matrix(q)?;
    let lu = factor(&z, q)?;
    let v: Vec<Vec<S>> = (0..l.k).map(|a| to_quasi(&lu, &x[l.u_range(a)])).collect();
    let mut out = vec![S::zero(); hat.len()];
    for b in 0..l.k {
        let dz = matrix_jvp(frame, q, &x[l.u_range(b)])?.1;
        for a in 0..l.k {
            let i0 = force_index(l, a, b, 0);
            let lifted = to_natural(&z, &hat[i0..i0 + l.n]);
            let extra = dz.vecmat(&v[a]);
            for c in 0..l.n {
                out[i0 + c] = lifted[c] + extra[c];
            }
        }
    }
    Ok(out)
}

/// Euler-Lagrange residual `Σ_α Γ_α(Z_A^{Vα}(L)) − Z_A^C(L)` for every frame index A.
pub fn el_residual<F, Z>(sopde: &F, l: &Lagrangian, frame: &Z, x: &[f64]) -> Result<Vec<f64>>
where
    F: KVectorField + ?Sized,
    Z: FrameFn + ?Sized,
{
    let lay = l.layout;
    let n = lay.n;
    let gammas: Vec<Vec<f64>> = (0..lay.k).map(|a| sopde.component(a, x)).collect::<Result<_>>()?;
    let mut res = Vec::with_capacity(n);
    for a in 0..n {
        let mut r = 0.0;
        for (al, g) in gammas.iter().enumerate() {
            let zv = |h: &[HyperDual<f64>]| -> Result<HyperDual<f64>> {
                let z = frame.matrix(&h[..n])?;
                let idx: Vec<usize> = lay.u_range(al).collect();
                let grad = gradient(|hh: &[HyperDual<HyperDual<f64>>]| l.eval(hh), h, &idx)?;
                let mut s = HyperDual::constant(0.0);
                for b in 0..n {
                    s += z[(a, b)] * grad[b];
                }
                Ok(s)
            };
            r += dir_deriv(zv, x, g)?;
        }
        let zc = complete_lift(FrameVector { frame, index: a }, lay.k).eval(x)?;
        r -= dir_deriv(|h: &[HyperDual<f64>]| l.eval(h), x, &zc)?;
        res.push(r);
    }
    Ok(res)
}
