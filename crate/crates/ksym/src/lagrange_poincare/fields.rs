use super::{LpLayout, ReducedLagrangian};
use crate::diff::{gradient, hessian_sym, jvp};
use crate::error::{Error, Result};
use crate::geometry::field::KVectorField;
use crate::geometry::frame::FrameFn;
use crate::lagrangian::{force_index, frame_forces, ForceFn, Lagrangian, LagrangianForces, SopdeField};
use crate::scalar::{HyperDual, Scalar};
use crate::solver::linalg::{Lu, Mat, PIVOT_TOL};
use crate::symmetry::{lift_state, quasi_invariance_defect, BundleFrame, PrincipalBundleData, INVARIANCE_TOL};

/// Reduced field of an invariant SOPDE, assembled from its frame forces and
/// the Υ, C and K correction terms.
#[derive(Clone, Debug)]
pub struct ReducedSopde<'a, F> {
    pub forces: F,
    pub data: &'a PrincipalBundleData,
    pub layout: LpLayout,
}

/// Checks invariance of the forces at `samples` (flat natural states) and wraps them.
pub fn reduced_sopde<'a, F: ForceFn>(forces: F, data: &'a PrincipalBundleData, samples: &[Vec<f64>]) -> Result<ReducedSopde<'a, F>> {
    let tk = forces.layout();
    if tk.n != data.n() {
        return Err(Error::Invalid(format!("SOPDE on R^{} but bundle data on R^{}", tk.n, data.n())));
    }
    let defect = quasi_invariance_defect(&SopdeField { forces: &forces }, data, samples)?;
    if defect > INVARIANCE_TOL {
        return Err(Error::NotInvariant(format!("SOPDE forces are not invariant (defect {defect:.3e})")));
    }
    Ok(ReducedSopde { forces, data, layout: LpLayout::new(data.n_base, data.n_fiber, tk.k) })
}

impl<F: ForceFn> KVectorField for ReducedSopde<'_, F> {
    fn k(&self) -> usize {
        self.layout.k
    }
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn component<S: Scalar>(&self, alpha: usize, y: &[S]) -> Result<Vec<S>> {
        let lay = self.layout;
        let (nb, nf, k) = (lay.nb, lay.nf, lay.k);
        let d = self.data;
        let x = lift_state(d, lay, y)?;
        let hat = frame_forces(&self.forces, &BundleFrame::hat(d), &x)?;
        let q = &x[..d.n()];
        let ups = d.upsilon(q)?;
        let kc = d.curvature(q)?;
        let tk = self.forces.layout();
        let mut out = vec![S::zero(); lay.dim()];
        out[..nb].copy_from_slice(&y[lay.v_range(alpha)]);
        for beta in 0..k {
            for j in 0..nb {
                out[lay.v(beta, j)] = hat[force_index(tk, alpha, beta, j)];
            }
            for c in 0..nf {
                let mut s = hat[force_index(tk, alpha, beta, nb + c)];
                for i in 0..nb {
                    for b in 0..nf {
                        let u = ups[(i * nf + b) * nf + c];
                        s += u * (y[lay.v(beta, i)] * y[lay.w(alpha, b)] - y[lay.v(alpha, i)] * y[lay.w(beta, b)]);
                    }
                    for j in 0..nb {
                        s += kc[(c * nb + i) * nb + j] * y[lay.v(alpha, i)] * y[lay.v(beta, j)];
                    }
                }
                for a in 0..nf {
                    for b in 0..nf {
                        let cc = d.algebra.c(c, a, b);
                        if cc != 0.0 {
                            s -= (y[lay.w(alpha, a)] * y[lay.w(beta, b)]).scale(cc);
                        }
                    }
                }
                out[lay.w(beta, c)] = s;
            }
        }
        Ok(out)
    }
}

/// Reduced harmonic-map field for a metric Lagrangian whose frame metric has
/// no mixed block `h(X_i, Ê_a)`:
///
/// `dv_β^j/dt^α = −Γ^j_{kl} v_β^k v_α^l + h^{ji} h_{ab} K^b_{ik} v_α^k w_β^a`,
/// `dw_β^b/dt^α = −Υ_{kd}^b v_α^k w_β^d`,
///
/// with `Γ^j_{kl}` the Christoffel symbols of the base block `h_ij(q)`.
#[derive(Clone, Copy, Debug)]
pub struct HarmonicField<'a> {
    pub lagrangian: &'a Lagrangian,
    pub data: &'a PrincipalBundleData,
    pub layout: LpLayout,
}

/// Mixed block entries above this size make the harmonic form inapplicable.
const MIXED_BLOCK_TOL: f64 = 1e-10;

impl<'a> HarmonicField<'a> {
    pub fn new(l: &'a Lagrangian, data: &'a PrincipalBundleData) -> Result<Self> {
        if l.metric_at(&vec![0.0; l.n()])?.is_none() {
            return Err(Error::Invalid("the harmonic reduced field needs a metric Lagrangian".into()));
        }
        if l.n() != data.n() {
            return Err(Error::Invalid(format!("Lagrangian on R^{} but bundle data on R^{}", l.n(), data.n())));
        }
        Ok(HarmonicField { lagrangian: l, data, layout: LpLayout::new(data.n_base, data.n_fiber, l.k()) })
    }

    /// Metric in the invariant frame over the identity, `Z h Zᵀ`.
    fn frame_metric<S: Scalar>(&self, xb: &[S]) -> Result<Mat<S>> {
        let q = self.data.representative(xb);
        let h = self.lagrangian.metric_at(&q)?.ok_or_else(|| Error::Invalid("metric Lagrangian expected".into()))?;
        let z = BundleFrame::hat(self.data).matrix(&q)?;
        Ok(z.matmul(&h).matmul(&z.transpose()))
    }
}

impl KVectorField for HarmonicField<'_> {
    fn k(&self) -> usize {
        self.layout.k
    }
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn component<S: Scalar>(&self, alpha: usize, y: &[S]) -> Result<Vec<S>> {
        let lay = self.layout;
        let (nb, nf, k) = (lay.nb, lay.nf, lay.k);
        let n = nb + nf;
        let xb = &y[..nb];
        let g = self.frame_metric(xb)?;
        for i in 0..nb {
            for a in 0..nf {
                if g[(i, nb + a)].re().abs() > MIXED_BLOCK_TOL {
                    return Err(Error::Invalid(format!(
                        "frame metric has a mixed block entry {:.3e}; the harmonic form does not apply",
                        g[(i, nb + a)].re()
                    )));
                }
            }
        }
        let mut hb = Mat::zeros(nb, nb);
        for i in 0..nb {
            for j in 0..nb {
                hb[(i, j)] = g[(i, j)];
            }
        }
        let lu = Lu::new(&hb, PIVOT_TOL).map_err(|_| Error::SingularMetric(xb.iter().map(|v| v.re()).collect()))?;
        // dh[m][(i, j)] = ∂_m h_ij.
        let dh: Vec<Mat<S>> = (0..nb)
            .map(|m| {
                let mut dir = vec![S::zero(); nb];
                dir[m] = S::one();
                let (_, d) = jvp(|h: &[HyperDual<S>]| Ok::<_, Error>(self.frame_metric(h)?.data), xb, &dir)?;
                Ok(Mat::from_vec(n, n, d))
            })
            .collect::<Result<_>>()?;
        let kc = self.data.curvature(&self.data.representative(xb))?;
        let ups = self.data.upsilon(&self.data.representative(xb))?;
        let va = &y[lay.v_range(alpha)];
        let mut out = vec![S::zero(); lay.dim()];
        out[..nb].copy_from_slice(va);
        for beta in 0..k {
            let vb = &y[lay.v_range(beta)];
            let wb = &y[lay.w_range(beta)];
            // r_m = h_mj dv_β^j, then solve with h.
            let mut r = vec![S::zero(); nb];
            for (m, rm) in r.iter_mut().enumerate() {
                for kk in 0..nb {
                    for l in 0..nb {
                        let c = (dh[kk][(m, l)] + dh[l][(m, kk)] - dh[m][(kk, l)]).scale(0.5);
                        *rm -= c * vb[kk] * va[l];
                    }
                }
                for a in 0..nf {
                    for b in 0..nf {
                        for kk in 0..nb {
                            *rm += g[(nb + a, nb + b)] * kc[(b * nb + m) * nb + kk] * va[kk] * wb[a];
                        }
                    }
                }
            }
            let dv = lu.solve(&r);
            out[lay.v_range(beta)].copy_from_slice(&dv);
            for b in 0..nf {
                let mut s = S::zero();
                for kk in 0..nb {
                    for dd in 0..nf {
                        s -= ups[(kk * nf + dd) * nf + b] * va[kk] * wb[dd];
                    }
                }
                out[lay.w(beta, b)] = s;
            }
        }
        Ok(out)
    }
}

/// Euler-Poincaré field for `Q = G`: for each direction α the system
/// `H ∂_α w = e_α ⊗ R_α`, `R_α^a = −C^b_{ac} w_α^c ∂l/∂w_α^b`, with `H` the
/// Hessian of `l` in `w`. Summing over α recovers the Euler-Poincaré equations.
#[derive(Clone, Copy, Debug)]
pub struct EulerPoincareField<'a> {
    pub reduced: ReducedLagrangian<'a>,
}

pub fn euler_poincare_rhs(reduced: ReducedLagrangian<'_>) -> Result<EulerPoincareField<'_>> {
    if reduced.layout.nb != 0 {
        return Err(Error::Invalid("the Euler-Poincare field needs a bundle without base coordinates".into()));
    }
    Ok(EulerPoincareField { reduced })
}

impl KVectorField for EulerPoincareField<'_> {
    fn k(&self) -> usize {
        self.reduced.layout.k
    }
    fn dim(&self) -> usize {
        self.reduced.layout.dim()
    }
    fn component<S: Scalar>(&self, alpha: usize, y: &[S]) -> Result<Vec<S>> {
        let lay = self.reduced.layout;
        let nf = lay.nf;
        let m = lay.dim();
        let idx: Vec<usize> = (0..m).collect();
        let f = |h: &[HyperDual<S>]| self.reduced.eval(h);
        let hess = Mat::from_vec(m, m, hessian_sym(f, y, &idx)?);
        let p = gradient(f, y, &idx)?;
        let alg = &self.reduced.data.algebra;
        let mut rhs = vec![S::zero(); m];
        for a in 0..nf {
            let mut s = S::zero();
            for b in 0..nf {
                for c in 0..nf {
                    let cc = alg.c(b, a, c);
                    if cc != 0.0 {
                        s -= (y[lay.w(alpha, c)] * p[lay.w(alpha, b)]).scale(cc);
                    }
                }
            }
            rhs[lay.w(alpha, a)] = s;
        }
        let lu = Lu::new(&hess, PIVOT_TOL).map_err(|_| Error::SingularHessian)?;
        Ok(lu.solve(&rhs))
    }
}

/// The reduced fields the pipeline can march.
#[derive(Clone, Debug)]
pub enum ReducedField<'a> {
    Sopde(ReducedSopde<'a, LagrangianForces>),
    Harmonic(HarmonicField<'a>),
    EulerPoincare(EulerPoincareField<'a>),
}

impl ReducedField<'_> {
    pub fn layout(&self) -> LpLayout {
        match self {
            ReducedField::Sopde(f) => f.layout,
            ReducedField::Harmonic(f) => f.layout,
            ReducedField::EulerPoincare(f) => f.reduced.layout,
        }
    }
}

impl KVectorField for ReducedField<'_> {
    fn k(&self) -> usize {
        self.layout().k
    }
    fn dim(&self) -> usize {
        self.layout().dim()
    }
    fn component<S: Scalar>(&self, alpha: usize, y: &[S]) -> Result<Vec<S>> {
        match self {
            ReducedField::Sopde(f) => f.component(alpha, y),
            ReducedField::Harmonic(f) => f.component(alpha, y),
            ReducedField::EulerPoincare(f) => f.component(alpha, y),
        }
    }
}
