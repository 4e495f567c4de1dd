use super::{BundleFrame, PrincipalBundleData};
use crate::diff::jvp;
use crate::error::{Error, Result};
use crate::geometry::field::KVectorField;
use crate::geometry::frame::{factor, to_natural, to_quasi, FrameFn};
use crate::geometry::point::TkLayout;
use crate::scalar::{HyperDual, Scalar};

/// Index map for reduced states `(x^i, v_α^i, w_α^a)`: the base point, then
/// one block `(v_α, w_α)` per α.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedLayout {
    pub nb: usize,
    pub nf: usize,
    pub k: usize,
}

impl ReducedLayout {
    pub fn new(nb: usize, nf: usize, k: usize) -> Self {
        ReducedLayout { nb, nf, k }
    }
    pub fn n(&self) -> usize {
        self.nb + self.nf
    }
    pub fn dim(&self) -> usize {
        self.nb + self.k * self.n()
    }
    pub fn tk(&self) -> TkLayout {
        TkLayout::new(self.n(), self.k)
    }
    pub fn v(&self, alpha: usize, i: usize) -> usize {
        self.nb + alpha * self.n() + i
    }
    pub fn w(&self, alpha: usize, a: usize) -> usize {
        self.nb + alpha * self.n() + self.nb + a
    }
    /// Quasi-velocity block `(v_α, w_α)`.
    pub fn block(&self, alpha: usize) -> std::ops::Range<usize> {
        self.v(alpha, 0)..self.v(alpha, 0) + self.n()
    }
    pub fn v_range(&self, alpha: usize) -> std::ops::Range<usize> {
        self.v(alpha, 0)..self.v(alpha, 0) + self.nb
    }
    pub fn w_range(&self, alpha: usize) -> std::ops::Range<usize> {
        self.w(alpha, 0)..self.w(alpha, 0) + self.nf
    }
}

/// Quasi-velocities with respect to the invariant frame `{X_i, Ê_a}` at any
/// point of T¹ₖQ, together with the base coordinates.
pub fn reduce_state<S: Scalar>(data: &PrincipalBundleData, k: usize, x: &[S]) -> Result<Vec<S>> {
    let tk = TkLayout::new(data.n(), k);
    let q = &x[tk.q_range()];
    let z = BundleFrame::hat(data).matrix(q)?;
    let lu = factor(&z, q)?;
    let mut out = q[..data.n_base].to_vec();
    for a in 0..k {
        out.extend(to_quasi(&lu, &x[tk.u_range(a)]));
    }
    Ok(out)
}

/// The point over `(x^i, e)` with the given quasi-velocities, as a flat natural state.
pub fn lift_state<S: Scalar>(data: &PrincipalBundleData, layout: ReducedLayout, y: &[S]) -> Result<Vec<S>> {
    let q = data.representative(&y[..layout.nb]);
    let z = BundleFrame::hat(data).matrix(&q)?;
    factor(&z, &q)?;
    let mut out = q;
    for a in 0..layout.k {
        out.extend(to_natural(&z, &y[layout.block(a)]));
    }
    Ok(out)
}

/// The reduced field of an invariant k-vector field on T¹ₖQ, obtained by
/// evaluating it over the identity section and differentiating the
/// quasi-velocity functions along it.
pub struct ReducedKField<'a, F> {
    pub field: F,
    pub data: &'a PrincipalBundleData,
    pub layout: ReducedLayout,
}

impl<F: KVectorField> KVectorField for ReducedKField<'_, F> {
    fn k(&self) -> usize {
        self.layout.k
    }
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn component<S: Scalar>(&self, alpha: usize, y: &[S]) -> Result<Vec<S>> {
        let x = lift_state(self.data, self.layout, y)?;
        let g = self.field.component(alpha, &x)?;
        let k = self.layout.k;
        Ok(jvp(|h: &[HyperDual<S>]| reduce_state(self.data, k, h), &x, &g)?.1)
    }
}

/// Tolerance on `[Ẽ_a^C, Γ_α]` for a field to count as invariant.
pub const INVARIANCE_TOL: f64 = 1e-8;

/// Reduces an invariant k-vector field after checking invariance at `samples`
/// (flat natural states).
pub fn reduce_kvector<'a, F: KVectorField>(field: F, data: &'a PrincipalBundleData, samples: &[Vec<f64>]) -> Result<ReducedKField<'a, F>> {
    let k = field.k();
    if field.dim() != TkLayout::new(data.n(), k).dim() {
        return Err(Error::Invalid(format!("field dimension {} does not match T1kQ", field.dim())));
    }
    let defect = super::quasi_invariance_defect(&field, data, samples)?;
    if defect > INVARIANCE_TOL {
        return Err(Error::NotInvariant(format!("[E^C, Gamma] reaches {defect:.3e}")));
    }
    Ok(ReducedKField { field, data, layout: ReducedLayout::new(data.n_base, data.n_fiber, k) })
}
