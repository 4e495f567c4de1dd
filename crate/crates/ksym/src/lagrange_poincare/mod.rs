//! Reduced Lagrangian, reduced SOPDE fields and the Lagrange-Poincaré
//! residual on the quotient `(T¹ₖQ)/G` with coordinates `(q^i, v_α^i, w_α^a)`.

mod fields;
mod residual;
#[cfg(test)]
mod tests;

pub use fields::{euler_poincare_rhs, reduced_sopde, EulerPoincareField, HarmonicField, ReducedField, ReducedSopde};
pub use residual::{lp_residual, LpResidual};

pub use crate::symmetry::ReducedLayout as LpLayout;

use crate::error::{Error, Result};
use crate::geometry::frame::{to_natural, FrameFn};
use crate::lagrangian::Lagrangian;
use crate::scalar::Scalar;
use crate::symmetry::{lift_state, BundleFrame, PrincipalBundleData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance for the representative-independence check of the reduced Lagrangian.
pub const REPRESENTATIVE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LpState {
    pub qbase: Vec<f64>,
    /// Row α holds `v_α^i`.
    pub v: Vec<Vec<f64>>,
    /// Row α holds `w_α^a`.
    pub w: Vec<Vec<f64>>,
}

impl LpState {
    pub fn new(qbase: Vec<f64>, v: Vec<Vec<f64>>, w: Vec<Vec<f64>>) -> Result<Self> {
        if v.len() != w.len() || v.is_empty() {
            return Err(Error::Invalid("reduced state needs k >= 1 rows of v and w".into()));
        }
        if v.iter().any(|r| r.len() != qbase.len()) || w.iter().any(|r| r.len() != w[0].len()) {
            return Err(Error::Invalid("reduced state rows have inconsistent lengths".into()));
        }
        if qbase.iter().chain(v.iter().flatten()).chain(w.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite entry in reduced state".into()));
        }
        Ok(LpState { qbase, v, w })
    }

    pub fn layout(&self) -> LpLayout {
        LpLayout::new(self.qbase.len(), self.w[0].len(), self.v.len())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = self.qbase.clone();
        for (v, w) in self.v.iter().zip(&self.w) {
            out.extend_from_slice(v);
            out.extend_from_slice(w);
        }
        out
    }

    pub fn from_flat(layout: LpLayout, y: &[f64]) -> Result<Self> {
        if y.len() != layout.dim() {
            return Err(Error::Invalid(format!("reduced state has length {}, expected {}", y.len(), layout.dim())));
        }
        Self::new(
            y[..layout.nb].to_vec(),
            (0..layout.k).map(|a| y[layout.v_range(a)].to_vec()).collect(),
            (0..layout.k).map(|a| y[layout.w_range(a)].to_vec()).collect(),
        )
    }
}

/// Column names of a reduced state: base names, then `v{α}_{name}` and `w{α}_{name}` per α.
pub fn lp_names(k: usize, base: &[String], fiber: &[String]) -> Vec<String> {
    let mut out = base.to_vec();
    for a in 1..=k {
        out.extend(base.iter().map(|s| format!("v{a}_{s}")));
        out.extend(fiber.iter().map(|s| format!("w{a}_{s}")));
    }
    out
}

/// `l(q^i, v, w) = L(x^i, e; v_α^A Z_A)` for the invariant frame Z at the identity.
#[derive(Clone, Copy, Debug)]
pub struct ReducedLagrangian<'a> {
    pub lagrangian: &'a Lagrangian,
    pub data: &'a PrincipalBundleData,
    pub layout: LpLayout,
}

impl ReducedLagrangian<'_> {
    pub fn eval<S: Scalar>(&self, y: &[S]) -> Result<S> {
        self.lagrangian.eval(&lift_state(self.data, self.layout, y)?)
    }
}

/// Builds the reduced Lagrangian and checks at seeded random states that
/// evaluating over two other group points gives the same value.
pub fn reduced_lagrangian<'a>(l: &'a Lagrangian, data: &'a PrincipalBundleData, seed: u64) -> Result<ReducedLagrangian<'a>> {
    if l.n() != data.n() {
        return Err(Error::Invalid(format!("Lagrangian on R^{} but bundle data on R^{}", l.n(), data.n())));
    }
    let layout = LpLayout::new(data.n_base, data.n_fiber, l.k());
    let rl = ReducedLagrangian { lagrangian: l, data, layout };
    if data.n_fiber == 0 {
        return Ok(rl);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hat = BundleFrame::hat(data);
    for _ in 0..5 {
        let y: Vec<f64> = (0..layout.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let base = rl.eval(&y)?;
        for _ in 0..2 {
            let mut q = y[..layout.nb].to_vec();
            q.extend((0..layout.nf).map(|_| rng.gen_range(-1.0..1.0)));
            let z = hat.matrix(&q)?;
            let mut x = q.clone();
            for a in 0..layout.k {
                x.extend(to_natural(&z, &y[layout.block(a)]));
            }
            let other = l.eval(&x)?;
            if (other - base).abs() > REPRESENTATIVE_TOL * (1.0 + base.abs()) {
                return Err(Error::NotInvariant(format!("reduced Lagrangian depends on the representative: {base} vs {other} at {q:?}")));
            }
        }
    }
    Ok(rl)
}
