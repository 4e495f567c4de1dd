//! Principal-bundle data for a free left action of G on Q = (Q/G) × G in an
//! adapted chart, the invariant frames built from it, and the invariance and
//! bracket checks that validate the data.
//!
//! Coordinates on Q are ordered base first: `(x^1..x^{n_base}, x^a..)`.
//! All expressions are compiled over the full coordinate list.

mod checks;
mod reduced;

pub use checks::{invariance_check, quasi_invariance_defect, verify_bracket_table, BracketTable};
pub use reduced::{lift_state, reduce_kvector, reduce_state, ReducedKField, ReducedLayout, INVARIANCE_TOL};

use crate::diff::jvp;
use crate::error::{Error, Result};
use crate::exprlang::CExpr;
use crate::geometry::algebra::LieAlgebraData;
use crate::geometry::field::VectorField;
use crate::geometry::frame::{structure_functions, FrameFn, FrameVector};
use crate::lagrangian::eval_matrix;
use crate::scalar::{HyperDual, Scalar};
use crate::solver::linalg::{Lu, Mat};

/// Tolerance for the base component of `[X_i, X_j]`.
pub const VERTICAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct PrincipalBundleData {
    pub n_base: usize,
    pub n_fiber: usize,
    pub algebra: LieAlgebraData,
    /// `γ_i^a`, row i.
    pub gamma: Vec<Vec<CExpr>>,
    /// `K_a^b` with `Ẽ_a = K_a^b ∂/∂x^b`.
    pub kmat: Vec<Vec<CExpr>>,
    /// `A_a^b` with `Ê_a = A_a^b Ẽ_b`.
    pub amat: Vec<Vec<CExpr>>,
    /// Fiber chart coordinates of the identity.
    pub identity: Vec<f64>,
    /// Left multiplication `(g, ḡ) ↦ g ḡ` over the slots `[g, ḡ]`.
    pub mult: Option<Vec<CExpr>>,
}

impl PrincipalBundleData {
    pub fn new(
        n_base: usize,
        algebra: LieAlgebraData,
        gamma: Vec<Vec<CExpr>>,
        kmat: Vec<Vec<CExpr>>,
        amat: Vec<Vec<CExpr>>,
        identity: Vec<f64>,
        mult: Option<Vec<CExpr>>,
    ) -> Result<Self> {
        let nf = algebra.dim;
        let bad = |what: &str| Err(Error::Invalid(format!("bundle data: {what}")));
        if gamma.len() != n_base || gamma.iter().any(|r| r.len() != nf) {
            return bad(&format!("gamma must be {n_base} x {nf}"));
        }
        if kmat.len() != nf || kmat.iter().any(|r| r.len() != nf) {
            return bad(&format!("fundamental matrix must be {nf} x {nf}"));
        }
        if amat.len() != nf || amat.iter().any(|r| r.len() != nf) {
            return bad(&format!("adjoint matrix must be {nf} x {nf}"));
        }
        if identity.len() != nf {
            return bad(&format!("identity must have {nf} coordinates"));
        }
        if let Some(m) = &mult {
            if m.len() != nf {
                return bad(&format!("multiplication map must have {nf} components"));
            }
        }
        Ok(PrincipalBundleData { n_base, n_fiber: nf, algebra, gamma, kmat, amat, identity, mult })
    }

    /// The trivial bundle with no symmetry.
    pub fn trivial(n_base: usize) -> Self {
        PrincipalBundleData {
            n_base,
            n_fiber: 0,
            algebra: LieAlgebraData::abelian(0),
            gamma: vec![Vec::new(); n_base],
            kmat: Vec::new(),
            amat: Vec::new(),
            identity: Vec::new(),
            mult: Some(Vec::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n_base + self.n_fiber
    }

    pub fn gamma_at<S: Scalar>(&self, q: &[S]) -> Result<Mat<S>> {
        if self.n_fiber == 0 || self.n_base == 0 {
            return Ok(Mat::zeros(self.n_base, self.n_fiber));
        }
        eval_matrix(&self.gamma, q)
    }

    pub fn k_at<S: Scalar>(&self, q: &[S]) -> Result<Mat<S>> {
        eval_matrix(&self.kmat, q)
    }

    pub fn a_at<S: Scalar>(&self, q: &[S]) -> Result<Mat<S>> {
        eval_matrix(&self.amat, q)
    }

    /// The point `(x^i, e)` over a base point.
    pub fn representative<S: Scalar>(&self, qbase: &[S]) -> Vec<S> {
        qbase.iter().copied().chain(self.identity.iter().map(|&v| S::cst(v))).collect()
    }

    pub fn mult<S: Scalar>(&self, g: &[S], gbar: &[S]) -> Result<Vec<S>> {
        let m = self.mult.as_ref().ok_or_else(|| Error::Invalid("bundle data has no multiplication map".into()))?;
        let slots: Vec<S> = g.iter().chain(gbar).copied().collect();
        m.iter().map(|e| Ok(e.eval(&slots)?)).collect()
    }

    /// Left action of `h` on a point of Q.
    pub fn act<S: Scalar>(&self, h: &[S], q: &[S]) -> Result<Vec<S>> {
        let nb = self.n_base;
        let mut out = q[..nb].to_vec();
        out.extend(self.mult(h, &q[nb..])?);
        Ok(out)
    }

    /// `T_e L_g ξ`, the left-invariant vector field through `g` with value `ξ` at e.
    pub fn left_translate<S: Scalar>(&self, g: &[S], xi: &[S]) -> Result<Vec<S>> {
        let e: Vec<S> = self.identity.iter().map(|&v| S::cst(v)).collect();
        let gg: Vec<HyperDual<S>> = g.iter().map(|&v| HyperDual::constant(v)).collect();
        Ok(jvp(|h: &[HyperDual<S>]| self.mult(&gg, h), &e, xi)?.1)
    }

    /// `Υ_{ia}^b = −γ_i^c C^b_{ca}` at `(i·nf + a)·nf + b`.
    pub fn upsilon<S: Scalar>(&self, q: &[S]) -> Result<Vec<S>> {
        let (nb, nf) = (self.n_base, self.n_fiber);
        let g = self.gamma_at(q)?;
        let mut out = vec![S::zero(); nb * nf * nf];
        for i in 0..nb {
            for a in 0..nf {
                for b in 0..nf {
                    let mut s = S::zero();
                    for c in 0..nf {
                        let cc = self.algebra.c(b, c, a);
                        if cc != 0.0 {
                            s += g[(i, c)].scale(cc);
                        }
                    }
                    out[(i * nf + a) * nf + b] = -s;
                }
            }
        }
        Ok(out)
    }

    /// Curvature `K^a_{ij}` with `[X_i, X_j] = −K^a_{ij} Ê_a`, stored at `(a·nb + i)·nb + j`.
    ///
    /// Fails with `NonVerticalBracket` when `[X_i, X_j]` has a base component.
    pub fn curvature<S: Scalar>(&self, q: &[S]) -> Result<Vec<S>> {
        let (nb, nf) = (self.n_base, self.n_fiber);
        let n = self.n();
        let mut out = vec![S::zero(); nf * nb * nb];
        if nb < 2 {
            return Ok(out);
        }
        let r = structure_functions(&BundleFrame::hat(self), q)?;
        let mut worst: f64 = 0.0;
        for i in 0..nb {
            for j in 0..nb {
                for k in 0..nb {
                    worst = worst.max(r[(k * n + i) * n + j].re().abs());
                }
                for a in 0..nf {
                    out[(a * nb + i) * nb + j] = -r[((nb + a) * n + i) * n + j];
                }
            }
        }
        if worst > VERTICAL_TOL {
            return Err(Error::NonVerticalBracket(worst));
        }
        Ok(out)
    }

    /// Checks the structural requirements at the given points of Q: γ independent of
    /// the fiber coordinates, K invertible, A(e) = I and e a left unit of `mult`.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<()> {
        let (nb, nf) = (self.n_base, self.n_fiber);
        if nf == 0 {
            return Ok(());
        }
        for q in points {
            for a in 0..nf {
                let mut dir = vec![0.0; self.n()];
                dir[nb + a] = 1.0;
                let (_, d) = jvp(|h: &[HyperDual<f64>]| Ok::<_, Error>(self.gamma_at(h)?.data), q, &dir)?;
                if let Some(v) = d.iter().find(|v| v.abs() > 1e-12) {
                    return Err(Error::Invalid(format!("gamma depends on fiber coordinate {} (derivative {v:.3e} at {q:?})", a + 1)));
                }
            }
            let k = self.k_at(q)?;
            if Lu::new(&k, 1e-12).is_err() {
                return Err(Error::Invalid(format!("fundamental matrix singular at {q:?}")));
            }
        }
        let e = self.representative(&vec![0.0; nb]);
        let a = self.a_at(&e)?;
        let def = (a.data.iter().zip(&Mat::<f64>::identity(nf).data)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if def > 1e-12 {
            return Err(Error::Invalid(format!("adjoint matrix at the identity differs from I by {def:.3e}")));
        }
        if self.mult.is_some() {
            for q in points {
                let g = &q[nb..];
                let left = self.mult(&self.identity, g)?;
                let right = self.mult(g, &self.identity)?;
                let d = left.iter().chain(&right).zip(g.iter().chain(g)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                if d > 1e-12 {
                    return Err(Error::Invalid(format!("identity is not a unit of the multiplication map at {g:?}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    /// `{X_i, Ê_a}`, invariant.
    Hat,
    /// `{X_i, Ẽ_a}`, fundamental fields in the vertical slots.
    Tilde,
}

/// Frame on Q with rows `X_i = ∂/∂x^i − γ_i^b Ê_b` followed by `Ê_a` or `Ẽ_a`.
#[derive(Clone, Copy, Debug)]
pub struct BundleFrame<'a> {
    pub data: &'a PrincipalBundleData,
    pub kind: FrameKind,
}

impl<'a> BundleFrame<'a> {
    pub fn hat(data: &'a PrincipalBundleData) -> Self {
        BundleFrame { data, kind: FrameKind::Hat }
    }
    pub fn tilde(data: &'a PrincipalBundleData) -> Self {
        BundleFrame { data, kind: FrameKind::Tilde }
    }
}

impl FrameFn for BundleFrame<'_> {
    fn n(&self) -> usize {
        self.data.n()
    }
    fn matrix<S: Scalar>(&self, q: &[S]) -> Result<Mat<S>> {
        let d = self.data;
        let (nb, nf) = (d.n_base, d.n_fiber);
        let mut m = Mat::zeros(nb + nf, nb + nf);
        for i in 0..nb {
            m[(i, i)] = S::one();
        }
        if nf == 0 {
            return Ok(m);
        }
        let k = d.k_at(q)?;
        let ak = d.a_at(q)?.matmul(&k);
        let g = d.gamma_at(q)?;
        let gak = g.matmul(&ak);
        for i in 0..nb {
            for b in 0..nf {
                m[(i, nb + b)] = -gak[(i, b)];
            }
        }
        let vert = if self.kind == FrameKind::Hat { &ak } else { &k };
        for a in 0..nf {
            for b in 0..nf {
                m[(nb + a, nb + b)] = vert[(a, b)];
            }
        }
        Ok(m)
    }
}

/// Row `index` of a bundle frame as a vector field on Q.
#[derive(Clone, Copy, Debug)]
pub struct BundleVector<'a> {
    pub frame: BundleFrame<'a>,
    pub index: usize,
}

impl VectorField for BundleVector<'_> {
    fn dim(&self) -> usize {
        self.frame.n()
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        FrameVector { frame: &self.frame, index: self.index }.eval(x)
    }
}

/// The three families `X_i`, `Ê_a`, `Ẽ_a` as separate vector fields.
#[derive(Clone, Debug)]
pub struct InvariantFrame<'a> {
    pub x: Vec<BundleVector<'a>>,
    pub ehat: Vec<BundleVector<'a>>,
    pub etilde: Vec<BundleVector<'a>>,
}

/// Builds the frame fields, checking that K is invertible over the identity.
pub fn build_invariant_frame(data: &PrincipalBundleData) -> Result<InvariantFrame<'_>> {
    let (nb, nf) = (data.n_base, data.n_fiber);
    if nf > 0 {
        let e = data.representative(&vec![0.0; nb]);
        Lu::new(&data.k_at(&e)?, 1e-12).map_err(|_| Error::Invalid("fundamental matrix singular at the identity".into()))?;
    }
    let row = |kind, index| BundleVector { frame: BundleFrame { data, kind }, index };
    Ok(InvariantFrame {
        x: (0..nb).map(|i| row(FrameKind::Hat, i)).collect(),
        ehat: (0..nf).map(|a| row(FrameKind::Hat, nb + a)).collect(),
        etilde: (0..nf).map(|a| row(FrameKind::Tilde, nb + a)).collect(),
    })
}
