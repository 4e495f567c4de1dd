use super::{BundleFrame, BundleVector as Row, PrincipalBundleData};
use crate::diff::dir_deriv;
use crate::error::Result;
use crate::geometry::field::{lie_bracket, max_norm, Component, KVectorField, VectorField};
use crate::geometry::frame::FrameFn;
use crate::geometry::lifts::complete_lift;
use crate::lagrangian::Lagrangian;
use crate::scalar::{HyperDual, Scalar};

/// Right-hand side of a bracket relation on Q: `coeff^c(q)` times row `c` of
/// the vertical part of a bundle frame.
enum Expected<'a> {
    /// `−K^c_{ij} Ê_c`.
    Horizontal(&'a PrincipalBundleData, usize, usize),
    /// `Υ_{ia}^b Ê_b`.
    Mixed(&'a PrincipalBundleData, usize, usize),
    /// `C^c_{ab} Ê_c`.
    Invariant(&'a PrincipalBundleData, usize, usize),
    /// `−C^c_{ab} Ẽ_c`.
    Fundamental(&'a PrincipalBundleData, usize, usize),
}

impl VectorField for Expected<'_> {
    fn dim(&self) -> usize {
        match self {
            Expected::Horizontal(d, ..) | Expected::Mixed(d, ..) | Expected::Invariant(d, ..) | Expected::Fundamental(d, ..) => d.n(),
        }
    }
    fn eval<S: Scalar>(&self, q: &[S]) -> Result<Vec<S>> {
        let (d, frame, coeffs): (&PrincipalBundleData, _, Vec<S>) = match *self {
            Expected::Horizontal(d, i, j) => {
                let k = d.curvature(q)?;
                (d, BundleFrame::hat(d), (0..d.n_fiber).map(|c| -k[(c * d.n_base + i) * d.n_base + j]).collect())
            }
            Expected::Mixed(d, i, a) => {
                let u = d.upsilon(q)?;
                (d, BundleFrame::hat(d), (0..d.n_fiber).map(|b| u[(i * d.n_fiber + a) * d.n_fiber + b]).collect())
            }
            Expected::Invariant(d, a, b) => (d, BundleFrame::hat(d), (0..d.n_fiber).map(|c| S::cst(d.algebra.c(c, a, b))).collect()),
            Expected::Fundamental(d, a, b) => (d, BundleFrame::tilde(d), (0..d.n_fiber).map(|c| S::cst(-d.algebra.c(c, a, b))).collect()),
        };
        let z = frame.matrix(q)?;
        let mut out = vec![S::zero(); d.n()];
        for (c, &w) in coeffs.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += w * z[(d.n_base + c, j)];
            }
        }
        Ok(out)
    }
}

/// Worst residual of each frame bracket relation over a set of points of Q.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BracketTable {
    /// `[Ẽ_a, Ẽ_b] + C^c_{ab} Ẽ_c`.
    pub fundamental: f64,
    /// `[Ê_a, Ê_b] − C^c_{ab} Ê_c`.
    pub invariant: f64,
    /// `[X_i, Ẽ_a]`.
    pub horizontal_fundamental: f64,
    /// `[X_i, Ê_a] − Υ_{ia}^b Ê_b`.
    pub mixed: f64,
    /// `[X_i, X_j] + K^a_{ij} Ê_a`.
    pub horizontal: f64,
    /// `[Ẽ_a, Ê_b]`.
    pub fundamental_invariant: f64,
}

impl BracketTable {
    pub fn max(&self) -> f64 {
        [self.fundamental, self.invariant, self.horizontal_fundamental, self.mixed, self.horizontal, self.fundamental_invariant]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Evaluates the six frame bracket relations at the given points of Q.
pub fn verify_bracket_table(data: &PrincipalBundleData, points: &[Vec<f64>]) -> Result<BracketTable> {
    let (nb, nf) = (data.n_base, data.n_fiber);
    let hat = |index| Row { frame: BundleFrame::hat(data), index };
    let til = |index| Row { frame: BundleFrame::tilde(data), index };
    let mut t = BracketTable::default();
    for q in points {
        for i in 0..nb {
            for j in 0..nb {
                let lhs = lie_bracket(&hat(i), &hat(j), q)?;
                t.horizontal = t.horizontal.max(diff_norm(&lhs, &Expected::Horizontal(data, i, j).eval(q)?));
            }
            for a in 0..nf {
                let lhs = lie_bracket(&hat(i), &hat(nb + a), q)?;
                t.mixed = t.mixed.max(diff_norm(&lhs, &Expected::Mixed(data, i, a).eval(q)?));
                t.horizontal_fundamental = t.horizontal_fundamental.max(max_norm(&lie_bracket(&hat(i), &til(nb + a), q)?));
            }
        }
        for a in 0..nf {
            for b in 0..nf {
                let lhs = lie_bracket(&hat(nb + a), &hat(nb + b), q)?;
                t.invariant = t.invariant.max(diff_norm(&lhs, &Expected::Invariant(data, a, b).eval(q)?));
                let lhs = lie_bracket(&til(nb + a), &til(nb + b), q)?;
                t.fundamental = t.fundamental.max(diff_norm(&lhs, &Expected::Fundamental(data, a, b).eval(q)?));
                t.fundamental_invariant = t.fundamental_invariant.max(max_norm(&lie_bracket(&til(nb + a), &hat(nb + b), q)?));
            }
        }
    }
    Ok(t)
}

/// Largest `|Ẽ_a^C(L)|` over the given flat natural states.
pub fn invariance_check(l: &Lagrangian, data: &PrincipalBundleData, states: &[Vec<f64>]) -> Result<f64> {
    let k = l.k();
    let mut worst: f64 = 0.0;
    for x in states {
        for a in 0..data.n_fiber {
            let lift = complete_lift(Row { frame: BundleFrame::tilde(data), index: data.n_base + a }, k);
            let dir = lift.eval(x)?;
            let d = dir_deriv(|h: &[HyperDual<f64>]| l.eval(h), x, &dir)?;
            worst = worst.max(d.abs());
        }
    }
    Ok(worst)
}

/// Largest component of `[Ẽ_a^C, Γ_α]` over the given flat natural states.
pub fn quasi_invariance_defect<F: KVectorField + ?Sized>(field: &F, data: &PrincipalBundleData, states: &[Vec<f64>]) -> Result<f64> {
    let k = field.k();
    let mut worst: f64 = 0.0;
    for x in states {
        for a in 0..data.n_fiber {
            let lift = complete_lift(Row { frame: BundleFrame::tilde(data), index: data.n_base + a }, k);
            for alpha in 0..k {
                let b = lie_bracket(&lift, &Component { field, alpha }, x)?;
                worst = worst.max(max_norm(&b));
            }
        }
    }
    Ok(worst)
}
