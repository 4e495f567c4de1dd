//! Lagrangians on T¹ₖQ with exact derivatives, and the second-order PDE
//! fields they determine.

mod sopde;

pub use sopde::{
    christoffel, el_residual, force_index, frame_forces, general_sopde, lagrangian_sopde, metric_sopde, natural_forces, ChristoffelForces,
    ConstantForces, ForceFn, LagrangianForces, MinNormForces, SopdeField,
};

use crate::diff::{gradient, hessian_sym};
use crate::error::{Error, Result};
use crate::exprlang::CExpr;
use crate::geometry::frame::FrameFn;
use crate::geometry::point::{KTangentPoint, TkLayout};
use crate::scalar::{HyperDual, Scalar};
use crate::solver::linalg::{det, hadamard_bound, Mat};

/// Relative determinant threshold for the regularity verdict.
pub const REGULARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum LagrangianKind {
    /// `L = ½ δ^{αβ} h_AB(q) u_α^A u_β^B`, entries over the n base coordinates.
    Metric(Vec<Vec<CExpr>>),
    /// A single expression over the flat state `[q, u_1, .., u_k]`.
    Expression(CExpr),
}

#[derive(Clone, Debug)]
pub struct Lagrangian {
    pub layout: TkLayout,
    pub kind: LagrangianKind,
}

impl Lagrangian {
    pub fn metric(n: usize, k: usize, h: Vec<Vec<CExpr>>) -> Result<Self> {
        if h.len() != n || h.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("metric must be {n} x {n}")));
        }
        Ok(Lagrangian { layout: TkLayout::new(n, k), kind: LagrangianKind::Metric(h) })
    }

    pub fn expression(n: usize, k: usize, expr: CExpr) -> Self {
        Lagrangian { layout: TkLayout::new(n, k), kind: LagrangianKind::Expression(expr) }
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    /// The metric matrix at `q`, for metric Lagrangians.
    pub fn metric_at<S: Scalar>(&self, q: &[S]) -> Result<Option<Mat<S>>> {
        match &self.kind {
            LagrangianKind::Metric(h) => Ok(Some(eval_matrix(h, q)?)),
            LagrangianKind::Expression(_) => Ok(None),
        }
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
        let l = self.layout;
        match &self.kind {
            LagrangianKind::Expression(e) => Ok(e.eval(x)?),
            LagrangianKind::Metric(h) => {
                let m = eval_matrix(h, &x[l.q_range()])?;
                let mut s = S::zero();
                for a in 0..l.k {
                    let u = &x[l.u_range(a)];
                    let hu = m.matvec(u);
                    for (ui, hi) in u.iter().zip(&hu) {
                        s += *ui * *hi;
                    }
                }
                Ok(s.scale(0.5))
            }
        }
    }

    /// `∂L/∂u_α^A`, α-major.
    pub fn velocity_gradient<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        gradient(|h: &[HyperDual<S>]| self.eval(h), x, &self.layout.u_indices())
    }

    /// `∂²L/∂u_α^A ∂u_β^B` on the composite index `α·n + A`.
    pub fn velocity_hessian<S: Scalar>(&self, x: &[S]) -> Result<Mat<S>> {
        let m = self.layout.n * self.layout.k;
        Ok(Mat::from_vec(m, m, hessian_sym(|h: &[HyperDual<S>]| self.eval(h), x, &self.layout.u_indices())?))
    }

    /// Largest `|h_AB − h_BA|` over the given base points; zero for expression Lagrangians.
    pub fn metric_symmetry_defect(&self, points: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for q in points {
            if let Some(m) = self.metric_at(q)? {
                for a in 0..m.rows {
                    for b in 0..a {
                        worst = worst.max((m[(a, b)] - m[(b, a)]).abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

pub(crate) fn eval_matrix<S: Scalar>(entries: &[Vec<CExpr>], q: &[S]) -> Result<Mat<S>> {
    let rows = entries.len();
    let cols = entries.first().map_or(0, Vec::len);
    let mut m = Mat::zeros(rows, cols);
    for (i, row) in entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = e.eval(q)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Regularity {
    pub regular: bool,
    pub det: f64,
    pub min_abs_eigenvalue: f64,
}

/// Regularity of a symmetric matrix: determinant against the Hadamard bound.
pub fn matrix_regularity(h: &Mat<f64>) -> Regularity {
    if h.rows == 0 {
        return Regularity { regular: true, det: 1.0, min_abs_eigenvalue: f64::INFINITY };
    }
    let d = det(h);
    let eig = nalgebra::DMatrix::from_row_slice(h.rows, h.cols, &h.data).symmetric_eigenvalues();
    let min_abs = eig.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    Regularity { regular: d.abs() > REGULARITY_TOL * hadamard_bound(h), det: d, min_abs_eigenvalue: min_abs }
}

/// Regularity of L at a point: invertibility of the velocity Hessian.
pub fn regularity_check(l: &Lagrangian, p: &KTangentPoint) -> Result<Regularity> {
    Ok(matrix_regularity(&l.velocity_hessian(&p.to_flat())?))
}

/// Hessian `Z_A^{Vα}(Z_B^{Vβ}(L))` along vertical lifts of a frame, composite index `α·n + A`.
pub fn frame_hessian<F: FrameFn + ?Sized>(l: &Lagrangian, frame: &F, x: &[f64]) -> Result<Mat<f64>> {
    let n = l.n();
    let z = frame.matrix(&x[..n])?;
    let h = l.velocity_hessian(x)?;
    let m = h.rows;
    // Block-diagonal lift of Z acting on every velocity slot.
    let mut big = Mat::zeros(m, m);
    for a in 0..l.k() {
        for i in 0..n {
            for j in 0..n {
                big[(a * n + i, a * n + j)] = z[(i, j)];
            }
        }
    }
    Ok(big.matmul(&h).matmul(&big.transpose()))
}

pub fn frame_regularity<F: FrameFn + ?Sized>(l: &Lagrangian, frame: &F, x: &[f64]) -> Result<Regularity> {
    Ok(matrix_regularity(&frame_hessian(l, frame, x)?))
}

/// Energy `Δ(L) − L` with `Δ = u_α^A ∂/∂u_α^A`, and the coefficients `∂L/∂u_α^A` (row α).
pub fn energy_and_theta(l: &Lagrangian, p: &KTangentPoint) -> Result<(f64, Vec<Vec<f64>>)> {
    let x = p.to_flat();
    let grad = l.velocity_gradient(&x)?;
    let n = l.n();
    let delta: f64 = grad.iter().zip(&x[n..]).map(|(g, u)| g * u).sum();
    let theta = grad.chunks(n).map(<[f64]>::to_vec).collect();
    Ok((delta - l.eval(&x)?, theta))
}
