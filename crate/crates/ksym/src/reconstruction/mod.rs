//! The mechanical k-connection of a G-regular Lagrangian, the SOPDE
//! connection, and reconstruction of full solutions from reduced ones:
//! horizontal lift, group path, composition through the action.

mod lift;

pub use lift::{
    el_certificate, group_path_defect, horizontal_lift_path, horizontal_lift_rhs, reconstruct_solution, reconstruction_rhs, GroupPath,
    LiftedField, ReconstructInit, ReconstructOptions, Reconstruction,
};

use crate::diff::jvp;
use crate::error::{Error, Result};
use crate::geometry::frame::{factor, to_quasi, FrameFn};
use crate::geometry::point::TkLayout;
use crate::lagrangian::{force_index, matrix_regularity, ForceFn, Lagrangian, Regularity};
use crate::scalar::{HyperDual, Scalar};
use crate::solver::linalg::{Lu, Mat, PIVOT_TOL};
use crate::symmetry::{BundleFrame, PrincipalBundleData};

/// Hessian of L along vertical lifts of the frame `{X_i, Ẽ_a}`, composite
/// index `α·n + A` (A runs over base indices, then fiber indices).
#[derive(Clone, Debug)]
pub struct HessianBlocks<S> {
    pub k: usize,
    pub nb: usize,
    pub nf: usize,
    pub m: Mat<S>,
}

impl<S: Scalar> HessianBlocks<S> {
    fn n(&self) -> usize {
        self.nb + self.nf
    }
    fn g(&self, a: usize, b: usize, i: usize, j: usize) -> S {
        self.m[(a * self.n() + i, b * self.n() + j)]
    }
    /// `g_ij^{αβ}`.
    pub fn base(&self, a: usize, b: usize, i: usize, j: usize) -> S {
        self.g(a, b, i, j)
    }
    /// `g_ia^{αβ}`.
    pub fn mixed(&self, a: usize, b: usize, i: usize, c: usize) -> S {
        self.g(a, b, i, self.nb + c)
    }
    /// `g_ab^{αβ}`.
    pub fn fiber(&self, a: usize, b: usize, c: usize, d: usize) -> S {
        self.g(a, b, self.nb + c, self.nb + d)
    }

    /// The `(k·n_fiber)`-square matrix `(g_ab^{αβ})`, row `α·nf + a`, column `β·nf + b`.
    pub fn vertical_matrix(&self) -> Mat<S> {
        let (k, nf) = (self.k, self.nf);
        let mut out = Mat::zeros(k * nf, k * nf);
        for a in 0..k {
            for b in 0..k {
                for c in 0..nf {
                    for d in 0..nf {
                        out[(a * nf + c, b * nf + d)] = self.fiber(a, b, c, d);
                    }
                }
            }
        }
        out
    }

    /// Largest `|g_AB^{αβ} − g_BA^{βα}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = &self.m;
        let mut worst: f64 = 0.0;
        for r in 0..m.rows {
            for c in 0..m.cols {
                worst = worst.max((m[(r, c)].re() - m[(c, r)].re()).abs());
            }
        }
        worst
    }

    /// `B̃_{αi}^{γa} = g^{ab}_{αβ} g_ib^{γβ}` at `((α·nb + i)·k + γ)·nf + a`.
    pub fn btilde(&self) -> Result<Vec<S>> {
        let (k, nb, nf) = (self.k, self.nb, self.nf);
        let mut out = vec![S::zero(); k * nb * k * nf];
        if nb == 0 || nf == 0 {
            return Ok(out);
        }
        let lu = Lu::new(&self.vertical_matrix(), PIVOT_TOL).map_err(|_| Error::SingularBlock)?;
        for g in 0..k {
            for i in 0..nb {
                let mut rhs = Vec::with_capacity(k * nf);
                for b in 0..k {
                    for c in 0..nf {
                        rhs.push(self.mixed(g, b, i, c));
                    }
                }
                let sol = lu.solve(&rhs);
                for a in 0..k {
                    for c in 0..nf {
                        out[((a * nb + i) * k + g) * nf + c] = sol[a * nf + c];
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn btilde_index(k: usize, nb: usize, nf: usize, alpha: usize, i: usize, gamma: usize, a: usize) -> usize {
    ((alpha * nb + i) * k + gamma) * nf + a
}

impl HessianBlocks<f64> {
    /// G-regularity: invertibility of `(g_ab^{αβ})`. Vacuous for a trivial group.
    pub fn g_regularity(&self) -> Regularity {
        matrix_regularity(&self.vertical_matrix())
    }
}

/// The mechanical k-connection determined by an invariant Lagrangian.
#[derive(Clone, Copy, Debug)]
pub struct MechanicalKConnection<'a> {
    pub lagrangian: &'a Lagrangian,
    pub data: &'a PrincipalBundleData,
}

impl<'a> MechanicalKConnection<'a> {
    pub fn new(lagrangian: &'a Lagrangian, data: &'a PrincipalBundleData) -> Result<Self> {
        if lagrangian.n() != data.n() {
            return Err(Error::Invalid(format!("Lagrangian on R^{} but bundle data on R^{}", lagrangian.n(), data.n())));
        }
        Ok(MechanicalKConnection { lagrangian, data })
    }

    pub fn k(&self) -> usize {
        self.lagrangian.k()
    }

    /// Hessian blocks at a flat natural state.
    pub fn blocks<S: Scalar>(&self, x: &[S]) -> Result<HessianBlocks<S>> {
        hessian_blocks(self.lagrangian, self.data, x)
    }

    /// Vertical part `(ṽ_α^a + v_γ^i B̃_{αi}^{γa}) Ẽ_a` of every velocity, as
    /// natural components, row α. Here `(v, ṽ)` are frame components in `{X_i, Ẽ_a}`.
    pub fn vertical_part(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let d = self.data;
        let (nb, nf, k) = (d.n_base, d.n_fiber, self.k());
        let lay = TkLayout::new(d.n(), k);
        let q = &x[lay.q_range()];
        let z = BundleFrame::tilde(d).matrix(q)?;
        let lu = factor(&z, q)?;
        let quasi: Vec<Vec<f64>> = (0..k).map(|a| to_quasi(&lu, &x[lay.u_range(a)])).collect();
        let bt = self.blocks(x)?.btilde()?;
        let mut out = Vec::with_capacity(k);
        for a in 0..k {
            let mut row = vec![0.0; d.n()];
            for c in 0..nf {
                let mut coef = quasi[a][nb + c];
                for g in 0..k {
                    for i in 0..nb {
                        coef += quasi[g][i] * bt[btilde_index(k, nb, nf, a, i, g, c)];
                    }
                }
                for (j, r) in row.iter_mut().enumerate() {
                    *r += coef * z[(nb + c, j)];
                }
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// `g_AB^{αβ} = Z_A^{Vα}(Z_B^{Vβ}(L))` for the frame `{X_i, Ẽ_a}`.
pub fn hessian_blocks<S: Scalar>(l: &Lagrangian, data: &PrincipalBundleData, x: &[S]) -> Result<HessianBlocks<S>> {
    let (n, k) = (l.n(), l.k());
    let z = BundleFrame::tilde(data).matrix(&x[..n])?;
    let h = l.velocity_hessian(x)?;
    let mut zh = Mat::zeros(n * k, n * k);
    // Block-diagonal Z applied on both sides.
    for a in 0..k {
        for i in 0..n {
            for c in 0..n * k {
                let mut s = S::zero();
                for j in 0..n {
                    s += z[(i, j)] * h[(a * n + j, c)];
                }
                zh[(a * n + i, c)] = s;
            }
        }
    }
    let mut m = Mat::zeros(n * k, n * k);
    for r in 0..n * k {
        for b in 0..k {
            for i in 0..n {
                let mut s = S::zero();
                for j in 0..n {
                    s += zh[(r, b * n + j)] * z[(i, j)];
                }
                m[(r, b * n + i)] = s;
            }
        }
    }
    Ok(HessianBlocks { k, nb: data.n_base, nf: data.n_fiber, m })
}

/// Horizontal and vertical parts of frame-component velocities `(v_α^i, ṽ_α^a)`
/// in `{X_i, Ẽ_a}`. Rows α; the two parts add up to the input.
pub fn decompose_sopde(quasi: &[Vec<f64>], nb: usize, btilde: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = quasi.len();
    let n = quasi.first().map_or(0, Vec::len);
    let nf = n - nb;
    let mut vert = vec![vec![0.0; n]; k];
    for a in 0..k {
        for c in 0..nf {
            let mut coef = quasi[a][nb + c];
            for g in 0..k {
                for i in 0..nb {
                    coef += quasi[g][i] * btilde[btilde_index(k, nb, nf, a, i, g, c)];
                }
            }
            vert[a][nb + c] = coef;
        }
    }
    let hor = quasi.iter().zip(&vert).map(|(q, v)| q.iter().zip(v).map(|(x, y)| x - y).collect()).collect();
    (hor, vert)
}

/// `Γ_{Cγ}^A = −1/(k+1) Σ_δ ∂F_{δγ}^A/∂u_δ^C` at `(C·k + γ)·n + A`.
pub fn sopde_connection_coeffs<F: ForceFn + ?Sized>(forces: &F, x: &[f64]) -> Result<Vec<f64>> {
    let l = forces.layout();
    let (n, k) = (l.n, l.k);
    let mut out = vec![0.0; n * k * n];
    let c0 = -1.0 / (k as f64 + 1.0);
    for d in 0..k {
        for c in 0..n {
            let mut dir = vec![0.0; l.dim()];
            dir[l.u(d, c)] = 1.0;
            let df = jvp(|h: &[HyperDual<f64>]| forces.forces(h), x, &dir)?.1;
            for g in 0..k {
                for a in 0..n {
                    out[(c * k + g) * n + a] += c0 * df[force_index(l, d, g, a)];
                }
            }
        }
    }
    Ok(out)
}

/// Vertical projector of the SOPDE connection on a tangent vector of T¹ₖQ:
/// `(ωX)_γ^A = X_γ^A + X^C Γ_{Cγ}^A`, base components set to zero.
pub fn sopde_vertical_projector(layout: TkLayout, coeffs: &[f64], v: &[f64]) -> Vec<f64> {
    let (n, k) = (layout.n, layout.k);
    let mut out = vec![0.0; layout.dim()];
    for g in 0..k {
        for a in 0..n {
            let mut s = v[layout.u(g, a)];
            for c in 0..n {
                s += v[c] * coeffs[(c * k + g) * n + a];
            }
            out[layout.u(g, a)] = s;
        }
    }
    out
}
