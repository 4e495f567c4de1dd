use super::field::VectorField;
use super::point::KTangentPoint;
use crate::diff::jvp;
use crate::error::{Error, Result};
use crate::exprlang::CExpr;
use crate::scalar::{HyperDual, Scalar};
use crate::solver::linalg::{Lu, Mat};

/// Relative determinant threshold below which a frame counts as singular.
pub const FRAME_DET_TOL: f64 = 1e-12;

/// A local frame {Z_A} on an open set of ℝⁿ.
pub trait FrameFn {
    fn n(&self) -> usize;
    /// Matrix with `Z_A^B` in row A, column B.
    fn matrix<S: Scalar>(&self, q: &[S]) -> Result<Mat<S>>;
}

impl<T: FrameFn + ?Sized> FrameFn for &T {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn matrix<S: Scalar>(&self, q: &[S]) -> Result<Mat<S>> {
        (**self).matrix(q)
    }
}

/// The coordinate frame ∂/∂q^A.
#[derive(Clone, Copy, Debug)]
pub struct IdentityFrame(pub usize);

impl FrameFn for IdentityFrame {
    fn n(&self) -> usize {
        self.0
    }
    fn matrix<S: Scalar>(&self, _: &[S]) -> Result<Mat<S>> {
        Ok(Mat::identity(self.0))
    }
}

/// Frame with expression entries over the coordinates.
#[derive(Clone, Debug)]
pub struct ExprFrame {
    pub rows: Vec<Vec<CExpr>>,
}

impl FrameFn for ExprFrame {
    fn n(&self) -> usize {
        self.rows.len()
    }
    fn matrix<S: Scalar>(&self, q: &[S]) -> Result<Mat<S>> {
        let n = self.rows.len();
        let mut m = Mat::zeros(n, n);
        for (a, row) in self.rows.iter().enumerate() {
            for (b, e) in row.iter().enumerate() {
                m[(a, b)] = e.eval(q)?;
            }
        }
        Ok(m)
    }
}

/// The A-th frame vector as a vector field.
pub struct FrameVector<'a, F: ?Sized> {
    pub frame: &'a F,
    pub index: usize,
}

impl<F: FrameFn + ?Sized> VectorField for FrameVector<'_, F> {
    fn dim(&self) -> usize {
        self.frame.n()
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        Ok(self.frame.matrix(x)?.row(self.index).to_vec())
    }
}

/// LU factors of the frame matrix, or `SingularFrame` when |det| is below
/// `FRAME_DET_TOL` times the product of the row norms.
pub fn factor<S: Scalar>(z: &Mat<S>, q: &[S]) -> Result<Lu<S>> {
    let singular = |det: f64| Error::SingularFrame { q: q.iter().map(|v| v.re()).collect(), det };
    let lu = Lu::new(z, 0.0).map_err(|_| singular(0.0))?;
    let det = lu.det().re();
    let scale: f64 = (0..z.rows).map(|i| z.row(i).iter().map(|v| v.re() * v.re()).sum::<f64>().sqrt()).product();
    if !(det.abs() > FRAME_DET_TOL * scale) {
        return Err(singular(det));
    }
    Ok(lu)
}

/// Frame matrix and its derivative along `dir` at `q`.
pub fn matrix_jvp<S: Scalar, F: FrameFn + ?Sized>(frame: &F, q: &[S], dir: &[S]) -> Result<(Mat<S>, Mat<S>)> {
    let n = frame.n();
    let (v, d) = jvp(|h: &[HyperDual<S>]| Ok::<_, Error>(frame.matrix(h)?.data), q, dir)?;
    Ok((Mat::from_vec(n, n, v), Mat::from_vec(n, n, d)))
}

/// Quasi-velocities `v` with `u^B = v^A Z_A^B` for one velocity vector.
pub fn to_quasi<S: Scalar>(lu: &Lu<S>, u: &[S]) -> Vec<S> {
    lu.solve_transposed(u)
}

/// Natural components `u^B = v^A Z_A^B`.
pub fn to_natural<S: Scalar>(z: &Mat<S>, v: &[S]) -> Vec<S> {
    z.vecmat(v)
}

pub fn quasi_from_natural<F: FrameFn + ?Sized>(frame: &F, p: &KTangentPoint) -> Result<Vec<Vec<f64>>> {
    let z = frame.matrix(&p.q)?;
    let lu = factor(&z, &p.q)?;
    Ok(p.u.iter().map(|u| to_quasi(&lu, u)).collect())
}

pub fn natural_from_quasi<F: FrameFn + ?Sized>(frame: &F, q: &[f64], v: &[Vec<f64>]) -> Result<KTangentPoint> {
    let z = frame.matrix(q)?;
    factor(&z, q)?;
    KTangentPoint::new(q.to_vec(), v.iter().map(|row| to_natural(&z, row)).collect())
}

/// Frame structure functions `R^D_{BC}` with `[Z_B, Z_C] = R^D_{BC} Z_D`,
/// stored at `(D·n + B)·n + C`.
pub fn structure_functions<S: Scalar, F: FrameFn + ?Sized>(frame: &F, q: &[S]) -> Result<Vec<S>> {
    let n = frame.n();
    let z = frame.matrix(q)?;
    let lu = factor(&z, q)?;
    // dz[B] = D_{Z_B} Z.
    let dz: Vec<Mat<S>> = (0..n).map(|b| Ok(matrix_jvp(frame, q, z.row(b))?.1)).collect::<Result<_>>()?;
    let mut r = vec![S::zero(); n * n * n];
    for b in 0..n {
        for c in 0..n {
            let br: Vec<S> = (0..n).map(|j| dz[b][(c, j)] - dz[c][(b, j)]).collect();
            let coeff = to_quasi(&lu, &br);
            for d in 0..n {
                r[(d * n + b) * n + c] = coeff[d];
            }
        }
    }
    Ok(r)
}
