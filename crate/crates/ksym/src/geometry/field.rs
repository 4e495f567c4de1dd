use crate::diff::jvp;
use crate::error::Result;
use crate::exprlang::CExpr;
use crate::scalar::{HyperDual, Scalar};

/// A vector field on an open subset of ℝᵈ given by its coordinate components.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>>;
}

/// A k-vector field: k vector fields on the same ℝᵈ, indexed by α = 0..k.
pub trait KVectorField {
    fn k(&self) -> usize;
    fn dim(&self) -> usize;
    fn component<S: Scalar>(&self, alpha: usize, x: &[S]) -> Result<Vec<S>>;
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        (**self).eval(x)
    }
}

impl<T: KVectorField + ?Sized> KVectorField for &T {
    fn k(&self) -> usize {
        (**self).k()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn component<S: Scalar>(&self, alpha: usize, x: &[S]) -> Result<Vec<S>> {
        (**self).component(alpha, x)
    }
}

/// The α-th member of a k-vector field, as an ordinary vector field.
pub struct Component<'a, F: ?Sized> {
    pub field: &'a F,
    pub alpha: usize,
}

impl<F: KVectorField + ?Sized> VectorField for Component<'_, F> {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.field.component(self.alpha, x)
    }
}

/// Vector field with expression-backed components over the coordinates `0..dim`.
#[derive(Clone, Debug)]
pub struct ExprField {
    pub coeffs: Vec<CExpr>,
}

impl VectorField for ExprField {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.coeffs.iter().map(|c| Ok(c.eval(x)?)).collect()
    }
}

/// k-vector field assembled from k expression-backed fields.
#[derive(Clone, Debug)]
pub struct ExprKField {
    pub fields: Vec<ExprField>,
}

impl KVectorField for ExprKField {
    fn k(&self) -> usize {
        self.fields.len()
    }
    fn dim(&self) -> usize {
        self.fields.first().map_or(0, |f| f.dim())
    }
    fn component<S: Scalar>(&self, alpha: usize, x: &[S]) -> Result<Vec<S>> {
        self.fields[alpha].eval(x)
    }
}

/// Derivative of `y` along the vector `dir` at `x` (`D_dir Y`).
pub fn derivative_along<S: Scalar, Y: VectorField + ?Sized>(y: &Y, x: &[S], dir: &[S]) -> Result<Vec<S>> {
    Ok(jvp(|h: &[HyperDual<S>]| y.eval(h), x, dir)?.1)
}

/// Lie bracket `[X, Y]^J = X^I ∂_I Y^J − Y^I ∂_I X^J`, derivatives by forward-mode AD.
pub fn lie_bracket<S, X, Y>(xf: &X, yf: &Y, x: &[S]) -> Result<Vec<S>>
where
    S: Scalar,
    X: VectorField + ?Sized,
    Y: VectorField + ?Sized,
{
    let xv = xf.eval(x)?;
    let yv = yf.eval(x)?;
    let dy = derivative_along(yf, x, &xv)?;
    let dx = derivative_along(xf, x, &yv)?;
    Ok(dy.into_iter().zip(dx).map(|(a, b)| a - b).collect())
}

/// Infinity norm of the real parts.
pub fn max_norm<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.re().abs()).fold(0.0, f64::max)
}
