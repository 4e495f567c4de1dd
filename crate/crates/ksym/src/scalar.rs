//! Scalar abstraction shared by plain `f64` evaluation and hyper-dual
//! forward-mode differentiation.
//!
//! Every evaluator in the crate is generic over [`Scalar`], so the same code
//! yields values, first directional derivatives and mixed second derivatives.
//! [`HyperDual`] nests: `HyperDual<HyperDual<f64>>` carries two independent
//! pairs of seed directions, which is how derivatives of quantities that are
//! themselves defined through derivatives (Christoffel symbols, frame
//! curvature, Lie brackets of SOPDEs) are obtained exactly.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn cst(c: f64) -> Self;
    /// Real part (the value with every infinitesimal part dropped).
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn scale(self, c: f64) -> Self {
        self * Self::cst(c)
    }
    /// `x^y` for `x > 0`, as `exp(y ln x)`.
    fn powf(self, y: Self) -> Self {
        (y * self.ln()).exp()
    }
    fn abs_re(&self) -> f64 {
        self.re().abs()
    }
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, y: Self) -> Self {
        f64::powf(self, y)
    }
}

/// Hyper-dual number `v + d1 e1 + d2 e2 + d12 e1 e2` with `e1² = e2² = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HyperDual<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
    pub d12: T,
}

impl<T: Scalar> HyperDual<T> {
    pub fn new(v: T, d1: T, d2: T, d12: T) -> Self {
        HyperDual { v, d1, d2, d12 }
    }

    pub fn constant(v: T) -> Self {
        HyperDual { v, d1: T::zero(), d2: T::zero(), d12: T::zero() }
    }

    /// A variable seeded with first-derivative components `d1`, `d2`.
    pub fn seeded(v: T, d1: T, d2: T) -> Self {
        HyperDual { v, d1, d2, d12: T::zero() }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    #[inline]
    fn chain(self, f: T, df: T, ddf: T) -> Self {
        HyperDual { v: f, d1: df * self.d1, d2: df * self.d2, d12: ddf * self.d1 * self.d2 + df * self.d12 }
    }
}

impl<T: Scalar> Add for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        HyperDual { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2, d12: self.d12 + o.d12 }
    }
}

impl<T: Scalar> Sub for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        HyperDual { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2, d12: self.d12 - o.d12 }
    }
}

impl<T: Scalar> Mul for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        HyperDual {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.v * o.d2,
            d12: self.d12 * o.v + self.d1 * o.d2 + self.d2 * o.d1 + self.v * o.d12,
        }
    }
}

impl<T: Scalar> Div for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.v.powi(-1);
        let r = o.chain(inv, -(inv * inv), inv * inv * inv.scale(2.0));
        self * r
    }
}

impl<T: Scalar> Neg for HyperDual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        HyperDual { v: -self.v, d1: -self.d1, d2: -self.d2, d12: -self.d12 }
    }
}

impl<T: Scalar> AddAssign for HyperDual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> SubAssign for HyperDual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> MulAssign for HyperDual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Scalar> Scalar for HyperDual<T> {
    fn cst(c: f64) -> Self {
        HyperDual::constant(T::cst(c))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn tan(self) -> Self {
        let t = self.v.tan();
        let sec2 = T::one() + t * t;
        self.chain(t, sec2, (sec2 * t).scale(2.0))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = self.v.powi(-1);
        self.chain(self.v.ln(), inv, -(inv * inv))
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        let dr = (r.scale(2.0)).powi(-1);
        self.chain(r, dr, -(dr / self.v).scale(0.5))
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::one(),
            1 => self,
            _ => {
                let nf = n as f64;
                let p2 = self.v.powi(n - 2);
                let p1 = p2 * self.v;
                self.chain(p1 * self.v, p1.scale(nf), p2.scale(nf * (nf - 1.0)))
            }
        }
    }
}

/// Hyper-dual with both seeds zero.
pub fn hd<S: Scalar>(v: S) -> HyperDual<S> {
    HyperDual::constant(v)
}

/// Lifts a slice into hyper-duals with seed direction `d1` (and `d2`, if given).
pub fn seed<S: Scalar>(x: &[S], d1: Option<&[S]>, d2: Option<&[S]>) -> Vec<HyperDual<S>> {
    x.iter().enumerate().map(|(i, &v)| HyperDual::seeded(v, d1.map_or(S::zero(), |d| d[i]), d2.map_or(S::zero(), |d| d[i]))).collect()
}

/// Lifts a slice, seeding unit coordinate directions `i` (first) and `j` (second).
pub fn seed_units<S: Scalar>(x: &[S], i: Option<usize>, j: Option<usize>) -> Vec<HyperDual<S>> {
    x.iter()
        .enumerate()
        .map(|(m, &v)| {
            let d1 = if Some(m) == i { S::one() } else { S::zero() };
            let d2 = if Some(m) == j { S::one() } else { S::zero() };
            HyperDual::seeded(v, d1, d2)
        })
        .collect()
}

pub fn values<S: Scalar>(x: &[HyperDual<S>]) -> Vec<S> {
    x.iter().map(|h| h.v).collect()
}

pub fn firsts<S: Scalar>(x: &[HyperDual<S>]) -> Vec<S> {
    x.iter().map(|h| h.d1).collect()
}

pub fn lift_slice<S: Scalar>(x: &[S]) -> Vec<HyperDual<S>> {
    x.iter().map(|&v| HyperDual::constant(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type H = HyperDual<f64>;

    fn var(v: f64, d1: f64, d2: f64) -> H {
        H::seeded(v, d1, d2)
    }

    #[test]
    fn product_rule_mixed_part() {
        let f = H::new(2.0, 3.0, 5.0, 7.0);
        let g = H::new(11.0, 13.0, 17.0, 19.0);
        let p = f * g;
        assert_eq!(p.d12, 7.0 * 11.0 + 3.0 * 17.0 + 5.0 * 13.0 + 2.0 * 19.0);
    }

    #[test]
    fn square_derivative() {
        let x = var(3.0, 1.0, 0.0);
        assert_eq!((x * x).d1, 6.0);
        assert_eq!(x.powi(2).d1, 6.0);
    }

    #[test]
    fn sin_mixed_second_at_zero() {
        let x = var(0.0, 1.0, 1.0);
        assert_eq!(x.sin().d12, 0.0);
        let y = var(0.3, 1.0, 1.0);
        assert!((y.sin().d12 + 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn mixed_partial_of_product() {
        let x = var(1.5, 1.0, 0.0);
        let y = var(-0.5, 0.0, 1.0);
        assert_eq!((x * y).d12, 1.0);
    }

    #[test]
    fn division_and_reciprocal() {
        let x = var(2.0, 1.0, 1.0);
        let r = H::one() / x;
        assert!((r.d1 + 0.25).abs() < 1e-15);
        assert!((r.d12 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn nested_third_derivative() {
        // d³/dx³ x⁴ = 24 x, through two nesting levels.
        type HH = HyperDual<HyperDual<f64>>;
        let x0 = 1.25;
        let inner = HyperDual::seeded(x0, 1.0, 0.0);
        let x: HH = HyperDual::seeded(inner, HyperDual::constant(1.0), HyperDual::constant(1.0));
        let f = x.powi(4);
        assert!((f.d12.d1 - 24.0 * x0).abs() < 1e-12);
    }

    #[test]
    fn elementary_function_derivatives() {
        let x0 = 0.7;
        let x = var(x0, 1.0, 1.0);
        let tests: Vec<(H, f64, f64)> = vec![
            (x.exp(), x0.exp(), x0.exp()),
            (x.ln(), 1.0 / x0, -1.0 / (x0 * x0)),
            (x.sqrt(), 0.5 / x0.sqrt(), -0.25 * x0.powf(-1.5)),
            (x.cos(), -x0.sin(), -x0.cos()),
            (x.tan(), 1.0 / x0.cos().powi(2), 2.0 * x0.tan() / x0.cos().powi(2)),
            (x.powi(-3), -3.0 * x0.powi(-4), 12.0 * x0.powi(-5)),
            (x.powf(H::cst(2.5)), 2.5 * x0.powf(1.5), 3.75 * x0.powf(0.5)),
        ];
        for (h, d, dd) in tests {
            assert!((h.d1 - d).abs() < 1e-12, "{h:?} vs {d}");
            assert!((h.d12 - dd).abs() < 1e-12, "{h:?} vs {dd}");
        }
    }
}
