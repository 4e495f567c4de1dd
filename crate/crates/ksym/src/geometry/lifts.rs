use super::field::{derivative_along, VectorField};
use super::point::TkLayout;
use crate::error::Result;
use crate::scalar::Scalar;

/// Components of a vector field on T¹ₖQ split into the base part (along
/// ∂/∂q^A) and one fiber block per α (along ∂/∂u_α^A).
#[derive(Clone, Debug, PartialEq)]
pub struct Split<S> {
    pub base: Vec<S>,
    pub fiber: Vec<Vec<S>>,
}

impl<S: Scalar> Split<S> {
    pub fn flatten(&self) -> Vec<S> {
        self.base.iter().chain(self.fiber.iter().flatten()).copied().collect()
    }

    pub fn from_flat(layout: TkLayout, x: &[S]) -> Self {
        Split { base: x[layout.q_range()].to_vec(), fiber: (0..layout.k).map(|a| x[layout.u_range(a)].to_vec()).collect() }
    }
}

/// Complete lift `Z^C = Z^A ∂/∂q^A + u_α^A ∂Z^B/∂q^A ∂/∂u_α^B`.
#[derive(Clone, Debug)]
pub struct CompleteLift<V> {
    pub field: V,
    pub k: usize,
}

/// Vertical lift `Z^{Vα} = Z^A ∂/∂u_α^A`.
#[derive(Clone, Debug)]
pub struct VerticalLift<V> {
    pub field: V,
    pub k: usize,
    pub alpha: usize,
}

pub fn complete_lift<V: VectorField>(field: V, k: usize) -> CompleteLift<V> {
    CompleteLift { field, k }
}

pub fn vertical_lift<V: VectorField>(field: V, k: usize, alpha: usize) -> VerticalLift<V> {
    VerticalLift { field, k, alpha }
}

impl<V: VectorField> CompleteLift<V> {
    pub fn layout(&self) -> TkLayout {
        TkLayout::new(self.field.dim(), self.k)
    }

    pub fn eval_split<S: Scalar>(&self, x: &[S]) -> Result<Split<S>> {
        let l = self.layout();
        let q = &x[l.q_range()];
        let base = self.field.eval(q)?;
        let fiber = (0..self.k).map(|a| derivative_along(&self.field, q, &x[l.u_range(a)])).collect::<Result<_>>()?;
        Ok(Split { base, fiber })
    }
}

impl<V: VectorField> VerticalLift<V> {
    pub fn layout(&self) -> TkLayout {
        TkLayout::new(self.field.dim(), self.k)
    }

    pub fn eval_split<S: Scalar>(&self, x: &[S]) -> Result<Split<S>> {
        let l = self.layout();
        let z = self.field.eval(&x[l.q_range()])?;
        let mut fiber = vec![vec![S::zero(); l.n]; l.k];
        fiber[self.alpha] = z;
        Ok(Split { base: vec![S::zero(); l.n], fiber })
    }
}

impl<V: VectorField> VectorField for CompleteLift<V> {
    fn dim(&self) -> usize {
        self.layout().dim()
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        Ok(self.eval_split(x)?.flatten())
    }
}

impl<V: VectorField> VectorField for VerticalLift<V> {
    fn dim(&self) -> usize {
        self.layout().dim()
    }
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        Ok(self.eval_split(x)?.flatten())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::dir_deriv;
    use crate::exprlang::{parse, CExpr};
    use crate::geometry::field::{lie_bracket, max_norm, ExprField};
    use crate::scalar::HyperDual;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn field(src: &[&str]) -> ExprField {
        ExprField { coeffs: src.iter().map(|s| CExpr::compile(&parse(s).unwrap(), &["a", "b"], &HashMap::new()).unwrap()).collect() }
    }

    /// Field whose components are the bracket of two fields, for comparison with lifted brackets.
    struct Bracket<'a>(&'a ExprField, &'a ExprField);
    impl VectorField for Bracket<'_> {
        fn dim(&self) -> usize {
            2
        }
        fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
            lie_bracket(self.0, self.1, x)
        }
    }

    #[test]
    fn constant_field_lifts_to_itself() {
        let z = field(&["1", "0"]);
        let s = complete_lift(&z, 2).eval_split(&[0.3, 0.4, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.base, vec![1.0, 0.0]);
        assert!(s.fiber.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn complete_lift_fiber_part_by_hand() {
        // Z = a ∂/∂b at q = (2, 1), u = (3, 5): fiber part u^a ∂Z^b/∂a = 3 along ∂/∂u^b.
        let z = field(&["0", "a"]);
        let s = complete_lift(&z, 1).eval_split(&[2.0, 1.0, 3.0, 5.0]).unwrap();
        assert_eq!(s.base, vec![0.0, 2.0]);
        assert_eq!(s.fiber, vec![vec![0.0, 3.0]]);
    }

    const SAMPLES: &[&str] = &["a*b", "sin(a) + b^2", "exp(b/3)", "cos(a*b)", "1 + a", "a^2 - b"];

    fn arb_field() -> impl Strategy<Value = ExprField> {
        (0..SAMPLES.len(), 0..SAMPLES.len()).prop_map(|(i, j)| field(&[SAMPLES[i], SAMPLES[j]]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn lifted_bracket_identities(
            x in arb_field(), y in arb_field(),
            p in proptest::collection::vec(-1.0f64..1.0, 6),
        ) {
            let k = 2;
            let xyc = complete_lift(Bracket(&x, &y), k);
            let xc = complete_lift(&x, k);
            let yc = complete_lift(&y, k);
            let lhs = lie_bracket(&xc, &yc, &p).unwrap();
            let rhs = xyc.eval(&p).unwrap();
            let d: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            prop_assert!(max_norm(&d) < 1e-8);
            for alpha in 0..k {
                let yv = vertical_lift(&y, k, alpha);
                let lhs = lie_bracket(&xc, &yv, &p).unwrap();
                let rhs = vertical_lift(Bracket(&x, &y), k, alpha).eval(&p).unwrap();
                let d: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                prop_assert!(max_norm(&d) < 1e-8);
                for beta in 0..k {
                    let b = lie_bracket(&vertical_lift(&x, k, alpha), &vertical_lift(&y, k, beta), &p).unwrap();
                    prop_assert!(max_norm(&b) < 1e-12);
                }
            }
        }

        #[test]
        fn linear_fiber_function_identities(
            z in arb_field(), th in arb_field(),
            p in proptest::collection::vec(-1.0f64..1.0, 6),
        ) {
            let k = 2;
            let l = TkLayout::new(2, k);
            // θ⃗_α(q, u) = θ_A(q) u_α^A.
            let lin = |alpha: usize| {
                let th = th.clone();
                move |h: &[HyperDual<f64>]| -> Result<HyperDual<f64>> {
                    let c = th.eval(&h[..2])?;
                    Ok(c[0] * h[l.u(alpha, 0)] + c[1] * h[l.u(alpha, 1)])
                }
            };
            let q = &p[..2];
            let zq = z.eval(q).unwrap();
            let thq = th.eval(q).unwrap();
            let dth = derivative_along(&th, q, &zq).unwrap();
            let dz: Vec<Vec<f64>> = (0..2)
                .map(|a| derivative_along(&z, q, &[if a == 0 { 1.0 } else { 0.0 }, if a == 1 { 1.0 } else { 0.0 }]).unwrap())
                .collect();
            // (L_Z θ)_A = Z^B ∂_B θ_A + θ_B ∂_A Z^B.
            let lie: Vec<f64> = (0..2).map(|a| dth[a] + thq[0] * dz[a][0] + thq[1] * dz[a][1]).collect();
            for alpha in 0..k {
                let zc = complete_lift(&z, k).eval(&p).unwrap();
                let got = dir_deriv(lin(alpha), &p, &zc).unwrap();
                let u = &p[l.u_range(alpha)];
                let want = lie[0] * u[0] + lie[1] * u[1];
                prop_assert!((got - want).abs() < 1e-8);
                for beta in 0..k {
                    let zv = vertical_lift(&z, k, beta).eval(&p).unwrap();
                    let got = dir_deriv(lin(alpha), &p, &zv).unwrap();
                    let want = if alpha == beta { thq[0] * zq[0] + thq[1] * zq[1] } else { 0.0 };
                    prop_assert!((got - want).abs() < 1e-8);
                }
            }
        }
    }
}
