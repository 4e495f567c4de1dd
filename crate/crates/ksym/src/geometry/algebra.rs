use crate::error::{Error, Result};
use num::{BigRational, ToPrimitive, Zero};

/// Structure constants `C^c_{ab}` of a Lie algebra basis, `[E_a, E_b] = C^c_{ab} E_c`.
///
/// Constants are held as exact rationals; antisymmetry and the Jacobi
/// identity are checked exactly at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraData {
    pub dim: usize,
    exact: Vec<BigRational>,
    c: Vec<f64>,
}

impl LieAlgebraData {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebraData { dim, exact: vec![BigRational::zero(); dim * dim * dim], c: vec![0.0; dim * dim * dim] }
    }

    /// From exact constants stored at `(c·dim + a)·dim + b`.
    pub fn from_exact(dim: usize, exact: Vec<BigRational>) -> Result<Self> {
        if exact.len() != dim * dim * dim {
            return Err(Error::Invalid(format!("expected {} structure constants, got {}", dim * dim * dim, exact.len())));
        }
        let c = exact.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        let data = LieAlgebraData { dim, exact, c };
        if let Some((c, a, b)) = data.antisymmetry_violation() {
            return Err(Error::Invalid(format!(
                "structure constants are not antisymmetric: C^{c}_{{{a}{b}}} = {} but C^{c}_{{{b}{a}}} = {}",
                data.exact(c, a, b),
                data.exact(c, b, a)
            )));
        }
        if let Some((e, a, b, c)) = data.jacobi_violation() {
            return Err(Error::Invalid(format!("Jacobi identity fails for component {e} of (E_{a}, E_{b}, E_{c})")));
        }
        Ok(data)
    }

    /// From floating-point constants, each converted exactly to a rational.
    pub fn from_f64(dim: usize, values: &[f64]) -> Result<Self> {
        let exact = values
            .iter()
            .map(|&v| BigRational::from_float(v).ok_or_else(|| Error::Invalid(format!("non-finite structure constant {v}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_exact(dim, exact)
    }

    pub fn index(&self, c: usize, a: usize, b: usize) -> usize {
        (c * self.dim + a) * self.dim + b
    }

    /// `C^c_{ab}`.
    pub fn c(&self, c: usize, a: usize, b: usize) -> f64 {
        self.c[self.index(c, a, b)]
    }

    pub fn exact(&self, c: usize, a: usize, b: usize) -> &BigRational {
        &self.exact[self.index(c, a, b)]
    }

    pub fn is_abelian(&self) -> bool {
        self.exact.iter().all(Zero::is_zero)
    }

    pub fn antisymmetry_violation(&self) -> Option<(usize, usize, usize)> {
        let d = self.dim;
        for c in 0..d {
            for a in 0..d {
                for b in a..d {
                    if *self.exact(c, a, b) != -self.exact(c, b, a).clone() {
                        return Some((c, a, b));
                    }
                }
            }
        }
        None
    }

    /// First `(e, a, b, c)` with `Σ_d C^d_{ab}C^e_{dc} + C^d_{bc}C^e_{da} + C^d_{ca}C^e_{db} ≠ 0`.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let n = self.dim;
        for e in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut s = BigRational::zero();
                        for d in 0..n {
                            s += self.exact(d, a, b) * self.exact(e, d, c);
                            s += self.exact(d, b, c) * self.exact(e, d, a);
                            s += self.exact(d, c, a) * self.exact(e, d, b);
                        }
                        if !s.is_zero() {
                            return Some((e, a, b, c));
                        }
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_dim() -> Vec<f64> {
        // Basis order (x, y, z, θ).
        let mut c = vec![0.0; 64];
        let mut set = |cc: usize, a: usize, b: usize, v: f64| {
            c[(cc * 4 + a) * 4 + b] = v;
            c[(cc * 4 + b) * 4 + a] = -v;
        };
        set(2, 0, 1, -2.0);
        set(1, 0, 3, 1.0);
        set(0, 1, 3, -1.0);
        c
    }

    #[test]
    fn four_dimensional_algebra_is_valid() {
        let g = LieAlgebraData::from_f64(4, &four_dim()).unwrap();
        assert_eq!(g.c(2, 0, 1), -2.0);
        assert_eq!(g.c(1, 3, 0), -1.0);
        assert!(!g.is_abelian());
    }

    #[test]
    fn broken_antisymmetry_rejected() {
        let mut c = four_dim();
        c[(2 * 4 + 1) * 4] = -2.0;
        assert!(LieAlgebraData::from_f64(4, &c).is_err());
    }

    #[test]
    fn jacobi_violation_rejected() {
        // [e0,e1] = e1, [e1,e2] = e0 fails Jacobi.
        let mut c = vec![0.0; 27];
        let mut set = |cc: usize, a: usize, b: usize, v: f64| {
            c[(cc * 3 + a) * 3 + b] = v;
            c[(cc * 3 + b) * 3 + a] = -v;
        };
        set(1, 0, 1, 1.0);
        set(0, 1, 2, 1.0);
        assert!(LieAlgebraData::from_f64(3, &c).is_err());
    }

    #[test]
    fn so3_passes() {
        let mut c = vec![0.0; 27];
        for (a, b, cc) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[(cc * 3 + a) * 3 + b] = 1.0;
            c[(cc * 3 + b) * 3 + a] = -1.0;
        }
        assert!(LieAlgebraData::from_f64(3, &c).is_ok());
    }
}
