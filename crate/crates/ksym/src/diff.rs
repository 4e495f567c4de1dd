//! Forward-mode derivative drivers built on [`HyperDual`].
//!
//! Functions are passed as closures over `&[HyperDual<S>]`; since `S` is
//! itself any [`Scalar`], every driver can be called from inside another
//! derivative computation.

use crate::scalar::{seed, seed_units, HyperDual, Scalar};

/// Value and directional derivative of a vector function along `dir`.
pub fn jvp<S, E, F>(f: F, x: &[S], dir: &[S]) -> Result<(Vec<S>, Vec<S>), E>
where
    S: Scalar,
    F: FnOnce(&[HyperDual<S>]) -> Result<Vec<HyperDual<S>>, E>,
{
    let xs = seed(x, Some(dir), None);
    let out = f(&xs)?;
    Ok((out.iter().map(|h| h.v).collect(), out.iter().map(|h| h.d1).collect()))
}

/// Directional derivative of a scalar function along `dir`.
pub fn dir_deriv<S, E, F>(f: F, x: &[S], dir: &[S]) -> Result<S, E>
where
    S: Scalar,
    F: FnOnce(&[HyperDual<S>]) -> Result<HyperDual<S>, E>,
{
    let xs = seed(x, Some(dir), None);
    Ok(f(&xs)?.d1)
}

/// Mixed second directional derivative `D_a D_b f`.
pub fn dir_deriv2<S, E, F>(f: F, x: &[S], a: &[S], b: &[S]) -> Result<S, E>
where
    S: Scalar,
    F: FnOnce(&[HyperDual<S>]) -> Result<HyperDual<S>, E>,
{
    let xs = seed(x, Some(a), Some(b));
    Ok(f(&xs)?.d12)
}

/// Gradient with respect to the listed coordinates `idx`.
pub fn gradient<S, E, F>(f: F, x: &[S], idx: &[usize]) -> Result<Vec<S>, E>
where
    S: Scalar,
    F: Fn(&[HyperDual<S>]) -> Result<HyperDual<S>, E>,
{
    idx.iter().map(|&i| Ok(f(&seed_units(x, Some(i), None))?.d1)).collect()
}

/// Hessian block `∂²f/∂x_r ∂x_c` for `r ∈ rows`, `c ∈ cols`, row-major.
pub fn hessian_block<S, E, F>(f: F, x: &[S], rows: &[usize], cols: &[usize]) -> Result<Vec<S>, E>
where
    S: Scalar,
    F: Fn(&[HyperDual<S>]) -> Result<HyperDual<S>, E>,
{
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for &r in rows {
        for &c in cols {
            out.push(f(&seed_units(x, Some(r), Some(c)))?.d12);
        }
    }
    Ok(out)
}

/// Symmetric Hessian over `idx`, evaluating each unordered pair once.
pub fn hessian_sym<S, E, F>(f: F, x: &[S], idx: &[usize]) -> Result<Vec<S>, E>
where
    S: Scalar,
    F: Fn(&[HyperDual<S>]) -> Result<HyperDual<S>, E>,
{
    let m = idx.len();
    let mut out = vec![S::zero(); m * m];
    for a in 0..m {
        for b in a..m {
            let v = f(&seed_units(x, Some(idx[a]), Some(idx[b])))?.d12;
            out[a * m + b] = v;
            out[b * m + a] = v;
        }
    }
    Ok(out)
}
