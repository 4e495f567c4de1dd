//! Small dense linear algebra over any [`Scalar`].
//!
//! Pivoting decisions use real parts only, so factorizations stay
//! differentiable when entries carry hyper-dual parts.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("singular matrix (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    Singular { pivot: f64, threshold: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Mat::from_vec(r, c, rows.iter().flat_map(|row| row.iter().copied()).collect())
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, o: &Mat<S>) -> Self {
        assert_eq!(self.cols, o.rows, "matmul dimensions");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..o.cols {
                    out.data[i * o.cols + j] += a * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(self.cols, x.len(), "matvec dimensions");
        (0..self.rows)
            .map(|i| {
                let mut s = S::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    s += *a * *b;
                }
                s
            })
            .collect()
    }

    /// Row vector times matrix: `(xᵀ M)_j = Σ_i x_i M_ij`.
    pub fn vecmat(&self, x: &[S]) -> Vec<S> {
        assert_eq!(self.rows, x.len(), "vecmat dimensions");
        let mut out = vec![S::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += *xi * self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.re().abs()).fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| f(*v)).collect() }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Partial-pivot LU factorization `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    lu: Mat<S>,
    perm: Vec<usize>,
    sign: f64,
}

/// Relative pivot threshold used by [`lu_solve`].
pub const PIVOT_TOL: f64 = 1e-14;

impl<S: Scalar> Lu<S> {
    /// Factorizes; a pivot below `rel_tol · max|A|` is reported as singular.
    pub fn new(a: &Mat<S>, rel_tol: f64) -> Result<Self, LinalgError> {
        if a.rows != a.cols {
            return Err(LinalgError::Dimension(format!("LU of {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let threshold = rel_tol * a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pv) = (k..n).map(|i| (i, lu[(i, k)].re().abs())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if !(pv > threshold) {
                return Err(LinalgError::Singular { pivot: pv.max(0.0), threshold });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.lu.rows;
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    /// Solves `xᵀ A = bᵀ`.
    pub fn solve_transposed(&self, b: &[S]) -> Vec<S> {
        let n = self.lu.rows;
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ y = b, Lᵀ z = y, x = Pᵀ z.
        let mut y = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let u = self.lu[(j, i)];
                let yj = y[j];
                y[i] -= u * yj;
            }
            y[i] = y[i] / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let l = self.lu[(j, i)];
                let yj = y[j];
                y[i] -= l * yj;
            }
        }
        let mut x = vec![S::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    pub fn det(&self) -> S {
        let mut d = S::cst(self.sign);
        for i in 0..self.lu.rows {
            d *= self.lu[(i, i)];
        }
        d
    }

    pub fn inverse(&self) -> Mat<S> {
        let n = self.lu.rows;
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = S::zero());
            e[j] = S::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    /// Smallest pivot magnitude.
    pub fn min_pivot(&self) -> f64 {
        (0..self.lu.rows).map(|i| self.lu[(i, i)].re().abs()).fold(f64::INFINITY, f64::min)
    }
}

pub fn lu_solve<S: Scalar>(a: &Mat<S>, b: &[S]) -> Result<Vec<S>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::Dimension(format!("rhs length {} for {} rows", b.len(), a.rows)));
    }
    Ok(Lu::new(a, PIVOT_TOL)?.solve(b))
}

pub fn inverse<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>, LinalgError> {
    Ok(Lu::new(a, PIVOT_TOL)?.inverse())
}

/// Determinant; zero (not an error) for exactly singular input.
pub fn det<S: Scalar>(a: &Mat<S>) -> S {
    match Lu::new(a, 0.0) {
        Ok(lu) => lu.det(),
        Err(_) => S::zero(),
    }
}

/// Hadamard bound on |det|: the product of the Euclidean row norms.
pub fn hadamard_bound<S: Scalar>(a: &Mat<S>) -> f64 {
    (0..a.rows).map(|i| a.row(i).iter().map(|v| v.re() * v.re()).sum::<f64>().sqrt()).product()
}

/// Minimum-norm least-squares solution through the normal equations.
///
/// Wide systems use `x = Aᵀ(AAᵀ)⁻¹b`, tall ones `x = (AᵀA)⁻¹Aᵀb`. When the
/// Gram matrix is singular a Tikhonov shift of `1e-12·scale` is added.
pub fn pinv_solve<S: Scalar>(a: &Mat<S>, b: &[S]) -> Result<Vec<S>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::Dimension(format!("rhs length {} for {} rows", b.len(), a.rows)));
    }
    let at = a.transpose();
    let wide = a.rows <= a.cols;
    let mut gram = if wide { a.matmul(&at) } else { at.matmul(a) };
    let lu = match Lu::new(&gram, PIVOT_TOL) {
        Ok(lu) => lu,
        Err(_) => {
            let shift = 1e-12 * gram.max_abs().max(1.0);
            for i in 0..gram.rows {
                gram[(i, i)] += S::cst(shift);
            }
            Lu::new(&gram, 0.0)?
        }
    };
    Ok(if wide { at.matvec(&lu.solve(b)) } else { lu.solve(&at.matvec(b)) })
}
