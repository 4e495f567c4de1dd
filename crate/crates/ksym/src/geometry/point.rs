use crate::error::{Error, Result};

/// Index map for flat states on T¹ₖQ: the n base coordinates, then k velocity blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TkLayout {
    pub n: usize,
    pub k: usize,
}

impl TkLayout {
    pub fn new(n: usize, k: usize) -> Self {
        TkLayout { n, k }
    }
    pub fn dim(&self) -> usize {
        self.n * (self.k + 1)
    }
    pub fn u(&self, alpha: usize, a: usize) -> usize {
        self.n * (alpha + 1) + a
    }
    pub fn q_range(&self) -> std::ops::Range<usize> {
        0..self.n
    }
    pub fn u_range(&self, alpha: usize) -> std::ops::Range<usize> {
        self.n * (alpha + 1)..self.n * (alpha + 2)
    }
    /// Indices of every velocity component, α-major.
    pub fn u_indices(&self) -> Vec<usize> {
        (self.n..self.dim()).collect()
    }
}

/// A base point together with k velocity vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct KTangentPoint {
    pub q: Vec<f64>,
    /// Row α holds u_α^A.
    pub u: Vec<Vec<f64>>,
}

impl KTangentPoint {
    pub fn new(q: Vec<f64>, u: Vec<Vec<f64>>) -> Result<Self> {
        if q.is_empty() || u.is_empty() {
            return Err(Error::Invalid("a k-tangent point needs n >= 1 and k >= 1".into()));
        }
        if u.iter().any(|row| row.len() != q.len()) {
            return Err(Error::Invalid(format!("velocity rows must have length {}", q.len())));
        }
        if q.iter().chain(u.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate in k-tangent point".into()));
        }
        Ok(KTangentPoint { q, u })
    }

    pub fn from_flat(layout: TkLayout, x: &[f64]) -> Result<Self> {
        if x.len() != layout.dim() {
            return Err(Error::Invalid(format!("flat state has length {}, expected {}", x.len(), layout.dim())));
        }
        Self::new(x[..layout.n].to_vec(), (0..layout.k).map(|a| x[layout.u_range(a)].to_vec()).collect())
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn k(&self) -> usize {
        self.u.len()
    }

    pub fn layout(&self) -> TkLayout {
        TkLayout::new(self.n(), self.k())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.q.iter().chain(self.u.iter().flatten()).copied().collect()
    }
}
