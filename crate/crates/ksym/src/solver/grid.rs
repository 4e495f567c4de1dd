use crate::error::{Error, Result};

/// One grid axis: `count` uniform nodes over `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Deserialize, serde::Serialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn nodes(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.max } else { self.min + h * i as f64 }).collect()
    }
}

/// Sampled map from a rectangular grid in ℝᵏ into a state space.
///
/// Nodes are ordered with the first axis varying fastest; `values` holds
/// `dim` numbers per node.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    pub axes: Vec<Vec<f64>>,
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn new(axes: Vec<Vec<f64>>, names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let g = FieldGrid { axes, names, values };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (a, ax) in self.axes.iter().enumerate() {
            if ax.is_empty() {
                return Err(Error::Invalid(format!("axis {} is empty", a + 1)));
            }
            if ax.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Invalid(format!("axis {} is not strictly increasing", a + 1)));
            }
            if ax.len() > 2 {
                let h = (ax[ax.len() - 1] - ax[0]) / (ax.len() - 1) as f64;
                if ax.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1e-300) + 1e-12) {
                    return Err(Error::Invalid(format!("axis {} is not uniformly spaced", a + 1)));
                }
            }
        }
        if self.values.len() != self.node_count() * self.dim() {
            return Err(Error::Invalid(format!(
                "grid holds {} values, expected {} nodes x {} fields",
                self.values.len(),
                self.node_count(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.axes.len()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        node_index(&self.shape(), idx)
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        multi_index(&self.shape(), node)
    }

    pub fn t(&self, node: usize) -> Vec<f64> {
        self.multi_index(node).iter().zip(&self.axes).map(|(&i, ax)| ax[i]).collect()
    }

    pub fn value(&self, node: usize) -> &[f64] {
        let d = self.dim();
        &self.values[node * d..(node + 1) * d]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let ax = &self.axes[axis];
        if ax.len() < 2 {
            return 0.0;
        }
        (ax[ax.len() - 1] - ax[0]) / (ax.len() - 1) as f64
    }

    /// Column of field `name` across all nodes.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.names.iter().position(|n| n == name)?;
        Some((0..self.node_count()).map(|n| self.value(n)[c]).collect())
    }

    /// Derivative of every field along `axis` by finite differences of the given order (2 or 4).
    pub fn differentiate(&self, axis: usize, order: usize) -> Result<Vec<f64>> {
        differentiate(&self.axes, &self.values, self.dim(), axis, order)
    }
}

pub fn node_index(shape: &[usize], idx: &[usize]) -> usize {
    let mut n = 0;
    for a in (0..shape.len()).rev() {
        n = n * shape[a] + idx[a];
    }
    n
}

pub fn multi_index(shape: &[usize], mut node: usize) -> Vec<usize> {
    shape
        .iter()
        .map(|&s| {
            let i = node % s;
            node /= s;
            i
        })
        .collect()
}

/// Finite-difference derivative along `axis` of node data with `d` entries per node.
///
/// Order 2 uses central differences with one-sided second-order stencils at
/// the ends (needs 3 nodes); order 4 uses five-point stencils (needs 5 nodes).
pub fn differentiate(axes: &[Vec<f64>], data: &[f64], d: usize, axis: usize, order: usize) -> Result<Vec<f64>> {
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let n = shape[axis];
    let need = match order {
        2 => 3,
        4 => 5,
        _ => return Err(Error::Invalid(format!("unsupported difference order {order}"))),
    };
    if n < need {
        return Err(Error::GridTooSmall(format!("axis {} has {} nodes, order {} needs {}", axis + 1, n, order, need)));
    }
    let h = (axes[axis][n - 1] - axes[axis][0]) / (n - 1) as f64;
    let total: usize = shape.iter().product();
    let stride: usize = shape[..axis].iter().product();
    let mut out = vec![0.0; data.len()];
    for node in 0..total {
        let i = (node / stride) % n;
        let base = node - i * stride;
        let f = |j: usize, c: usize| data[(base + j * stride) * d + c];
        for c in 0..d {
            out[node * d + c] = match order {
                2 => {
                    if i == 0 {
                        (-3.0 * f(0, c) + 4.0 * f(1, c) - f(2, c)) / (2.0 * h)
                    } else if i == n - 1 {
                        (3.0 * f(n - 1, c) - 4.0 * f(n - 2, c) + f(n - 3, c)) / (2.0 * h)
                    } else {
                        (f(i + 1, c) - f(i - 1, c)) / (2.0 * h)
                    }
                }
                _ => {
                    if i == 0 {
                        (-25.0 * f(0, c) + 48.0 * f(1, c) - 36.0 * f(2, c) + 16.0 * f(3, c) - 3.0 * f(4, c)) / (12.0 * h)
                    } else if i == 1 {
                        (-3.0 * f(0, c) - 10.0 * f(1, c) + 18.0 * f(2, c) - 6.0 * f(3, c) + f(4, c)) / (12.0 * h)
                    } else if i == n - 1 {
                        (25.0 * f(n - 1, c) - 48.0 * f(n - 2, c) + 36.0 * f(n - 3, c) - 16.0 * f(n - 4, c) + 3.0 * f(n - 5, c)) / (12.0 * h)
                    } else if i == n - 2 {
                        (3.0 * f(n - 1, c) + 10.0 * f(n - 2, c) - 18.0 * f(n - 3, c) + 6.0 * f(n - 4, c) - f(n - 5, c)) / (12.0 * h)
                    } else {
                        (f(i - 2, c) - 8.0 * f(i - 1, c) + 8.0 * f(i + 1, c) - f(i + 2, c)) / (12.0 * h)
                    }
                }
            };
        }
    }
    Ok(out)
}
