//! Integrability obstructions for k-vector fields and their reductions.
//!
//! All checks are sampled: a verdict holds at the states it was evaluated on.

use crate::error::{Error, Result};
use crate::geometry::field::{lie_bracket, max_norm, Component, KVectorField};
use crate::lagrangian::{force_index, ForceFn};
use crate::solver::march::integrate_path;
use crate::symmetry::{PrincipalBundleData, ReducedLayout};

/// Outcome of comparing a residual against the pass and fail bands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Pass, Pass) => Pass,
            _ => Inconclusive,
        }
    }
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub pass: f64,
    pub fail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { pass: 1e-8, fail: 1e-3 }
    }
}

impl Tolerances {
    pub fn classify(&self, residual: f64) -> Verdict {
        if !residual.is_finite() || residual > self.fail {
            Verdict::Fail
        } else if residual < self.pass {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Sampled `‖[X_α, X_β]‖` per pair α < β.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BracketResidual {
    /// `(α, β, max over samples)`.
    pub pairs: Vec<(usize, usize, f64)>,
    /// `max(1, ‖X_α‖)` over samples; the pass band is relative to it.
    pub scale: f64,
}

impl BracketResidual {
    pub fn max(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).fold(0.0, f64::max)
    }
    /// Bracket norm divided by the field scale.
    pub fn relative(&self) -> f64 {
        self.max() / self.scale.max(1.0)
    }
}

pub fn bracket_residual<F: KVectorField + ?Sized>(field: &F, points: &[Vec<f64>]) -> Result<BracketResidual> {
    let k = field.k();
    let mut out = BracketResidual { pairs: Vec::new(), scale: 1.0 };
    for a in 0..k {
        for b in a + 1..k {
            out.pairs.push((a, b, 0.0));
        }
    }
    for x in points {
        for a in 0..k {
            out.scale = out.scale.max(max_norm(&field.component(a, x)?));
        }
        for p in out.pairs.iter_mut() {
            let br = lie_bracket(&Component { field, alpha: p.0 }, &Component { field, alpha: p.1 }, x)?;
            p.2 = p.2.max(max_norm(&br));
        }
    }
    Ok(out)
}

/// Largest `|F_{αβ}^A − F_{βα}^A|` of a SOPDE force array over the samples.
pub fn sopde_force_symmetry<F: ForceFn + ?Sized>(forces: &F, points: &[Vec<f64>]) -> Result<f64> {
    let l = forces.layout();
    let mut worst: f64 = 0.0;
    for x in points {
        let f = forces.forces(x)?;
        for a in 0..l.k {
            for b in a + 1..l.k {
                for i in 0..l.n {
                    worst = worst.max((f[force_index(l, a, b, i)] - f[force_index(l, b, a, i)]).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Reduced integrability residual at one state, stored at `(α·k + β)·n_fiber + b`:
///
/// `Γ̌_α(w_β^b) − Γ̌_β(w_α^b) + (v_α^i w_β^a − v_β^i w_α^a) Υ_{ia}^b
///  + C^b_{ac} w_α^a w_β^c − K^b_{ij} v_α^i v_β^j`.
pub fn reduced_obstruction<F: KVectorField + ?Sized>(
    field: &F,
    data: &PrincipalBundleData,
    layout: ReducedLayout,
    y: &[f64],
) -> Result<Vec<f64>> {
    let (nb, nf, k) = (layout.nb, layout.nf, layout.k);
    if field.dim() != layout.dim() || y.len() != layout.dim() {
        return Err(Error::Invalid(format!("reduced state has {} entries, layout expects {}", y.len(), layout.dim())));
    }
    let q = data.representative(&y[..nb]);
    let ups = data.upsilon(&q)?;
    let curv = data.curvature(&q)?;
    let comps: Vec<Vec<f64>> = (0..k).map(|a| field.component(a, y)).collect::<Result<_>>()?;
    let v = |a: usize, i: usize| y[layout.v(a, i)];
    let w = |a: usize, c: usize| y[layout.w(a, c)];
    let mut out = vec![0.0; k * k * nf];
    for al in 0..k {
        for be in 0..k {
            for b in 0..nf {
                let mut r = comps[al][layout.w(be, b)] - comps[be][layout.w(al, b)];
                for i in 0..nb {
                    for a in 0..nf {
                        r += (v(al, i) * w(be, a) - v(be, i) * w(al, a)) * ups[(i * nf + a) * nf + b];
                    }
                    for j in 0..nb {
                        r -= curv[(b * nb + i) * nb + j] * v(al, i) * v(be, j);
                    }
                }
                for a in 0..nf {
                    for c in 0..nf {
                        r += data.algebra.c(b, a, c) * w(al, a) * w(be, c);
                    }
                }
                out[(al * k + be) * nf + b] = r;
            }
        }
    }
    Ok(out)
}

/// Largest entry of [`reduced_obstruction`] over several reduced states.
pub fn reduced_obstruction_max<F: KVectorField + ?Sized>(
    field: &F,
    data: &PrincipalBundleData,
    layout: ReducedLayout,
    states: &[Vec<f64>],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for y in states {
        worst = worst.max(max_norm(&reduced_obstruction(field, data, layout, y)?));
    }
    Ok(worst)
}

/// Integrates from `start` at t = 0 to `target` along each pair of axes in
/// both orders with RK4 (steps at most `h_max`) and returns the largest
/// end-state difference. Axes outside the pair are left at zero.
pub fn flow_commutation_defect<F: KVectorField + ?Sized>(field: &F, start: &[f64], target: &[f64], h_max: f64) -> Result<f64> {
    let k = field.k();
    if target.len() != k {
        return Err(Error::Invalid(format!("target has {} entries for k = {k}", target.len())));
    }
    let zero = vec![0.0; k];
    let h = vec![h_max; k];
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let mut to = zero.clone();
            to[a] = target[a];
            to[b] = target[b];
            let x1 = integrate_path(field, start, &zero, &to, &[a, b], &h)?;
            let x2 = integrate_path(field, start, &zero, &to, &[b, a], &h)?;
            for (p, q) in x1.iter().zip(&x2) {
                worst = worst.max((p - q).abs());
            }
        }
    }
    Ok(worst)
}

/// Sampled integrability residuals with their verdicts.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityReport {
    pub bracket: BracketResidual,
    pub reduced_obstruction: Option<f64>,
    pub flow_defect: Option<f64>,
    pub tol: Tolerances,
}

impl IntegrabilityReport {
    pub fn bracket_verdict(&self) -> Verdict {
        self.tol.classify(self.bracket.relative())
    }
    pub fn obstruction_verdict(&self) -> Option<Verdict> {
        self.reduced_obstruction.map(|r| self.tol.classify(r))
    }
    pub fn flow_verdict(&self) -> Option<Verdict> {
        self.flow_defect.map(|r| self.tol.classify(r))
    }
    pub fn verdict(&self) -> Verdict {
        [self.obstruction_verdict(), self.flow_verdict()].into_iter().flatten().fold(self.bracket_verdict(), Verdict::combine)
    }
}
