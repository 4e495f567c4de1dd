//! Hand-built problem data shared by unit tests.

use crate::exprlang::{parse, CExpr};
use crate::geometry::algebra::LieAlgebraData;
use crate::lagrangian::Lagrangian;
use crate::symmetry::PrincipalBundleData;
use std::collections::HashMap;

pub(crate) fn cexpr(s: &str, vars: &[&str]) -> CExpr {
    CExpr::compile(&parse(s).unwrap(), vars, &HashMap::new()).unwrap()
}

fn matrix(rows: &[&[&str]], vars: &[&str]) -> Vec<Vec<CExpr>> {
    rows.iter().map(|r| r.iter().map(|s| cexpr(s, vars)).collect()).collect()
}

pub(crate) const Q_VARS: [&str; 5] = ["q", "x", "y", "z", "th"];
pub(crate) const GAMMA: f64 = 0.5;

/// The five-dimensional harmonic-map metric with γ = 0.5, coordinates (q, x, y, z, θ).
pub(crate) fn harmonic_metric(k: usize) -> Lagrangian {
    let rows: [&[&str]; 5] = [
        &["1", "0", "0", "0", "0.25"],
        &["0", "1", "0", "0", "-y/2"],
        &["0", "0", "1", "0", "x/2"],
        &["0", "0", "0", "0", "0.5"],
        &["0.25", "-y/2", "x/2", "0.5", "0"],
    ];
    Lagrangian::metric(5, k, matrix(&rows, &Q_VARS)).unwrap()
}

/// Structure constants of the four-dimensional group with chart (x, y, z, θ).
pub(crate) fn group_algebra() -> LieAlgebraData {
    let mut c = vec![0.0; 64];
    let mut set = |c_: usize, a: usize, b: usize, v: f64| {
        c[(c_ * 4 + a) * 4 + b] = v;
        c[(c_ * 4 + b) * 4 + a] = -v;
    };
    set(2, 0, 1, -2.0);
    set(1, 0, 3, 1.0);
    set(0, 1, 3, -1.0);
    LieAlgebraData::from_f64(4, &c).unwrap()
}

/// Bundle data of the golden example with one base coordinate and horizontal
/// field `∂q − γ_q^b Ê_b`; `gamma_row` lists `γ_q^b`.
pub(crate) fn group_bundle(gamma_row: [&str; 4]) -> PrincipalBundleData {
    let k: [&[&str]; 4] = [&["1", "0", "-y", "0"], &["0", "1", "x", "0"], &["0", "0", "1", "0"], &["y", "-x", "0", "1"]];
    let a: [&[&str]; 4] = [
        &["cos(th)", "-sin(th)", "2*(y*cos(th) + x*sin(th))", "0"],
        &["sin(th)", "cos(th)", "2*(y*sin(th) - x*cos(th))", "0"],
        &["0", "0", "1", "0"],
        &["-y", "x", "-(x^2 + y^2)", "1"],
    ];
    let slots = ["x", "y", "z", "th", "xb", "yb", "zb", "thb"];
    let mult = [
        "x + xb*cos(th) + yb*sin(th)",
        "y - xb*sin(th) + yb*cos(th)",
        "z + zb + (x*xb + y*yb)*sin(th) + (y*xb - x*yb)*cos(th)",
        "th + thb",
    ];
    PrincipalBundleData::new(
        1,
        group_algebra(),
        matrix(&[&gamma_row], &Q_VARS),
        matrix(&k, &Q_VARS),
        matrix(&a, &Q_VARS),
        vec![0.0; 4],
        Some(mult.iter().map(|s| cexpr(s, &slots)).collect()),
    )
    .unwrap()
}

pub(crate) fn golden_bundle() -> PrincipalBundleData {
    group_bundle(["0", "0", "0.5", "0"])
}

/// Abelian bundle over (x1, x2) with fiber z and `X_1 = ∂1 − x2 ∂z`.
pub(crate) fn curved_abelian() -> PrincipalBundleData {
    let v = ["x1", "x2", "z"];
    PrincipalBundleData::new(
        2,
        LieAlgebraData::abelian(1),
        matrix(&[&["x2"], &["0"]], &v),
        matrix(&[&["1"]], &v),
        matrix(&[&["1"]], &v),
        vec![0.0],
        Some(vec![cexpr("z + zb", &["z", "zb"])]),
    )
    .unwrap()
}

/// The four-dimensional group acting on itself, no base coordinates.
pub(crate) fn group_only() -> PrincipalBundleData {
    let full = golden_bundle();
    let v = ["x", "y", "z", "th"];
    let k: [&[&str]; 4] = [&["1", "0", "-y", "0"], &["0", "1", "x", "0"], &["0", "0", "1", "0"], &["y", "-x", "0", "1"]];
    let a: [&[&str]; 4] = [
        &["cos(th)", "-sin(th)", "2*(y*cos(th) + x*sin(th))", "0"],
        &["sin(th)", "cos(th)", "2*(y*sin(th) - x*cos(th))", "0"],
        &["0", "0", "1", "0"],
        &["-y", "x", "-(x^2 + y^2)", "1"],
    ];
    PrincipalBundleData::new(0, group_algebra(), Vec::new(), matrix(&k, &v), matrix(&a, &v), vec![0.0; 4], full.mult).unwrap()
}

pub(crate) const GOLDEN_W1: [f64; 4] = [0.3, -0.2, 0.1, 1.0];
pub(crate) const GOLDEN_W2: [f64; 4] = [0.0, 0.0, 0.4, 0.0];

/// Reduced golden state `(q, v_1, w_1, v_2, w_2)` with `c^q = (1, 0)`, `b^q = 0`.
pub(crate) fn golden_reduced_init() -> Vec<f64> {
    let mut y = vec![0.0, 1.0];
    y.extend_from_slice(&GOLDEN_W1);
    y.push(0.0);
    y.extend_from_slice(&GOLDEN_W2);
    y
}

/// Closed-form golden field `(q, x, y, z, θ)` at t for the constants above, all b = 0.
pub(crate) fn golden_phi(t: &[f64]) -> [f64; 5] {
    let [cx, cy, cz, _] = GOLDEN_W1;
    let (s, c) = t[0].sin_cos();
    let r2 = cx * cx + cy * cy;
    let gz = r2 * (t[0] - s) + cz * t[0] + GOLDEN_W2[2] * t[1];
    [t[0], cx * s - cy * c + cy, cx * c + cy * s - cx, gz - GAMMA * t[0], t[0]]
}

pub(crate) fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}
