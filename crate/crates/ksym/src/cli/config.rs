//! Problem files: TOML with expressions as strings.

use crate::exprlang::{parse, CExpr};
use crate::geometry::algebra::LieAlgebraData;
use crate::integrability::Tolerances;
use crate::lagrange_poincare::LpLayout;
use crate::lagrangian::Lagrangian;
use crate::solver::grid::AxisSpec;
use crate::solver::march::{MarchOptions, SweepOrder};
use crate::symmetry::PrincipalBundleData;
use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

/// A rejected config, with the offending field path.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

fn err<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { path: path.into(), message: message.into() })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn to_rational(&self, path: &str) -> Result<BigRational, ConfigError> {
        match self {
            Number::Int(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
            Number::Float(f) => BigRational::from_float(*f).map_or_else(|| err(path, "non-finite value"), Ok),
            Number::Text(s) => {
                let (num, den) = s.split_once('/').unwrap_or((s.as_str(), "1"));
                match (num.trim().parse::<BigInt>(), den.trim().parse::<BigInt>()) {
                    (Ok(n), Ok(d)) if d != BigInt::from(0) => Ok(BigRational::new(n, d)),
                    _ => err(path, format!("`{s}` is not an integer or a fraction p/q")),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstant {
    c: String,
    a: String,
    b: String,
    value: Number,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    base: Vec<String>,
    #[serde(default)]
    fiber: Vec<String>,
    #[serde(default)]
    structure: Vec<RawConstant>,
    #[serde(default)]
    gamma: Option<Vec<Vec<String>>>,
    #[serde(default)]
    kmat: Option<Vec<Vec<String>>>,
    #[serde(default)]
    amat: Option<Vec<Vec<String>>>,
    #[serde(default)]
    identity: Option<Vec<f64>>,
    #[serde(default)]
    mult: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLagrangian {
    metric: Option<Vec<Vec<String>>>,
    expression: Option<String>,
}

/// Which reduced k-vector field the pipeline integrates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducedKind {
    /// Reduction of the Lagrangian SOPDE.
    #[default]
    Sopde,
    /// Harmonic-map form of the reduced equations (metric Lagrangians).
    Harmonic,
    /// Euler-Poincaré field (no base coordinates).
    EulerPoincare,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReduced {
    #[serde(default)]
    field: ReducedKind,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    axes: Vec<AxisSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(default)]
    base: Vec<f64>,
    v: Vec<Vec<f64>>,
    #[serde(default)]
    w: Option<Vec<Vec<f64>>>,
    fiber: Option<Vec<f64>>,
    group: Option<Vec<f64>>,
}

fn d_pass() -> f64 {
    1e-8
}
fn d_fail() -> f64 {
    1e-3
}
fn d_sweep() -> f64 {
    1e-6
}
fn d_cert() -> f64 {
    1e-6
}
fn d_count() -> usize {
    100
}
fn d_radius() -> f64 {
    1.0
}
fn d_substeps() -> usize {
    8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    #[serde(default = "d_pass")]
    pass: f64,
    #[serde(default = "d_fail")]
    fail: f64,
    #[serde(default = "d_sweep")]
    sweep: f64,
    #[serde(default = "d_cert")]
    certificate: f64,
}

impl Default for RawTolerances {
    fn default() -> Self {
        RawTolerances { pass: d_pass(), fail: d_fail(), sweep: d_sweep(), certificate: d_cert() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    #[serde(default = "d_count")]
    count: usize,
    #[serde(default = "d_radius")]
    radius: f64,
    #[serde(default)]
    seed: u64,
}

impl Default for RawSampling {
    fn default() -> Self {
        RawSampling { count: d_count(), radius: d_radius(), seed: 0 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarch {
    #[serde(default = "d_substeps")]
    substeps: usize,
    #[serde(default)]
    sweep_order: Option<String>,
}

impl Default for RawMarch {
    fn default() -> Self {
        RawMarch { substeps: d_substeps(), sweep_order: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    k: usize,
    #[serde(default)]
    constants: BTreeMap<String, f64>,
    bundle: RawBundle,
    lagrangian: RawLagrangian,
    #[serde(default)]
    reduced: RawReduced,
    grid: Option<RawGrid>,
    initial: Option<RawInitial>,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    sampling: RawSampling,
    #[serde(default)]
    march: RawMarch,
}

/// Initial data at t = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    /// Flat reduced state `(x, v_1, w_1, ..)`.
    pub reduced: Vec<f64>,
    /// `φ_H(0)` in the fiber chart.
    pub fiber: Vec<f64>,
    /// `g(0)`.
    pub group: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Sampling {
    pub count: usize,
    pub radius: f64,
    pub seed: u64,
}

impl Sampling {
    /// `count` points of ℝᵈ uniform in the box `[-radius, radius]ᵈ`.
    pub fn points(&self, dim: usize, stream: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        (0..self.count).map(|_| (0..dim).map(|_| rng.gen_range(-self.radius..=self.radius)).collect()).collect()
    }
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub k: usize,
    pub base_names: Vec<String>,
    pub fiber_names: Vec<String>,
    pub data: PrincipalBundleData,
    pub lagrangian: Lagrangian,
    pub reduced_kind: ReducedKind,
    pub axes: Option<Vec<AxisSpec>>,
    pub initial: Option<InitialData>,
    pub constants: BTreeMap<String, f64>,
    pub tol: Tolerances,
    pub sweep_tol: f64,
    pub certificate_tol: f64,
    pub sampling: Sampling,
    pub march: MarchOptions,
}

impl ProblemConfig {
    pub fn n(&self) -> usize {
        self.base_names.len() + self.fiber_names.len()
    }
    pub fn layout(&self) -> LpLayout {
        LpLayout::new(self.base_names.len(), self.fiber_names.len(), self.k)
    }
    pub fn q_names(&self) -> Vec<String> {
        self.base_names.iter().chain(&self.fiber_names).cloned().collect()
    }
    pub fn axes(&self) -> Result<Vec<Vec<f64>>, ConfigError> {
        match &self.axes {
            Some(a) => Ok(a.iter().map(AxisSpec::nodes).collect()),
            None => err("grid", "no grid given (set [grid] or pass --grid)"),
        }
    }
    pub fn initial(&self) -> Result<&InitialData, ConfigError> {
        self.initial.as_ref().map_or_else(|| err("initial", "no initial data given"), Ok)
    }
    pub fn require_mult(&self) -> Result<(), ConfigError> {
        if self.data.n_fiber > 0 && self.data.mult.is_none() {
            return err("bundle.mult", "reconstruction needs the multiplication map");
        }
        Ok(())
    }
}

struct Compiler<'a> {
    params: HashMap<String, f64>,
    slots: Vec<&'a str>,
}

impl Compiler<'_> {
    fn one(&self, src: &str, path: &str) -> Result<CExpr, ConfigError> {
        let e = parse(src).or_else(|e| err(path, format!("cannot parse `{src}`: {e}")))?;
        CExpr::compile(&e, &self.slots, &self.params).or_else(|e| err(path, format!("`{src}`: {e}")))
    }
    fn matrix(&self, rows: &[Vec<String>], r: usize, c: usize, path: &str) -> Result<Vec<Vec<CExpr>>, ConfigError> {
        if rows.len() != r {
            return err(path, format!("expected {r} rows, found {}", rows.len()));
        }
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() != c {
                    return err(format!("{path}[{i}]"), format!("expected {c} entries, found {}", row.len()));
                }
                row.iter().enumerate().map(|(j, s)| self.one(s, &format!("{path}[{i}][{j}]"))).collect()
            })
            .collect()
    }
}

fn unique(names: &[String], path: &str) -> Result<(), ConfigError> {
    for (i, a) in names.iter().enumerate() {
        if names[..i].contains(a) {
            return err(path, format!("duplicate coordinate name `{a}`"));
        }
        if a.is_empty() || !a.chars().all(|c| c.is_alphanumeric() || c == '_') || a.chars().next().unwrap().is_ascii_digit() {
            return err(path, format!("`{a}` is not a valid coordinate name"));
        }
    }
    Ok(())
}

/// Velocity variable names `u{α}_{name}` for 1-based α.
pub fn velocity_names(k: usize, q: &[String]) -> Vec<String> {
    (1..=k).flat_map(|a| q.iter().map(move |s| format!("u{a}_{s}"))).collect()
}

pub fn load_config(path: &Path) -> Result<ProblemConfig, ConfigError> {
    let text = std::fs::read_to_string(path).or_else(|e| err(path.display().to_string(), e.to_string()))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ProblemConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).or_else(|e| err("<toml>", e.to_string().trim_end().to_string()))?;
    build(raw)
}

fn build(raw: RawConfig) -> Result<ProblemConfig, ConfigError> {
    let k = raw.k;
    if k == 0 {
        return err("k", "must be at least 1");
    }
    let b = &raw.bundle;
    unique(&b.base.iter().chain(&b.fiber).cloned().collect::<Vec<_>>(), "bundle")?;
    let (nb, nf) = (b.base.len(), b.fiber.len());
    if nb + nf == 0 {
        return err("bundle", "no coordinates");
    }
    let q_names: Vec<String> = b.base.iter().chain(&b.fiber).cloned().collect();
    let params: HashMap<String, f64> = raw.constants.iter().map(|(k, v)| (k.clone(), *v)).collect();
    for name in params.keys() {
        if q_names.contains(name) {
            return err(format!("constants.{name}"), "shadows a coordinate name");
        }
    }
    let qc = Compiler { params: params.clone(), slots: q_names.iter().map(String::as_str).collect() };

    let mut exact = vec![BigRational::from_integer(0.into()); nf * nf * nf];
    let pos =
        |s: &str, path: &str| b.fiber.iter().position(|f| f == s).map_or_else(|| err(path, format!("`{s}` is not a fiber coordinate")), Ok);
    for (i, c) in b.structure.iter().enumerate() {
        let path = format!("bundle.structure[{i}]");
        let (ci, ai, bi) = (pos(&c.c, &path)?, pos(&c.a, &path)?, pos(&c.b, &path)?);
        exact[(ci * nf + ai) * nf + bi] = c.value.to_rational(&format!("{path}.value"))?;
    }
    let algebra = LieAlgebraData::from_exact(nf, exact).or_else(|e| err("bundle.structure", e.to_string()))?;

    let id_rows = |n: usize| -> Vec<Vec<String>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { "1".to_string() } else { "0".to_string() }).collect()).collect()
    };
    let gamma = match (&b.gamma, nb, nf) {
        (Some(g), _, _) => qc.matrix(g, nb, nf, "bundle.gamma")?,
        (None, _, 0) | (None, 0, _) => vec![Vec::new(); nb],
        (None, _, _) => return err("bundle.gamma", "required when both base and fiber are present"),
    };
    let kmat = match (&b.kmat, nf) {
        (Some(m), _) => qc.matrix(m, nf, nf, "bundle.kmat")?,
        (None, 0) => Vec::new(),
        (None, _) => return err("bundle.kmat", "required when the fiber is present"),
    };
    let amat = match (&b.amat, nf) {
        (Some(m), _) => qc.matrix(m, nf, nf, "bundle.amat")?,
        (None, 0) => Vec::new(),
        (None, _) if algebra.is_abelian() => qc.matrix(&id_rows(nf), nf, nf, "bundle.amat")?,
        (None, _) => return err("bundle.amat", "required for a non-abelian group"),
    };
    let identity = b.identity.clone().unwrap_or_else(|| vec![0.0; nf]);
    if identity.len() != nf {
        return err("bundle.identity", format!("expected {nf} entries"));
    }
    let mult = match &b.mult {
        None if nf == 0 => Some(Vec::new()),
        None => None,
        Some(m) => {
            if m.len() != nf {
                return err("bundle.mult", format!("expected {nf} entries, found {}", m.len()));
            }
            let bars: Vec<String> = b.fiber.iter().map(|s| format!("{s}b")).collect();
            let slots: Vec<&str> = b.fiber.iter().chain(&bars).map(String::as_str).collect();
            let mc = Compiler { params: params.clone(), slots };
            Some(m.iter().enumerate().map(|(i, s)| mc.one(s, &format!("bundle.mult[{i}]"))).collect::<Result<Vec<_>, _>>()?)
        }
    };
    let data = PrincipalBundleData::new(nb, algebra, gamma, kmat, amat, identity, mult).or_else(|e| err("bundle", e.to_string()))?;

    let sampling = Sampling { count: raw.sampling.count, radius: raw.sampling.radius, seed: raw.sampling.seed };
    if !(sampling.radius > 0.0) {
        return err("sampling.radius", "must be positive");
    }
    let check_pts = Sampling { count: sampling.count.clamp(1, 20), ..sampling.clone() }.points(nb + nf, 0);
    data.validate(&check_pts).or_else(|e| err("bundle", e.to_string()))?;

    let lagrangian = match (&raw.lagrangian.metric, &raw.lagrangian.expression) {
        (Some(m), None) => {
            let h = qc.matrix(m, nb + nf, nb + nf, "lagrangian.metric")?;
            let l = Lagrangian::metric(nb + nf, k, h).or_else(|e| err("lagrangian.metric", e.to_string()))?;
            let sym = l.metric_symmetry_defect(&check_pts).or_else(|e| err("lagrangian.metric", e.to_string()))?;
            if sym > 1e-12 {
                return err("lagrangian.metric", format!("not symmetric (defect {sym:.3e})"));
            }
            l
        }
        (None, Some(src)) => {
            let vel = velocity_names(k, &q_names);
            let slots: Vec<&str> = q_names.iter().chain(&vel).map(String::as_str).collect();
            let lc = Compiler { params: params.clone(), slots };
            Lagrangian::expression(nb + nf, k, lc.one(src, "lagrangian.expression")?)
        }
        _ => return err("lagrangian", "give exactly one of `metric` or `expression`"),
    };

    let reduced_kind = raw.reduced.field;
    if reduced_kind == ReducedKind::EulerPoincare && nb != 0 {
        return err("reduced.field", "euler-poincare needs an empty base");
    }
    if reduced_kind == ReducedKind::Harmonic && raw.lagrangian.metric.is_none() {
        return err("reduced.field", "harmonic needs a metric Lagrangian");
    }

    let axes = match raw.grid {
        None => None,
        Some(g) => {
            check_axes(&g.axes, k, "grid.axes")?;
            Some(g.axes)
        }
    };

    let initial = match raw.initial {
        None => None,
        Some(init) => Some(build_initial(init, nb, nf, k, &identity_of(&data))?),
    };

    let t = raw.tolerances;
    if !(t.pass > 0.0 && t.pass <= t.fail) {
        return err("tolerances", "need 0 < pass <= fail");
    }
    let order = match &raw.march.sweep_order {
        None => None,
        Some(s) => Some(SweepOrder::parse(s, k).map_or_else(|| err("march.sweep_order", format!("`{s}` is not an axis permutation")), Ok)?),
    };
    if raw.march.substeps == 0 {
        return err("march.substeps", "must be at least 1");
    }
    Ok(ProblemConfig {
        k,
        base_names: b.base.clone(),
        fiber_names: b.fiber.clone(),
        data,
        lagrangian,
        reduced_kind,
        axes,
        initial,
        constants: raw.constants,
        tol: Tolerances { pass: t.pass, fail: t.fail },
        sweep_tol: t.sweep,
        certificate_tol: t.certificate,
        sampling,
        march: MarchOptions { substeps: raw.march.substeps, order, probe: true, defect_warning: t.sweep },
    })
}

fn identity_of(data: &PrincipalBundleData) -> Vec<f64> {
    data.identity.clone()
}

pub fn check_axes(axes: &[AxisSpec], k: usize, path: &str) -> Result<(), ConfigError> {
    if axes.len() != k {
        return err(path, format!("expected {k} axes, found {}", axes.len()));
    }
    for (i, a) in axes.iter().enumerate() {
        if a.count == 0 || !(a.max > a.min) && a.count > 1 || !a.min.is_finite() || !a.max.is_finite() {
            return err(format!("{path}[{i}]"), "need finite min < max and count >= 1");
        }
    }
    Ok(())
}

fn build_initial(init: RawInitial, nb: usize, nf: usize, k: usize, identity: &[f64]) -> Result<InitialData, ConfigError> {
    if init.base.len() != nb {
        return err("initial.base", format!("expected {nb} entries"));
    }
    let w = init.w.unwrap_or_else(|| vec![Vec::new(); k]);
    if init.v.len() != k {
        return err("initial.v", format!("expected {k} rows"));
    }
    if w.len() != k {
        return err("initial.w", format!("expected {k} rows"));
    }
    let mut reduced = init.base.clone();
    for a in 0..k {
        if init.v[a].len() != nb {
            return err(format!("initial.v[{a}]"), format!("expected {nb} entries"));
        }
        if w[a].len() != nf {
            return err(format!("initial.w[{a}]"), format!("expected {nf} entries"));
        }
        reduced.extend_from_slice(&init.v[a]);
        reduced.extend_from_slice(&w[a]);
    }
    let fiber = init.fiber.unwrap_or_else(|| identity.to_vec());
    let group = init.group.unwrap_or_else(|| identity.to_vec());
    if fiber.len() != nf {
        return err("initial.fiber", format!("expected {nf} entries"));
    }
    if group.len() != nf {
        return err("initial.group", format!("expected {nf} entries"));
    }
    if reduced.iter().chain(&fiber).chain(&group).any(|v| !v.is_finite()) {
        return err("initial", "non-finite value");
    }
    Ok(InitialData { reduced, fiber, group })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = include_str!("../../configs/harmonic_golden.toml");

    fn golden_with(from: &str, to: &str) -> Result<ProblemConfig, ConfigError> {
        assert!(GOLDEN.contains(from), "{from}");
        parse_config(&GOLDEN.replacen(from, to, 1))
    }

    #[test]
    fn golden_config_loads() {
        let c = parse_config(GOLDEN).unwrap();
        assert_eq!((c.data.n_base, c.data.n_fiber, c.k), (1, 4, 2));
        assert_eq!(c.reduced_kind, ReducedKind::Harmonic);
        assert_eq!(c.initial().unwrap().reduced, crate::fixtures::golden_reduced_init());
        assert_eq!(c.axes().unwrap()[0].len(), 21);
        assert_eq!(c.data.algebra.c(2, 0, 1), -2.0);
        assert!(c.require_mult().is_ok());
        assert_eq!(c.sampling.seed, 7);
    }

    #[test]
    fn loading_is_deterministic() {
        let a = parse_config(GOLDEN).unwrap();
        let b = parse_config(GOLDEN).unwrap();
        assert_eq!(a.sampling.points(3, 1), b.sampling.points(3, 1));
        assert_eq!(a.initial, b.initial);
    }

    #[test]
    fn broken_antisymmetry_is_rejected() {
        let e = parse_config(include_str!("../../configs/broken_antisymmetry.toml")).unwrap_err();
        assert_eq!(e.path, "bundle.structure");
        assert!(e.message.contains("antisymmetric"), "{}", e.message);
    }

    #[test]
    fn missing_mult_is_rejected_for_reconstruction() {
        let start = GOLDEN.find("mult = [").unwrap();
        let end = start + GOLDEN[start..].find("]\n").unwrap() + 2;
        let c = parse_config(&format!("{}{}", &GOLDEN[..start], &GOLDEN[end..])).unwrap();
        assert!(c.data.mult.is_none());
        assert_eq!(c.require_mult().unwrap_err().path, "bundle.mult");
    }

    #[test]
    fn field_path_diagnostics() {
        let cases = [
            (golden_with("k = 2", "k = 0"), "k"),
            (golden_with("[\"0\", \"0\", \"gamma\", \"0\"]", "[\"0\", \"0\", \"gamma\"]"), "bundle.gamma[0]"),
            (golden_with("\"x/2\", \"0.5\", \"0\"]", "\"x/2\", \"0.5\", \"w\"]"), "lagrangian.metric[4][4]"),
            (golden_with("\"th + thb\"", "\"th + (\""), "bundle.mult[3]"),
            (golden_with("c = \"z\", a = \"x\"", "c = \"w\", a = \"x\""), "bundle.structure[0]"),
            (golden_with("count = 21 },\n]", "count = 21 }, { min = 0.0, max = 1.0, count = 3 },\n]"), "grid.axes"),
            (golden_with("v = [[1.0], [0.0]]", "v = [[1.0]]"), "initial.v"),
            (golden_with("field = \"harmonic\"", "field = \"euler-poincare\""), "reduced.field"),
            (golden_with("gamma = 0.5", "x = 0.5"), "constants.x"),
        ];
        for (res, path) in cases {
            assert_eq!(res.unwrap_err().path, path);
        }
        let e = golden_with("[reduced]", "[reduced]\nflavour = 1").unwrap_err();
        assert_eq!(e.path, "<toml>");
        assert!(e.message.contains("flavour"), "{}", e.message);
    }

    #[test]
    fn structure_values_accept_fractions_and_reject_junk() {
        let c = golden_with("value = -2 }", "value = \"-4/2\" }").unwrap();
        assert_eq!(c.data.algebra.c(2, 0, 1), -2.0);
        assert_eq!(golden_with("value = -2 }", "value = \"two\" }").unwrap_err().path, "bundle.structure[0].value");
        assert_eq!(golden_with("value = -2 }", "value = \"1/0\" }").unwrap_err().path, "bundle.structure[0].value");
    }

    #[test]
    fn abelian_defaults_and_expression_slots() {
        let src = "k = 1\n[bundle]\nbase = [\"a\"]\nfiber = [\"z\"]\ngamma = [[\"0\"]]\nkmat = [[\"1\"]]\n\
                   [lagrangian]\nexpression = \"0.5*(u1_a^2 + u1_z^2)\"\n";
        let c = parse_config(src).unwrap();
        assert_eq!(c.data.identity, vec![0.0]);
        assert_eq!(c.reduced_kind, ReducedKind::Sopde);
        assert!(c.initial.is_none() && c.axes.is_none());
        assert_eq!(c.axes().unwrap_err().path, "grid");
        let x = [0.3, 0.0, 2.0, 1.0];
        assert!((c.lagrangian.eval(&x).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(velocity_names(2, &["a".into()]), ["u1_a", "u2_a"]);

        let bad = src.replace("kmat = [[\"1\"]]\n", "kmat = [[\"1\"]]\nstructure = [{ c = \"z\", a = \"z\", b = \"z\", value = 1 }]\n");
        assert_eq!(parse_config(&bad).unwrap_err().path, "bundle.structure");
    }

    #[test]
    fn samples_stay_in_the_box() {
        let s = Sampling { count: 50, radius: 0.25, seed: 3 };
        let p = s.points(4, 0);
        assert_eq!(p.len(), 50);
        assert!(p.iter().flatten().all(|v| v.abs() <= 0.25));
        assert_ne!(s.points(4, 0), s.points(4, 1));
    }
}
