//! The pipeline subcommands. Each returns a text report, an optional CSV and a verdict.

use super::config::{parse_config, ConfigError, ProblemConfig, ReducedKind};
use super::csv::grid_csv;
use crate::error::Error;
use crate::geometry::point::{KTangentPoint, TkLayout};
use crate::integrability::{bracket_residual, flow_commutation_defect, reduced_obstruction_max, IntegrabilityReport, Tolerances, Verdict};
use crate::lagrange_poincare::{euler_poincare_rhs, lp_names, lp_residual, reduced_lagrangian, reduced_sopde, HarmonicField, ReducedField};
use crate::lagrangian::{lagrangian_sopde, regularity_check, LagrangianForces};
use crate::reconstruction::{
    el_certificate, group_path_defect, reconstruct_solution, MechanicalKConnection, ReconstructInit, ReconstructOptions,
};
use crate::solver::grid::{AxisSpec, FieldGrid};
use crate::solver::march::grid_march;
use crate::symmetry::{invariance_check, lift_state, verify_bracket_table};
use std::fmt::Write as _;
use std::time::Instant;

/// The embedded harmonic-map problem run by `ksym golden`.
pub const GOLDEN_CONFIG: &str = include_str!("../../configs/harmonic_golden.toml");

/// Step bound for the flow-commutation probe.
const FLOW_STEP: f64 = 0.01;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Numeric(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: String,
    pub csv: Option<String>,
    /// Whether the CSV goes to stdout when no output path is given.
    pub csv_to_stdout: bool,
    pub verdict: Verdict,
}

/// Report lines `name  value  verdict` with a running overall verdict.
struct Report {
    text: String,
    verdict: Verdict,
}

impl Report {
    fn new(title: &str) -> Self {
        Report { text: format!("ksym {title}\n"), verdict: Verdict::Pass }
    }
    fn info(&mut self, name: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "  {name:<34} {value}");
    }
    fn check(&mut self, name: &str, value: impl std::fmt::Display, v: Verdict) {
        let _ = writeln!(self.text, "  {name:<34} {value:<14} {}", v.label());
        self.verdict = self.verdict.combine(v);
    }
    fn measured(&mut self, name: &str, value: f64, cfg: &ProblemConfig) {
        self.check(name, format!("{value:.3e}"), cfg.tol.classify(value));
    }
    fn finish(mut self, csv: Option<String>, csv_to_stdout: bool) -> Outcome {
        let _ = writeln!(self.text, "  {:<34} {}", "overall", self.verdict.label());
        Outcome { report: self.text, csv, csv_to_stdout, verdict: self.verdict }
    }
}

fn pass_if(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn natural_samples(cfg: &ProblemConfig) -> Vec<Vec<f64>> {
    let n = cfg.n();
    cfg.sampling.points(n + cfg.k * n, 2)
}

/// The reduced field chosen by the config. SOPDE invariance is checked at `samples`.
pub fn build_reduced<'a>(cfg: &'a ProblemConfig, samples: &[Vec<f64>]) -> Result<ReducedField<'a>, Error> {
    let (l, d) = (&cfg.lagrangian, &cfg.data);
    Ok(match cfg.reduced_kind {
        ReducedKind::Sopde => ReducedField::Sopde(reduced_sopde(lagrangian_sopde(l).forces, d, samples)?),
        ReducedKind::Harmonic => ReducedField::Harmonic(HarmonicField::new(l, d)?),
        ReducedKind::EulerPoincare => ReducedField::EulerPoincare(euler_poincare_rhs(reduced_lagrangian(l, d, cfg.sampling.seed)?)?),
    })
}

fn kind_label(k: ReducedKind) -> &'static str {
    match k {
        ReducedKind::Sopde => "sopde",
        ReducedKind::Harmonic => "harmonic",
        ReducedKind::EulerPoincare => "euler-poincare",
    }
}

fn extents(cfg: &ProblemConfig) -> Vec<f64> {
    match &cfg.axes {
        Some(a) => a.iter().map(|s| if s.max > s.min { s.max - s.min } else { 1.0 }).collect(),
        None => vec![1.0; cfg.k],
    }
}

pub fn run_check(cfg: &ProblemConfig) -> Result<Outcome, CliError> {
    let (l, d, k, n) = (&cfg.lagrangian, &cfg.data, cfg.k, cfg.n());
    let mut r = Report::new("check");
    r.info("dimensions", format!("k = {k}, base = {}, fiber = {}", d.n_base, d.n_fiber));
    r.info("seed", cfg.sampling.seed);
    let alg = &d.algebra;
    r.check("algebra antisymmetry", "exact", pass_if(alg.antisymmetry_violation().is_none()));
    r.check("algebra jacobi", "exact", pass_if(alg.jacobi_violation().is_none()));

    let qpts = cfg.sampling.points(n, 1);
    let bt = verify_bracket_table(d, &qpts)?;
    r.measured("bracket [E~a, E~b] + C E~", bt.fundamental, cfg);
    r.measured("bracket [E^a, E^b] - C E^", bt.invariant, cfg);
    r.measured("bracket [X_i, E~a]", bt.horizontal_fundamental, cfg);
    r.measured("bracket [X_i, E^a] - Y E^", bt.mixed, cfg);
    r.measured("bracket [X_i, X_j] + K E^", bt.horizontal, cfg);
    r.measured("bracket [E~a, E^b]", bt.fundamental_invariant, cfg);

    let states = natural_samples(cfg);
    r.measured("invariance max |E~^C(L)|", invariance_check(l, d, &states)?, cfg);

    let tk = TkLayout::new(n, k);
    let mut regular = 0;
    let mut min_det = f64::INFINITY;
    for x in &states {
        let reg = regularity_check(l, &KTangentPoint::from_flat(tk, x)?)?;
        regular += reg.regular as usize;
        min_det = min_det.min(reg.det.abs());
    }
    r.check("regularity", format!("{regular}/{}", states.len()), pass_if(regular == states.len()));
    r.info("  min |det Hessian|", format!("{min_det:.3e}"));

    let conn = MechanicalKConnection::new(l, d)?;
    let mut g_regular = 0;
    let mut block_sym: f64 = 0.0;
    for x in &states {
        let b = conn.blocks(x)?;
        g_regular += b.g_regularity().regular as usize;
        block_sym = block_sym.max(b.symmetry_defect());
    }
    r.check("G-regularity", format!("{g_regular}/{}", states.len()), pass_if(g_regular == states.len()));
    r.measured("hessian block symmetry", block_sym, cfg);

    match &cfg.initial {
        None => r.info("integrability", "skipped (no initial data)"),
        Some(init) => {
            let samples: Vec<Vec<f64>> = states.iter().take(10).cloned().collect();
            let field = build_reduced(cfg, &samples)?;
            let y0 = vec![init.reduced.clone()];
            let bracket = bracket_residual(&field, &y0)?;
            let obstruction = if d.n_fiber > 0 { Some(reduced_obstruction_max(&field, d, cfg.layout(), &y0)?) } else { None };
            let flow = if k >= 2 { Some(flow_commutation_defect(&field, &init.reduced, &extents(cfg), FLOW_STEP)?) } else { None };
            let rep = IntegrabilityReport { bracket, reduced_obstruction: obstruction, flow_defect: flow, tol: cfg.tol };
            r.info("reduced field", kind_label(cfg.reduced_kind));
            r.check("reduced bracket (relative)", format!("{:.3e}", rep.bracket.relative()), rep.bracket_verdict());
            if let (Some(o), Some(v)) = (rep.reduced_obstruction, rep.obstruction_verdict()) {
                r.check("reduced obstruction", format!("{o:.3e}"), v);
            }
            if let (Some(f), Some(v)) = (rep.flow_defect, rep.flow_verdict()) {
                r.check("flow commutation defect", format!("{f:.3e}"), v);
            }
            let x0 = lift_state(d, cfg.layout(), &init.reduced)?;
            let full = bracket_residual(&lagrangian_sopde(l), &[x0])?;
            r.check("full SOPDE bracket (relative)", format!("{:.3e}", full.relative()), cfg.tol.classify(full.relative()));
        }
    }
    Ok(r.finish(None, false))
}

fn march_reduced(cfg: &ProblemConfig, field: &ReducedField) -> Result<(FieldGrid, Option<f64>), CliError> {
    let axes = cfg.axes()?;
    let init = cfg.initial()?;
    let names = lp_names(cfg.k, &cfg.base_names, &cfg.fiber_names);
    let res = grid_march(field, &init.reduced, &axes, names, &cfg.march)?;
    Ok((res.grid, res.cross_order_defect))
}

pub fn run_reduce(cfg: &ProblemConfig) -> Result<Outcome, CliError> {
    let (l, d) = (&cfg.lagrangian, &cfg.data);
    let mut r = Report::new("reduce");
    let layout = cfg.layout();
    r.info("reduced field", kind_label(cfg.reduced_kind));
    r.info("base / fiber / k", format!("{} / {} / {}", layout.nb, layout.nf, layout.k));
    r.info("reduced state dimension", layout.dim());
    r.info("reduced columns", lp_names(cfg.k, &cfg.base_names, &cfg.fiber_names).join(","));
    r.info("abelian group", d.algebra.is_abelian());
    let forces = match lagrangian_sopde(l).forces {
        LagrangianForces::Christoffel(_) => "christoffel",
        LagrangianForces::MinNorm(_) => "minimum-norm",
    };
    r.info("SOPDE forces", forces);
    let samples: Vec<Vec<f64>> = natural_samples(cfg).into_iter().take(10).collect();
    let field = build_reduced(cfg, &samples)?;
    let rl = reduced_lagrangian(l, d, cfg.sampling.seed)?;
    r.check("reduced Lagrangian invariance", "sampled", Verdict::Pass);
    if let Some(init) = &cfg.initial {
        r.info("l at initial state", format!("{:.16e}", rl.eval(&init.reduced)?));
    }
    if cfg.axes.is_none() || cfg.initial.is_none() {
        r.info("LP residual self-test", "skipped (needs grid and initial data)");
        return Ok(r.finish(None, false));
    }
    let (grid, _) = march_reduced(cfg, &field)?;
    let base = lp_residual(&rl, &grid)?.max();
    if cfg.tol.classify(base) == Verdict::Pass {
        r.measured("LP residual of marched solution", base, cfg);
    } else {
        // Second-order differences: halving the spacing should quarter the residual.
        let mut fine_cfg = cfg.clone();
        fine_cfg.axes = cfg.axes.as_ref().map(|a| a.iter().map(|s| AxisSpec { count: 2 * s.count - 1, ..*s }).collect());
        let (fine, _) = march_reduced(&fine_cfg, &field)?;
        let fine_res = lp_residual(&rl, &fine)?.max();
        let order = (base / fine_res).log2();
        r.info("LP residual of marched solution", format!("{base:.3e}"));
        r.info("LP residual on refined grid", format!("{fine_res:.3e}"));
        r.check("LP residual convergence order", format!("{order:.2}"), pass_if(order > 1.5));
    }
    let mut spiked = grid.clone();
    let dim = spiked.dim();
    let node = spiked.node_count() / 2;
    spiked.values[node * dim + dim - 1] += 0.01;
    let spike = lp_residual(&rl, &spiked)?.max();
    r.check("LP residual of perturbed grid", format!("{spike:.3e}"), pass_if(spike > cfg.tol.fail));
    Ok(r.finish(None, false))
}

pub fn run_integrate(cfg: &ProblemConfig) -> Result<Outcome, CliError> {
    let mut r = Report::new("integrate");
    let samples: Vec<Vec<f64>> = natural_samples(cfg).into_iter().take(10).collect();
    let field = build_reduced(cfg, &samples)?;
    let t0 = Instant::now();
    let (grid, defect) = march_reduced(cfg, &field)?;
    r.info("reduced field", kind_label(cfg.reduced_kind));
    r.info("nodes", grid.node_count());
    if let Some(dft) = defect {
        r.check("cross-order defect", format!("{dft:.3e}"), pass_if(dft <= cfg.sweep_tol));
    }
    r.info("elapsed", format!("{:.3} s", t0.elapsed().as_secs_f64()));
    Ok(r.finish(Some(grid_csv(&grid)), true))
}

struct Reconstructed {
    full: FieldGrid,
    max_el: f64,
    group_defect: f64,
    cross: Option<f64>,
}

fn reconstruct(cfg: &ProblemConfig) -> Result<Reconstructed, CliError> {
    cfg.require_mult()?;
    let axes = cfg.axes()?;
    let init = cfg.initial()?;
    let samples: Vec<Vec<f64>> = natural_samples(cfg).into_iter().take(10).collect();
    let field = build_reduced(cfg, &samples)?;
    let conn = MechanicalKConnection::new(&cfg.lagrangian, &cfg.data)?;
    let rinit = ReconstructInit { reduced: init.reduced.clone(), fiber: init.fiber.clone(), group: init.group.clone() };
    let opts = ReconstructOptions { march: cfg.march.clone(), sweep_tol: cfg.sweep_tol, chart_box: None };
    let rec = reconstruct_solution(&field, conn, &rinit, &axes, &cfg.base_names, &cfg.fiber_names, &opts)?;
    Ok(Reconstructed {
        max_el: el_certificate(&cfg.lagrangian, &rec.prolongation)?,
        group_defect: group_path_defect(&conn, &rec.group)?,
        cross: rec.cross_order_defect,
        full: rec.full,
    })
}

fn report_reconstruction(r: &mut Report, rec: &Reconstructed, cfg: &ProblemConfig) {
    r.info("nodes", rec.full.node_count());
    if let Some(d) = rec.cross {
        r.info("cross-order defect", format!("{d:.3e}"));
    }
    r.info("group path defect", format!("{:.3e}", rec.group_defect));
    let bands = Tolerances { pass: cfg.certificate_tol, fail: cfg.tol.fail.max(cfg.certificate_tol) };
    r.check("Euler-Lagrange residual", format!("{:.3e}", rec.max_el), bands.classify(rec.max_el));
}

pub fn run_reconstruct(cfg: &ProblemConfig) -> Result<Outcome, CliError> {
    let mut r = Report::new("reconstruct");
    let t0 = Instant::now();
    let rec = reconstruct(cfg)?;
    report_reconstruction(&mut r, &rec, cfg);
    r.info("elapsed", format!("{:.3} s", t0.elapsed().as_secs_f64()));
    Ok(r.finish(Some(grid_csv(&rec.full)), true))
}

/// Closed-form harmonic map for reduced initial data `(q, v_1, w_1, v_2, w_2)`
/// with `v = (1, 0)`, `w_1^θ = 1`, `w_2 = (0, 0, c, 0)` and all offsets zero.
pub fn golden_closed_form(y0: &[f64], gamma: f64, t: &[f64]) -> [f64; 5] {
    let (cx, cy, cz, c2z) = (y0[2], y0[3], y0[4], y0[9]);
    let (s, c) = t[0].sin_cos();
    let gz = (cx * cx + cy * cy) * (t[0] - s) + cz * t[0] + c2z * t[1];
    [t[0], cx * s - cy * c + cy, cx * c + cy * s - cx, gz - gamma * t[0], t[0]]
}

fn golden_family(cfg: &ProblemConfig) -> Result<(Vec<f64>, f64), ConfigError> {
    let fail = |m: &str| Err(ConfigError { path: "golden".into(), message: m.into() });
    let init = cfg.initial()?;
    let y = &init.reduced;
    let Some(&gamma) = cfg.constants.get("gamma") else { return fail("constant `gamma` missing") };
    let family = cfg.k == 2
        && cfg.base_names.len() == 1
        && cfg.fiber_names.len() == 4
        && y.len() == 11
        && [y[0], y[1] - 1.0, y[5] - 1.0, y[6], y[7], y[8], y[10]].iter().all(|v| *v == 0.0)
        && init.fiber.iter().chain(&init.group).all(|v| *v == 0.0);
    if !family {
        return fail("initial data is outside the closed-form family");
    }
    Ok((y.clone(), gamma))
}

/// Parses the embedded golden problem.
pub fn golden_config() -> Result<ProblemConfig, ConfigError> {
    parse_config(GOLDEN_CONFIG)
}

/// Runs the embedded problem; `dev_tol` bounds the deviation from the closed form.
pub fn run_golden(cfg: &ProblemConfig, dev_tol: f64) -> Result<Outcome, CliError> {
    let mut r = Report::new("golden");
    let (y0, gamma) = golden_family(cfg)?;
    let t0 = Instant::now();
    let rec = reconstruct(cfg)?;
    let mut worst: f64 = 0.0;
    for node in 0..rec.full.node_count() {
        let want = golden_closed_form(&y0, gamma, &rec.full.t(node));
        for (a, b) in rec.full.value(node).iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    let shape: Vec<String> = rec.full.shape().iter().map(usize::to_string).collect();
    r.info("grid", shape.join("x"));
    r.check("max |phi - closed form|", format!("{worst:.3e}"), pass_if(worst < dev_tol));
    report_reconstruction(&mut r, &rec, cfg);
    r.info("elapsed", format!("{:.3} s", t0.elapsed().as_secs_f64()));
    Ok(r.finish(Some(grid_csv(&rec.full)), false))
}
