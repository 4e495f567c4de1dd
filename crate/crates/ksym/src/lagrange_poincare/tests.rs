use super::*;
use crate::fixtures::{cexpr, curved_abelian, golden_bundle, group_bundle, group_only, harmonic_metric, GAMMA};
use crate::geometry::field::KVectorField;
use crate::lagrangian::{lagrangian_sopde, metric_sopde};
use crate::solver::grid::FieldGrid;
use crate::symmetry::reduce_kvector;

fn random_vec(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..r)).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Invariant metric `dx1² + dx2² + (dz + x2 dx1)²` on the curved abelian bundle.
fn curved_metric(k: usize) -> Lagrangian {
    let v = ["x1", "x2", "z"];
    let rows = [["1 + x2^2", "0", "x2"], ["0", "1", "0"], ["x2", "0", "1"]];
    Lagrangian::metric(3, k, rows.iter().map(|r| r.iter().map(|s| cexpr(s, &v)).collect()).collect()).unwrap()
}

fn identity_metric(n: usize, k: usize, vars: &[&str]) -> Lagrangian {
    let h = (0..n).map(|i| (0..n).map(|j| cexpr(if i == j { "1" } else { "0" }, vars)).collect()).collect();
    Lagrangian::metric(n, k, h).unwrap()
}

#[test]
fn reduced_sopde_matches_direct_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases = [
        (golden_bundle(), harmonic_metric(2)),
        (group_bundle(["1", "0", "0", "0"]), harmonic_metric(2)),
        (curved_abelian(), curved_metric(2)),
    ];
    for (d, l) in &cases {
        let n = d.n();
        let samples: Vec<Vec<f64>> = (0..5).map(|_| random_vec(&mut rng, 3 * n, 1.0)).collect();
        let rs = reduced_sopde(lagrangian_sopde(l).forces, d, &samples).unwrap();
        let direct = reduce_kvector(metric_sopde(l).unwrap(), d, &samples).unwrap();
        for _ in 0..10 {
            let y = random_vec(&mut rng, rs.dim(), 1.0);
            for a in 0..2 {
                let got = rs.component(a, &y).unwrap();
                assert!(max_diff(&got, &direct.component(a, &y).unwrap()) < 1e-10);
                assert!(max_diff(&got[..d.n_base], &y[rs.layout.v_range(a)]) == 0.0);
            }
        }
    }
}

#[test]
fn trivial_group_reduced_sopde_is_the_full_sopde() {
    let v = ["a", "b"];
    let l = Lagrangian::metric(2, 2, vec![vec![cexpr("1", &v), cexpr("0", &v)], vec![cexpr("0", &v), cexpr("sin(a)^2 + 1", &v)]]).unwrap();
    let d = crate::symmetry::PrincipalBundleData::trivial(2);
    let s = metric_sopde(&l).unwrap();
    let rs = reduced_sopde(s.forces.clone(), &d, &[]).unwrap();
    let x = [0.3, -0.2, 1.0, 0.5, -0.4, 0.7];
    for a in 0..2 {
        assert_eq!(rs.component(a, &x).unwrap(), s.component(a, &x).unwrap());
    }
}

#[test]
fn golden_harmonic_field_has_zero_forces() {
    let d = golden_bundle();
    let l = harmonic_metric(2);
    let hf = HarmonicField::new(&l, &d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let y = random_vec(&mut rng, hf.dim(), 2.0);
        for a in 0..2 {
            let c = hf.component(a, &y).unwrap();
            assert_eq!(c[0], y[hf.layout.v(a, 0)]);
            assert!(c[1..].iter().all(|v| v.abs() < 1e-14), "{c:?}");
        }
    }
}

#[test]
fn harmonic_field_agrees_with_reduced_christoffel_field_on_diagonal_slots() {
    // The two differ off the diagonal but share every slot dv_α/dt^α, dw_α/dt^α.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = [(golden_bundle(), harmonic_metric(2)), (curved_abelian(), curved_metric(2))];
    for (d, l) in &cases {
        let hf = HarmonicField::new(l, d).unwrap();
        let rs = reduced_sopde(lagrangian_sopde(l).forces, d, &[]).unwrap();
        let lay = hf.layout;
        for _ in 0..10 {
            let y = random_vec(&mut rng, lay.dim(), 1.0);
            for a in 0..2 {
                let h = hf.component(a, &y).unwrap();
                let s = rs.component(a, &y).unwrap();
                assert!(max_diff(&h[lay.block(a)], &s[lay.block(a)]) < 1e-10);
            }
        }
    }
}

#[test]
fn harmonic_field_on_curved_bundle_by_hand() {
    // Flat base, h_zz = 1, K^z_12 = −1: dv_β^1/dt^α = −v_α^2 w_β, dv_β^2/dt^α = v_α^1 w_β.
    let d = curved_abelian();
    let l = curved_metric(2);
    let hf = HarmonicField::new(&l, &d).unwrap();
    let lay = hf.layout;
    let y = [0.2, -0.4, 0.3, 0.5, 0.7, -0.6, 0.1, 0.9];
    for a in 0..2 {
        let c = hf.component(a, &y).unwrap();
        for b in 0..2 {
            let w = y[lay.w(b, 0)];
            assert!((c[lay.v(b, 0)] + y[lay.v(a, 1)] * w).abs() < 1e-12);
            assert!((c[lay.v(b, 1)] - y[lay.v(a, 0)] * w).abs() < 1e-12);
            assert!(c[lay.w(b, 0)].abs() < 1e-14);
        }
    }
}

#[test]
fn golden_reduced_lagrangian_closed_form() {
    let d = golden_bundle();
    let l = harmonic_metric(2);
    let rl = reduced_lagrangian(&l, &d, 7).unwrap();
    let lay = rl.layout;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let y = random_vec(&mut rng, lay.dim(), 2.0);
        let mut want = 0.0;
        for a in 0..2 {
            let v = y[lay.v(a, 0)];
            let w = &y[lay.w_range(a)];
            want += 0.5 * (v * v + w[0] * w[0] + w[1] * w[1] + w[2] * w[3]);
        }
        assert!((rl.eval(&y).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn reduced_lagrangian_flat_and_trivial_cases() {
    let v = ["a", "b"];
    let l = Lagrangian::metric(2, 1, vec![vec![cexpr("1 + a^2", &v), cexpr("0", &v)], vec![cexpr("0", &v), cexpr("1", &v)]]).unwrap();
    let d = crate::symmetry::PrincipalBundleData::trivial(2);
    let rl = reduced_lagrangian(&l, &d, 0).unwrap();
    let x = [0.5, 0.1, 2.0, -1.0];
    assert_eq!(rl.eval(&x).unwrap(), l.eval(&x).unwrap());

    let flat = identity_metric(5, 2, &["q", "x", "y", "z", "th"]);
    let g = golden_bundle();
    let rl = reduced_lagrangian(&flat, &g, 0);
    assert!(matches!(rl, Err(Error::NotInvariant(_))));
    // Evaluated over the identity with w = 0 the flat metric gives |X|² v²/2 = (1 + γ²) v²/2.
    let rl = ReducedLagrangian { lagrangian: &flat, data: &g, layout: LpLayout::new(1, 4, 2) };
    let mut y = vec![0.0; 11];
    y[1] = 0.8;
    y[6] = -0.3;
    let want = 0.5 * (1.0 + GAMMA * GAMMA) * (0.64 + 0.09);
    assert!((rl.eval(&y).unwrap() - want).abs() < 1e-14);
}

/// Golden reduced solution `φ^q = t¹`, `v = (1, 0)`, constant w, on a square grid.
fn golden_lp_grid(n: usize, w1: [f64; 4], w2: [f64; 4]) -> FieldGrid {
    let ax: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut values = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let _ = j;
            values.push(ax[i]);
            values.push(1.0);
            values.extend_from_slice(&w1);
            values.push(0.0);
            values.extend_from_slice(&w2);
        }
    }
    let names = lp_names(2, &["q".into()], &["x".into(), "y".into(), "z".into(), "th".into()]);
    FieldGrid::new(vec![ax.clone(), ax], names, values).unwrap()
}

#[test]
fn lp_residual_of_golden_solution_and_perturbation() {
    let d = golden_bundle();
    let l = harmonic_metric(2);
    let rl = reduced_lagrangian(&l, &d, 1).unwrap();
    let w1 = [0.3, -0.2, 0.1, 1.0];
    let w2 = [0.0, 0.0, 0.4, 0.0];
    let grid = golden_lp_grid(11, w1, w2);
    let r = lp_residual(&rl, &grid).unwrap();
    assert!(r.max() < 1e-8, "{}", r.max());

    let mut spiked = grid.clone();
    let node = spiked.node_index(&[5, 5]);
    let col = spiked.names.iter().position(|s| s == "w1_x").unwrap();
    let dim = spiked.dim();
    spiked.values[node * dim + col] += 0.01;
    assert!(lp_residual(&rl, &spiked).unwrap().max() > 1e-3);

    let too_small = golden_lp_grid(2, w1, w2);
    assert!(matches!(lp_residual(&rl, &too_small), Err(Error::GridTooSmall(_))));
}

#[test]
fn euler_poincare_abelian_and_rigid_body_cases() {
    let v = ["a", "b", "c"];
    let l = identity_metric(3, 1, &v);
    let ab = crate::symmetry::PrincipalBundleData::new(
        0,
        crate::geometry::algebra::LieAlgebraData::abelian(3),
        Vec::new(),
        (0..3).map(|i| (0..3).map(|j| cexpr(if i == j { "1" } else { "0" }, &v)).collect()).collect(),
        (0..3).map(|i| (0..3).map(|j| cexpr(if i == j { "1" } else { "0" }, &v)).collect()).collect(),
        vec![0.0; 3],
        None,
    )
    .unwrap();
    let rl = reduced_lagrangian(&l, &ab, 0).unwrap();
    let ep = euler_poincare_rhs(rl).unwrap();
    assert_eq!(ep.component(0, &[0.3, 0.2, -1.0]).unwrap(), vec![0.0; 3]);

    let mut c = vec![0.0; 27];
    for (i, j, kk) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[(kk * 3 + i) * 3 + j] = 1.0;
        c[(kk * 3 + j) * 3 + i] = -1.0;
    }
    let so3 =
        crate::symmetry::PrincipalBundleData { algebra: crate::geometry::algebra::LieAlgebraData::from_f64(3, &c).unwrap(), ..ab.clone() };
    let rl = ReducedLagrangian { lagrangian: &l, data: &so3, layout: LpLayout::new(0, 3, 1) };
    let ep = euler_poincare_rhs(rl).unwrap();
    let out = ep.component(0, &[0.3, 0.2, -1.0]).unwrap();
    assert!(out.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn euler_poincare_on_the_four_dimensional_algebra() {
    // l = ½|w|²: R^a = −C^b_{ac} w^c w^b. With w = (1, 0, 0, 2) only R^y = w^x w^θ = 2 survives.
    let d = group_only();
    let l = identity_metric(4, 1, &["x", "y", "z", "th"]);
    let rl = ReducedLagrangian { lagrangian: &l, data: &d, layout: LpLayout::new(0, 4, 1) };
    let ep = euler_poincare_rhs(rl).unwrap();
    let out = ep.component(0, &[1.0, 0.0, 0.0, 2.0]).unwrap();
    assert!(max_diff(&out, &[0.0, 2.0, 0.0, 0.0]) < 1e-13, "{out:?}");

    let l2 = identity_metric(4, 2, &["x", "y", "z", "th"]);
    let rl = ReducedLagrangian { lagrangian: &l2, data: &d, layout: LpLayout::new(0, 4, 2) };
    let ep = euler_poincare_rhs(rl).unwrap();
    // Direction 2 only sees its own block: w_2 = (0, 1, 0, 1) gives R_2^x = −C^y_{xθ} w^θ w^y = −1.
    let y = [1.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 1.0];
    let out = ep.component(1, &y).unwrap();
    assert!(max_diff(&out, &[0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0]) < 1e-13, "{out:?}");
}

#[test]
fn euler_poincare_requires_no_base() {
    let d = golden_bundle();
    let l = harmonic_metric(1);
    let rl = reduced_lagrangian(&l, &d, 0).unwrap();
    assert!(euler_poincare_rhs(rl).is_err());
}

#[test]
fn lp_state_round_trip() {
    let s = LpState::new(vec![0.1], vec![vec![1.0], vec![2.0]], vec![vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
    let flat = s.to_flat();
    assert_eq!(flat, vec![0.1, 1.0, 3.0, 4.0, 2.0, 5.0, 6.0]);
    assert_eq!(LpState::from_flat(s.layout(), &flat).unwrap(), s);
}
