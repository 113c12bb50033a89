mod common;

use assocnorm::functionals::{G_CAL, G_FRAK};
use assocnorm::*;
use common::oracle;

fn linear() -> EquilibriumSolution {
    let pair = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
    EquilibriumSolution::new(pair).unwrap()
}

fn unit_pair() -> WeightPair {
    WeightPair::new(Weight::unit(), Weight::unit(), 2.0).unwrap()
}

#[test]
fn power_integrals() {
    let q = QuadratureSpec::default();
    let x = Weight::power(1.0, 1.0).unwrap();
    assert!((integrate_power(&x, -2.0, 1.0, 2.0, &q).unwrap() - 0.5).abs() < 1e-14);
    assert!((integrate_power(&Weight::unit(), 3.0, 0.0, 3.0, &q).unwrap() - 3.0).abs() < 1e-14);
    let root = Weight::power(1.0, 0.5).unwrap();
    assert!((integrate_power(&root, 2.0, 0.0, 1.0, &q).unwrap() - 0.5).abs() < 1e-14);
    let custom = Weight::custom("sqrt", f64::sqrt);
    assert!((integrate_power(&custom, 2.0, 0.0, 1.0, &q).unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn divergence_condition_examples() {
    let lin = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
    assert_eq!(lin.check_divergence_condition(1.0).unwrap().satisfied(), Some(true));
    assert_eq!(unit_pair().check_divergence_condition(1.0).unwrap().satisfied(), Some(false));
    let rec = WeightPair::new(Weight::power(1.0, -1.0).unwrap(), Weight::unit(), 2.0).unwrap();
    assert_eq!(rec.check_divergence_condition(1.0).unwrap().satisfied(), Some(true));
}

#[test]
fn windows_match_closed_forms() {
    let sol = linear();
    let (alpha, beta) = oracle::linear_ratios();
    for t in [1.0, 2.0, 0.01, 300.0] {
        let (a, b) = sol.window(t).unwrap();
        assert!((a - alpha * t).abs() < 1e-12 * t && (b - beta * t).abs() < 1e-12 * t, "{t}");
    }
    let (a, b) = sol.window(2.0).unwrap();
    assert!((a - 1.3819660113).abs() < 1e-9 && (b - 3.6180339887).abs() < 1e-9);

    let rec = EquilibriumSolution::new(
        WeightPair::new(Weight::power(1.0, -1.0).unwrap(), Weight::unit(), 2.0).unwrap(),
    )
    .unwrap();
    for t in [0.3, 1.0, 7.0] {
        let (a, b) = rec.window(t).unwrap();
        let (ea, eb) = oracle::reciprocal_window(t);
        assert!((a - ea).abs() < 1e-12 * t && (b - eb).abs() < 1e-12 * t);
    }
}

#[test]
fn grids_match_closed_forms() {
    let sol = linear();
    let grid = build_eta_grid(&sol, 2).unwrap();
    assert_eq!(grid.eta(0), Some(1.0));
    let rho = oracle::linear_rho();
    for k in -2..=2i64 {
        let want = rho.powi(k as i32);
        assert!((grid.eta(k).unwrap() - want).abs() < 1e-12 * want, "k={k}");
    }
    let unit = EquilibriumSolution::new_unchecked(unit_pair());
    let g = build_eta_grid(&unit, 3).unwrap();
    assert!((g.eta(1).unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(g.eta(0), Some(1.0));
}

#[test]
fn sobolev_hat_values() {
    let hat = HalfLineFunction::hat(0.0, 1.0, 2.0, 1.0).unwrap();
    let q = QuadratureSpec::default();
    let a = sobolev_norm(&hat, &unit_pair(), &q).unwrap().value;
    assert!((a - 2.2307).abs() < 1e-4);
    let lin = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
    let b = sobolev_norm(&hat, &lin, &q).unwrap().value;
    assert!((b - 2.4495).abs() < 1e-4);
}

#[test]
fn strong_norm_matches_closed_form() {
    let sol = linear();
    let g = HalfLineFunction::indicator(1.0, 2.0);
    let got = strong_norm(&g, &sol, &QuadratureSpec::default()).unwrap().value;
    let want = oracle::linear_strong_indicator();
    assert!((got - want).abs() < 1e-9 * want, "{got} {want}");
}

#[test]
fn strong_norm_matches_nested_simpson() {
    let sol = linear();
    let zig = HalfLineFunction::piecewise_linear("zig", vec![(1.0, 0.0), (1.3, 1.0), (1.8, -0.7), (2.2, 0.0)]).unwrap();
    let z = zig.clone();
    let f = move |x: f64| z.evaluate(x);
    let want = oracle::linear_strong(&f, 1.0, 2.2, &[1.0, 1.3, 1.8, 2.2], 400);
    let got = strong_norm(&zig, &sol, &QuadratureSpec::default()).unwrap().value;
    assert!((got - want).abs() < 1e-7 * want, "{got} {want}");
}

#[test]
fn weak_norm_matches_nested_simpson() {
    let sol = linear();
    let q = QuadratureSpec::default();
    let zig = HalfLineFunction::piecewise_linear("zig", vec![(1.0, 0.0), (1.3, 1.0), (1.8, -0.7), (2.2, 0.0)]).unwrap();
    let z = zig.clone();
    let f = move |x: f64| z.evaluate(x);
    let (frak, cal) = oracle::linear_weak(&f, 1.0, 2.2, &[1.0, 1.3, 1.8, 2.2], 400);
    let r = weak_norm(&zig, &sol, &q).unwrap();
    assert!((r.component(G_FRAK).unwrap() - frak).abs() < 1e-7 * frak, "{r:?} {frak}");
    assert!((r.component(G_CAL).unwrap() - cal).abs() < 1e-7 * cal, "{r:?} {cal}");
}

#[test]
fn weak_norm_indicator_resolution_doubling() {
    let sol = linear();
    let g = HalfLineFunction::indicator(1.0, 2.0);
    let q = QuadratureSpec::default();
    let a = weak_norm(&g, &sol, &q).unwrap().value;
    let b = weak_norm(&g, &sol, &q.tightened(2.0)).unwrap().value;
    assert!((a - b).abs() < 1e-6);
    let s = strong_norm(&g, &sol, &q).unwrap().value;
    let sb = strong_norm(&g, &sol, &q.tightened(2.0)).unwrap().value;
    assert!((s - sb).abs() < 1e-6);
}

#[test]
fn unit_weight_closed_form_first_term() {
    let q = QuadratureSpec::default();
    let r = remark_unit_norm(&HalfLineFunction::indicator(1.0, 2.0), &unit_pair(), &q).unwrap();
    assert!((r.component("first").unwrap().powi(2) - 5.0 / 24.0).abs() < 1e-10);
    let r2 = remark_unit_norm(&HalfLineFunction::indicator(1.0, 2.0), &unit_pair(), &q.tightened(2.0)).unwrap();
    assert!((r.value - r2.value).abs() < 1e-6);
    assert_eq!(remark_unit_norm(&HalfLineFunction::zero(), &unit_pair(), &q).unwrap().value, 0.0);
}

#[test]
fn truncation_keeps_covered_support() {
    let sol = linear();
    let grid = build_eta_grid(&sol, 2).unwrap();
    let g = HalfLineFunction::indicator(1.0, 2.0);
    let t = truncate(&g, &grid, 2).unwrap();
    for i in 0..=200 {
        let x = 0.5 + i as f64 * 0.01;
        assert_eq!(t.evaluate(x), g.evaluate(x));
    }
}

#[test]
fn witness_pairings_are_harmonic() {
    let sol = linear();
    let f = HalfLineFunction::new("one", |_| 1.0);
    let segs: Vec<(f64, f64)> = (1..=20).map(|k| (k as f64 + 1.0, k as f64 + 2.0)).collect();
    let w = witness_unbounded(&f, &segs, &sol, 6, &QuadratureSpec::default()).unwrap();
    for (k, p) in w.partial_pairings.iter().enumerate() {
        assert!((p - oracle::harmonic(k + 1)).abs() < 1e-9);
    }
    let compact = HalfLineFunction::indicator(1.0, 2.0);
    assert!(matches!(
        witness_terms(&compact, &segs, 3, &QuadratureSpec::default()),
        Err(Error::SegmentRejected { index: 1, .. })
    ));
}

#[test]
fn oscillator_pairs_to_zero_against_inverse_window_mass() {
    let sol = linear();
    let one = HalfLineFunction::new("one", |_| 1.0);
    let (g, _) = oscillator(&one, 1.0, 2.0, 0.05, &sol, DensityMode::Normalized).unwrap();
    let inv = HalfLineFunction::new("1/V1", |x| 1.0 / oracle::linear_v1(x)).with_support(0.5, 3.0);
    let v = pairing(&inv, &g, &QuadratureSpec::default()).unwrap().value;
    assert!(v.abs() < 1e-9, "{v}");
}

#[test]
fn embedding_ratio_is_stable() {
    let sol = linear();
    let g = HalfLineFunction::indicator(1.0, 2.0);
    let q = QuadratureSpec::default();
    let a = verify_embedding(&g, &sol, &q).unwrap().ratio;
    let b = verify_embedding(&g, &sol, &q.tightened(10.0)).unwrap().ratio;
    assert!(a.is_finite() && a > 0.0);
    assert!((a / b - 1.0).abs() < 0.01);
}

#[test]
fn divergence_ratio_doubles_with_mass() {
    let sol = linear();
    let q = QuadratureSpec::default();
    let one = HalfLineFunction::indicator(1.0, 2.0);
    let two = one.scale(2.0);
    let a = verify_strong_of_weak_zero(&one, &[(1.0, 2.0)], &[0.05], &sol, &q).unwrap();
    let b = verify_strong_of_weak_zero(&two, &[(1.0, 2.0)], &[0.05], &sol, &q).unwrap();
    assert!((b[0].ratio / a[0].ratio - 2.0).abs() < 1e-9);
}

#[test]
fn extremal_bound_is_recorded_finite() {
    let sol = linear();
    let grid = build_eta_grid(&sol, 5).unwrap();
    let q = QuadratureSpec::default();
    let g = HalfLineFunction::indicator(1.0, 2.0);
    let f1 = extremal_f(&g, &grid, 0, 1, 3, &q).unwrap();
    let s = sobolev_norm(&f1, sol.pair(), &q).unwrap();
    let v0_part = s.component("v0_f").unwrap();
    let blocks = block_norm(&g, &grid, &q).unwrap().block_sum(0, Some(3));
    assert!(v0_part.is_finite() && blocks > 0.0);
    assert!(extremal_f(&HalfLineFunction::zero(), &grid, 0, 1, 3, &q).unwrap().evaluate(1.5) == 0.0);
}

#[test]
fn block_ratio_recorded_for_indicator() {
    let sol = linear();
    let grid = build_eta_grid(&sol, 4).unwrap();
    let g = HalfLineFunction::indicator(1.0, 2.0);
    let q = QuadratureSpec::default();
    let r = block_norm(&g, &grid, &q).unwrap().report.value / weak_norm(&g, &sol, &q).unwrap().value;
    let rt = block_norm(&g, &grid, &q.tightened(10.0)).unwrap().report.value
        / weak_norm(&g, &sol, &q.tightened(10.0)).unwrap().value;
    assert!(r > 0.01 && r < 100.0);
    assert!((r / rt - 1.0).abs() < 0.01);
}
