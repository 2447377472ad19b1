use spinloop::presets::load_preset;
use spinloop::spectral::*;
use spinloop::Error;
use std::f64::consts::PI;

fn gauss(x: f64, s: f64) -> f64 {
    (-0.5 * (x / s).powi(2)).exp() / (s * (2.0 * PI).sqrt())
}

fn poisson(n: usize, s: f64) -> f64 {
    (0..n).fold((-s).exp(), |w, k| w * s / (k + 1) as f64)
}

#[test]
fn zero_coupling_is_a_gaussian() {
    let f = build_lineshape(&HuangRhysModel::single(0.0, 40.0, 8.0)).unwrap();
    for e in [-20.0, -3.5, 0.0, 7.0, 30.0] {
        assert!((f.value_at(e) - gauss(e, 8.0)).abs() < 1e-8, "E = {e}");
    }
    assert!(f.normalization_residual < 1e-8);
}

#[test]
fn unit_coupling_has_equal_first_two_sticks() {
    let sticks = HuangRhysModel::single(1.0, 40.0, 8.0).sticks();
    assert!((sticks[0].1 - (-1.0f64).exp()).abs() < 1e-15);
    assert!((sticks[1].1 - sticks[0].1).abs() < 1e-15);
    assert!((sticks[1].0 - 40.0).abs() < 1e-15);
}

#[test]
fn two_modes_match_double_sum() {
    let model = HuangRhysModel {
        modes: vec![HrMode { s: 1.3, hw: 25.0 }, HrMode { s: 0.7, hw: 61.0 }],
        sigma: 6.0,
        de: 0.5,
        e_max: 500.0,
    };
    let f = build_lineshape(&model).unwrap();
    let raw = |e: f64| {
        let mut v = 0.0;
        for n in 0..40 {
            for m in 0..40 {
                v += poisson(n, 1.3) * poisson(m, 0.7) * gauss(e - 25.0 * n as f64 - 61.0 * m as f64, 6.0);
            }
        }
        v
    };
    // the library rescales by the trapezoid norm, so compare shapes
    let ratios: Vec<f64> = [0.0, 12.5, 25.0, 61.0, 86.0, 150.0, 333.0].iter().map(|&e| f.value_at(e) / raw(e)).collect();
    for r in &ratios {
        assert!((r / ratios[0] - 1.0).abs() < 1e-9);
    }
    assert!((ratios[0] - 1.0).abs() < 1e-3);
}

#[test]
fn grid_resolution_is_enforced() {
    let mut m = HuangRhysModel::single(2.0, 40.0, 2.0);
    m.de = 1.5;
    assert!(matches!(build_lineshape(&m), Err(Error::Resolution { .. })));
    assert!(build_lineshape(&HuangRhysModel::single(-1.0, 40.0, 8.0)).is_err());
}

#[test]
fn normalization_and_first_moment() {
    let f = build_lineshape(&HuangRhysModel::single(2.0, 30.0, 5.0)).unwrap();
    assert!((f.norm() - 1.0).abs() < 1e-12);
    assert!((f.first_moment() - 60.0).abs() < 1e-4);
}

#[test]
fn refinement_changes_little() {
    let coarse = build_lineshape(&HuangRhysModel::single(2.5, 23.5, 8.0)).unwrap();
    let mut m = HuangRhysModel::single(2.5, 23.5, 8.0);
    m.de = 0.25;
    let fine = build_lineshape(&m).unwrap();
    for e in [0.0, 46.21, 100.0, 160.0] {
        let (a, b) = (coarse.value_at(e), fine.value_at(e));
        assert!((a - b).abs() <= 0.01 * b.abs().max(1e-12), "E = {e}");
    }
}

#[test]
fn interpolation_and_shift() {
    let f = build_lineshape(&HuangRhysModel::single(1.0, 40.0, 8.0)).unwrap();
    for k in [0, 17, 300] {
        assert_eq!(f.value_at(f.e0 + k as f64 * f.de), f.values[k]);
    }
    let mid = f.e0 + 10.5 * f.de;
    assert!((f.value_at(mid) - 0.5 * (f.values[10] + f.values[11])).abs() < 1e-15);
    assert_eq!(evaluate_shifted(&f, 10.0, 10.0 - f.e0 + 1.0), 0.0);
    assert_eq!(f.value_at(f.e_end() + 1.0), 0.0);
    assert_eq!(evaluate_shifted(&f, 160.0, 40.0), f.value_at(120.0));
    let v = evaluate_shifted(&f, 160.0, 113.79);
    assert!(v.is_finite() && v > 0.0);
}

#[test]
fn ccd_preset_has_no_crossing() {
    let p = load_preset("pl1").unwrap();
    let r = ccd_crossing(&p.ccd.model(), p.ccd.q_range.value).unwrap();
    assert!(!r.has_crossing());
    assert!((r.huang_rhys - 2.365).abs() < 0.01);
}

#[test]
fn ccd_degenerate_minima_cross_midway() {
    let m = CcdModel { dq: 1.0, de: 0.0, hw_g: 40.0, hw_e: 40.0 };
    let r = ccd_crossing(&m, 3.0).unwrap();
    assert_eq!(r.crossings.len(), 1);
    assert!((r.crossings[0] - 0.5).abs() < 1e-12);
}

#[test]
fn ccd_crossings_are_roots() {
    let m = CcdModel { dq: 1.2, de: 0.2, hw_g: 30.0, hw_e: 50.0 };
    let r = ccd_crossing(&m, 10.0).unwrap();
    assert!(r.has_crossing());
    for q in &r.crossings {
        let (g, e) = m.energies(*q);
        assert!((g - e).abs() < 1e-9 * g.abs().max(1.0));
    }
    assert!(ccd_crossing(&CcdModel { hw_g: 0.0, ..m }, 3.0).is_err());
}
