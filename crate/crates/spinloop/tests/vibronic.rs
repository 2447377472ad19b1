use nalgebra::{DMatrix, Matrix2};
use spinloop::multiplets::OscillatorBasis;
use spinloop::presets::load_preset;
use spinloop::vibronic::*;
use spinloop::Error;

/// Ladder operators on a 1D basis cut at `m`, then x = (a + a†)/√2.
fn x_1d(m: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m + 1, m + 1);
    for n in 1..=m {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    (&a + a.transpose()) / 2f64.sqrt()
}

/// Kronecker-product DJT Hamiltonian on the n, m ≤ N+2 product space,
/// restricted afterwards to n + m ≤ N and laid out like the library basis.
fn naive_djt(p: &JtParameters, n_max: usize) -> DMatrix<f64> {
    let cut = n_max + 2;
    let d1 = cut + 1;
    let x1 = x_1d(cut);
    let id1 = DMatrix::<f64>::identity(d1, d1);
    let num1 = DMatrix::from_fn(d1, d1, |r, c| if r == c { r as f64 } else { 0.0 });
    let xx = x1.kronecker(&id1);
    let yy = id1.kronecker(&x1);
    let nn = num1.kronecker(&id1) + id1.kronecker(&num1);
    let one = DMatrix::<f64>::identity(d1 * d1, d1 * d1);
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let i2 = DMatrix::<f64>::identity(2, 2);
    let full = i2.kronecker(&((&nn + &one) * p.hw))
        + sz.kronecker(&(&xx * p.f))
        - sx.kronecker(&(&yy * p.f))
        + sz.kronecker(&((&xx * &xx - &yy * &yy) * p.g))
        + sx.kronecker(&((&xx * &yy) * (2.0 * p.g)));
    let basis = OscillatorBasis::new(n_max);
    let d = basis.len();
    let full_index = |e: usize, n: usize, m: usize| e * d1 * d1 + n * d1 + m;
    DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let (er, sr) = (r / d, basis.states[r % d]);
        let (ec, sc) = (c / d, basis.states[c % d]);
        full[(full_index(er, sr.n, sr.m), full_index(ec, sc.n, sc.m))]
    })
}

fn pl1() -> spinloop::presets::DefectPreset {
    load_preset("pl1").unwrap()
}

#[test]
fn djt_matches_kronecker_oracle() {
    for n in 1..=2 {
        for &(f, g) in &[(0.0, 0.0), (50.0, 0.0), (70.0, 5.0), (31.0, -3.0)] {
            let p = JtParameters::from_coupling(f, g, 70.0);
            let h = build_djt_hamiltonian(&p, n);
            let o = naive_djt(&p, n);
            assert!((&h - &o).abs().max() < 1e-10, "N={n} F={f} G={g}");
        }
    }
}

#[test]
fn djt_n1_explicit_matrix() {
    let (hw, f) = (60.0, 20.0);
    let p = JtParameters::from_coupling(f, 0.0, hw);
    let h = build_djt_hamiltonian(&p, 1);
    let a = f / 2f64.sqrt();
    // index e·3 + k with k: |0,0⟩, |1,0⟩, |0,1⟩
    let mut want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![hw, 2.0 * hw, 2.0 * hw, hw, 2.0 * hw, 2.0 * hw]));
    for &(r, c, v) in &[(0, 1, a), (3, 4, -a), (0, 5, -a), (2, 3, -a)] {
        want[(r, c)] = v;
        want[(c, r)] = v;
    }
    assert!((h - want).abs().max() < 1e-12);
}

#[test]
fn uncoupled_spectrum_is_harmonic() {
    let p = JtParameters::from_coupling(0.0, 0.0, 70.0);
    let (vals, _) = eigh(&build_djt_hamiltonian(&p, 5));
    let mut k = 0;
    for i in 0..=5 {
        for _ in 0..2 * (i + 1) {
            assert!((vals[k] - 70.0 * (i + 1) as f64).abs() < 1e-10);
            k += 1;
        }
    }
    let sol = solve(&VibronicProblem::djt(p, 5)).unwrap();
    let row0 = sol.table.row(0);
    assert!((row0.c2 - 1.0).abs() < 1e-10);
    let ham = sol.ham.unwrap();
    assert!((ham.p - 1.0).abs() < 1e-10 && (ham.q - 1.0).abs() < 1e-10);
}

#[test]
fn djt_hamiltonian_is_symmetric_and_commutes_with_c3v() {
    let p = JtParameters::from_coupling(60.0, 4.0, 70.0);
    let n = 6;
    let h = build_djt_hamiltonian(&p, n);
    assert!((&h - h.transpose()).abs().max() < 1e-12);

    let basis = OscillatorBasis::new(n);
    let d = basis.len();
    // K = a_x†a_y − a_y†a_x generates rotations in the xy plane
    let mut k = DMatrix::<f64>::zeros(d, d);
    for (c, s) in basis.states.iter().enumerate() {
        if s.m > 0 {
            k[(basis.index(s.n + 1, s.m - 1).unwrap(), c)] += (((s.n + 1) * s.m) as f64).sqrt();
        }
        if s.n > 0 {
            k[(basis.index(s.n - 1, s.m + 1).unwrap(), c)] -= ((s.n * (s.m + 1)) as f64).sqrt();
        }
    }
    let theta = 2.0 * std::f64::consts::PI / 3.0;
    let r_osc = (&k * theta).exp();
    let norm = h.norm();
    let commutes = |u: &DMatrix<f64>| (&h * u - u * &h).abs().max() < 1e-9 * norm;
    let found = [1.0, -1.0].iter().any(|&s: &f64| {
        let a = s * theta;
        let rel = DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()]);
        commutes(&rel.kronecker(&r_osc))
    });
    assert!(found, "no C3 lift commutes with H");

    let refl = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        2 * d,
        [1.0, -1.0].iter().flat_map(|&pe| basis.states.iter().map(move |s| if s.m % 2 == 0 { pe } else { -pe })),
    ));
    assert!(commutes(&refl));
}

#[test]
fn lower_branch_commutes_with_c3() {
    let p = PjtParameters { lambda_e: 500.0, hw: 60.0, e_jt2: 50.0, c2: 0.8, f2: 40.0 };
    let n = 5;
    let h = build_lower_branch_hamiltonian(&p, n);
    assert!((&h - h.transpose()).abs().max() < 1e-12);
    let basis = OscillatorBasis::new(n);
    let d = basis.len();
    let mut k = DMatrix::<f64>::zeros(d, d);
    for (c, s) in basis.states.iter().enumerate() {
        if s.m > 0 {
            k[(basis.index(s.n + 1, s.m - 1).unwrap(), c)] += (((s.n + 1) * s.m) as f64).sqrt();
        }
        if s.n > 0 {
            k[(basis.index(s.n - 1, s.m + 1).unwrap(), c)] -= ((s.n * (s.m + 1)) as f64).sqrt();
        }
    }
    let theta = 2.0 * std::f64::consts::PI / 3.0;
    let r_osc = (&k * theta).exp();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sym_basis = [Matrix2::new(1.0, 0.0, 0.0, 0.0), Matrix2::new(0.0, r, r, 0.0), Matrix2::new(0.0, 0.0, 0.0, 1.0)];
    let norm = h.norm();
    let found = [1.0, -1.0].iter().any(|&s: &f64| {
        let a = s * theta;
        let rot = Matrix2::new(a.cos(), -a.sin(), a.sin(), a.cos());
        let u3 = DMatrix::from_fn(3, 3, |i, j| {
            let m = rot * sym_basis[j] * rot.transpose();
            sym_basis[i].component_mul(&m).sum()
        });
        let u = u3.kronecker(&r_osc);
        (&h * &u - &u * &h).abs().max() < 1e-9 * norm
    });
    assert!(found);
}

#[test]
fn ground_energy_decreases_with_truncation() {
    let p = pl1().jt.params();
    let mut last = f64::INFINITY;
    for n in 2..=8 {
        let e = solve(&VibronicProblem::djt(p, n)).unwrap().ground_energy();
        assert!(e <= last + 1e-10, "N={n}");
        last = e;
    }
}

#[test]
fn ground_energy_converged_at_default_truncation() {
    let p = pl1().jt.params();
    let e10 = solve(&VibronicProblem::djt(p, 10)).unwrap().ground_energy();
    let e14 = solve(&VibronicProblem::djt(p, 14)).unwrap().ground_energy();
    assert!((e10 - e14).abs() < 0.1, "ΔE = {} meV", e10 - e14);
}

#[test]
fn coefficient_tables_are_normalized() {
    let sol = solve(&pl1().jt.problem()).unwrap();
    for t in sol.partner_tables.iter().chain(std::iter::once(&sol.table)) {
        assert!((t.total() - 1.0).abs() < 1e-6);
    }
    assert!(sol.max_residual < 1e-9 * 1e3);
    let sol = solve(&pl1().pjt.problem()).unwrap();
    assert!((sol.table.total() + sol.table.forbidden - 1.0).abs() < 1e-6);
}

#[test]
fn pl1_djt_table() {
    let sol = solve(&pl1().jt.problem()).unwrap();
    let t = &sol.table;
    assert!((t.row(0).c2 - 0.2744).abs() < 0.01);
    assert!((t.row(1).d2 - 0.3283).abs() < 0.01);
    let s = t.sums();
    assert!((s.c2 - 0.524).abs() < 0.01 && (s.d2 - 0.465).abs() < 0.01);
    let ham = sol.ham.unwrap();
    assert!((ham.p - s.c2 + s.d2 - s.f2).abs() < 1e-12);
}

#[test]
fn linear_ham_relation() {
    let p = JtParameters::from_coupling(60.0, 0.0, 70.0);
    let ham = solve(&VibronicProblem::djt(p, 10)).unwrap().ham.unwrap();
    assert!((ham.q - (1.0 + ham.p) / 2.0).abs() < 0.05);
}

#[test]
fn partition_rules_agree_on_d_channel() {
    let p = pl1().jt.params();
    let a = solve(&VibronicProblem::djt(p, 8)).unwrap();
    let b = solve(&VibronicProblem::djt(p, 8).with_partition(PartitionRule::ReflectionParity)).unwrap();
    assert!((a.table.sums().d2 - b.table.sums().d2).abs() < 1e-9);
    let (sa, sb) = (a.table.sums(), b.table.sums());
    assert!((sa.c2 + sa.f2 - sb.c2 - sb.f2).abs() < 1e-9);
}

#[test]
fn lower_branch_uncoupled_limit() {
    let p = PjtParameters { lambda_e: 500.0, hw: 60.0, e_jt2: 0.0, c2: 0.9, f2: 0.0 };
    let sol = solve(&VibronicProblem::lower_branch(p, 4)).unwrap();
    assert!((sol.eigenvalues[0] - 60.0).abs() < 1e-10);
    assert!((sol.eigenvalues[1] - 60.0).abs() < 1e-10);
    assert!((sol.table.row(0).c2 - 1.0).abs() < 1e-10);
}

#[test]
fn lower_branch_full_mixing_has_no_weak_channel() {
    let base = PjtParameters { lambda_e: 600.0, hw: 60.0, e_jt2: 0.0, c2: 1.0, f2: 30.0 };
    let n = 4;
    let h = build_lower_branch_hamiltonian(&base, n);
    let h0 = build_lower_branch_hamiltonian(&PjtParameters { f2: 0.0, ..base }, n);
    let ops = OscillatorOperators::new(n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sz = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
    let sx = DMatrix::from_row_slice(3, 3, &[0.0, -r, 0.0, -r, 0.0, -r, 0.0, -r, 0.0]);
    let want = (sz.kronecker(&ops.x) - sx.kronecker(&ops.y)) * (2.0 * base.f2);
    assert!((h - h0 - want).abs().max() < 1e-12);
}

#[test]
fn lower_branch_presets() {
    let sol = solve(&load_preset("plx1").unwrap().pjt.problem()).unwrap();
    assert!((sol.table.row(0).c2 - 0.96).abs() < 0.005);
    assert!((sol.table.sums().d2 - 0.007).abs() < 0.005);
    assert!(sol.table.forbidden < 1e-8);
    let sol = solve(&pl1().pjt.problem()).unwrap();
    assert!(sol.eigenvalues[1] - sol.eigenvalues[0] < 1e-6 * 60.0);
    assert!(matches!(ham_factors(&sol), Err(Error::InvalidInput(_))));
    assert!(sol.ham.is_none());
}

#[test]
fn nondegenerate_ground_is_reported() {
    let p = PjtParameters { lambda_e: -200.0, hw: 60.0, e_jt2: 10.0, c2: 0.9, f2: 20.0 };
    assert!(matches!(solve(&VibronicProblem::lower_branch(p, 4)), Err(Error::SymmetryBreaking { .. })));
}

#[test]
fn apes_inversion_examples() {
    let lin = jt_params_from_apes(100.0, 0.0, 70.0).unwrap();
    assert!((lin.f - (2.0f64 * 70.0 * 100.0).sqrt()).abs() < 1e-10 && lin.g == 0.0);
    for &(e, d, hw) in &[(42.0, 2.0, 77.0), (150.0, 20.0, 65.0), (10.0, 9.0, 30.0)] {
        let p = jt_params_from_apes(e, d, hw).unwrap();
        let e_back = p.f * p.f / (2.0 * (hw - 2.0 * p.g));
        let d_back = 4.0 * e_back * p.g / (hw + 2.0 * p.g);
        assert!((e_back - e).abs() < 1e-9 && (d_back - d).abs() < 1e-9);
    }
    assert!(jt_params_from_apes(10.0, 10.0, 70.0).is_err());
    assert!(jt_params_from_apes(-1.0, 0.0, 70.0).is_err());
}

#[test]
fn mixing_and_f2_relations() {
    assert!((mixing_from_amplitudes(0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((mixing_from_amplitudes(r, r).unwrap() - 0.5).abs() < 1e-15);
    assert!(mixing_from_amplitudes(1.0, 1.0).is_err());
    let f2 = f2_from_apes(60.0, 30.0, 0.5);
    assert!((f2 - (2.0f64 * 60.0 * 30.0).sqrt() / 1.5).abs() < 1e-12);
}
