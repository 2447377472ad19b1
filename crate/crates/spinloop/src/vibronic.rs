//! E⊗e dynamic Jahn–Teller and lower-branch (PJT + DJT) vibronic solvers.
//!
//! Matrices are laid out electronic-major: index `e * d + k` with `k` the
//! [`OscillatorBasis`] index and `d` its size.

use crate::multiplets::{classify_oscillator_level, OscillatorBasis, SectorIrrep, VibrationalIrrepSector};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DJT_N_MAX: usize = 10;
pub const DEFAULT_LOWER_N_MAX: usize = 10;

/// Linear and quadratic E⊗e coupling, all in meV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JtParameters {
    pub e_jt: f64,
    pub delta_jt: f64,
    pub hw: f64,
    pub f: f64,
    pub g: f64,
}

impl JtParameters {
    /// Coupling given directly; E_JT and δ are filled from the quadratic
    /// relations.
    pub fn from_coupling(f: f64, g: f64, hw: f64) -> Self {
        let e_jt = f * f / (2.0 * (hw - 2.0 * g));
        let delta_jt = 4.0 * e_jt * g / (hw + 2.0 * g);
        JtParameters { e_jt, delta_jt, hw, f, g }
    }
}

/// Invert the quadratic E⊗e APES relations
/// E_JT = F²/(2(ħω − 2G)), δ = 4·E_JT·G/(ħω + 2G).
///
/// Eliminating F leaves δ(ħω + 2G) = 4·E_JT·G, linear in G. With δ = 0
/// this is the linear result F = √(2ħω·E_JT).
pub fn jt_params_from_apes(e_jt: f64, delta_jt: f64, hw: f64) -> Result<JtParameters> {
    if !(e_jt > 0.0 && hw > 0.0) || !(delta_jt >= 0.0 && delta_jt < e_jt) {
        return Err(Error::InvalidInput(format!(
            "need E_JT > 0, ħω > 0, 0 ≤ δ < E_JT (got {e_jt}, {delta_jt}, {hw})"
        )));
    }
    let g = delta_jt * hw / (4.0 * e_jt - 2.0 * delta_jt);
    if !(g >= 0.0 && 2.0 * g < hw) {
        return Err(Error::NoConvergence(format!("no G in [0, ħω/2) for δ = {delta_jt} meV")));
    }
    let f = (2.0 * e_jt * (hw - 2.0 * g)).sqrt();
    Ok(JtParameters { e_jt, delta_jt, hw, f, g })
}

/// Lower-branch parameters (meV except the mixing weight C²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PjtParameters {
    pub lambda_e: f64,
    pub hw: f64,
    pub e_jt2: f64,
    pub c2: f64,
    pub f2: f64,
}

pub fn f2_from_apes(hw: f64, e_jt2: f64, c2: f64) -> f64 {
    (2.0 * hw * e_jt2).sqrt() / (1.0 + c2)
}

/// C² = 1 − 2·p²·s² from the p- and s-like orbital amplitudes.
pub fn mixing_from_amplitudes(p_amp: f64, s_amp: f64) -> Result<f64> {
    if p_amp * p_amp + s_amp * s_amp > 1.0 + 1e-9 {
        return Err(Error::InvalidInput("amplitudes exceed unit norm".into()));
    }
    Ok(1.0 - 2.0 * p_amp * p_amp * s_amp * s_amp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    Djt,
    LowerBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coupling {
    Djt(JtParameters),
    LowerBranch(PjtParameters),
}

/// How A-type (l ≡ 0 mod 3) oscillator weight is assigned to the A1 and A2
/// phonon channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PartitionRule {
    /// l = 0 counts as A1; each |l| = 3k > 0 pair is shared equally.
    #[default]
    OrientationAveraged,
    /// A1 = even, A2 = odd under y ↦ −y.
    ReflectionParity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VibronicProblem {
    pub coupling: Coupling,
    pub n_max: usize,
    pub partition: PartitionRule,
}

impl VibronicProblem {
    pub fn djt(params: JtParameters, n_max: usize) -> Self {
        VibronicProblem { coupling: Coupling::Djt(params), n_max, partition: PartitionRule::default() }
    }

    pub fn lower_branch(params: PjtParameters, n_max: usize) -> Self {
        VibronicProblem { coupling: Coupling::LowerBranch(params), n_max, partition: PartitionRule::default() }
    }

    pub fn with_partition(mut self, rule: PartitionRule) -> Self {
        self.partition = rule;
        self
    }

    pub fn kind(&self) -> ProblemKind {
        match self.coupling {
            Coupling::Djt(_) => ProblemKind::Djt,
            Coupling::LowerBranch(_) => ProblemKind::LowerBranch,
        }
    }

    pub fn electronic_dim(&self) -> usize {
        match self.kind() {
            ProblemKind::Djt => 2,
            ProblemKind::LowerBranch => 3,
        }
    }

    pub fn dim(&self) -> usize {
        self.electronic_dim() * OscillatorBasis::dim(self.n_max)
    }

    pub fn hw(&self) -> f64 {
        match self.coupling {
            Coupling::Djt(p) => p.hw,
            Coupling::LowerBranch(p) => p.hw,
        }
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        match self.coupling {
            Coupling::Djt(p) => build_djt_hamiltonian(&p, self.n_max),
            Coupling::LowerBranch(p) => build_lower_branch_hamiltonian(&p, self.n_max),
        }
    }

    /// Parity of each electronic component under y ↦ −y.
    fn electronic_parity(&self) -> &'static [f64] {
        match self.kind() {
            ProblemKind::Djt => &[1.0, -1.0],
            ProblemKind::LowerBranch => &[1.0, -1.0, 1.0],
        }
    }
}

fn x_elem(np: usize, n: usize) -> f64 {
    if np == n + 1 {
        ((n + 1) as f64 / 2.0).sqrt()
    } else if n > 0 && np + 1 == n {
        (n as f64 / 2.0).sqrt()
    } else {
        0.0
    }
}

fn x2_elem(np: usize, n: usize) -> f64 {
    if np == n {
        (2 * n + 1) as f64 / 2.0
    } else if np == n + 2 {
        (((n + 1) * (n + 2)) as f64).sqrt() / 2.0
    } else if n >= 2 && np + 2 == n {
        ((n * (n - 1)) as f64).sqrt() / 2.0
    } else {
        0.0
    }
}

/// Oscillator operators on the truncated two-mode basis. Each matrix entry
/// is the exact (untruncated) matrix element, so products like x² are not
/// distorted at the truncation edge.
pub struct OscillatorOperators {
    pub basis: OscillatorBasis,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub x2: DMatrix<f64>,
    pub y2: DMatrix<f64>,
    pub xy: DMatrix<f64>,
    pub number: DMatrix<f64>,
}

impl OscillatorOperators {
    pub fn new(n_max: usize) -> Self {
        let basis = OscillatorBasis::new(n_max);
        let d = basis.len();
        let build = |f: &dyn Fn(usize, usize, usize, usize) -> f64| {
            DMatrix::from_fn(d, d, |r, c| {
                let (a, b) = (basis.states[r], basis.states[c]);
                f(a.n, a.m, b.n, b.m)
            })
        };
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let x = build(&|n1, m1, n0, m0| x_elem(n1, n0) * delta(m1, m0));
        let y = build(&|n1, m1, n0, m0| x_elem(m1, m0) * delta(n1, n0));
        let x2 = build(&|n1, m1, n0, m0| x2_elem(n1, n0) * delta(m1, m0));
        let y2 = build(&|n1, m1, n0, m0| x2_elem(m1, m0) * delta(n1, n0));
        let xy = build(&|n1, m1, n0, m0| x_elem(n1, n0) * x_elem(m1, m0));
        let number = build(&|n1, m1, n0, m0| ((n0 + m0) as f64) * delta(n1, n0) * delta(m1, m0));
        OscillatorOperators { basis, x, y, x2, y2, xy, number }
    }
}

fn add_kron(h: &mut DMatrix<f64>, el: &[&[f64]], op: &DMatrix<f64>, scale: f64) {
    let d = op.nrows();
    for (a, row) in el.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut block = h.view_mut((a * d, b * d), (d, d));
            block += op * (v * scale);
        }
    }
}

/// H = ħω(n̂ₓ+n̂ᵧ+1) + F(x̂σ_z − ŷσ_x) + G((x̂²−ŷ²)σ_z + 2x̂ŷσ_x) over {e_x, e_y}.
pub fn build_djt_hamiltonian(p: &JtParameters, n_max: usize) -> DMatrix<f64> {
    let ops = OscillatorOperators::new(n_max);
    let d = ops.basis.len();
    let mut h = DMatrix::zeros(2 * d, 2 * d);
    let id2: [&[f64]; 2] = [&[1.0, 0.0], &[0.0, 1.0]];
    let sz: [&[f64]; 2] = [&[1.0, 0.0], &[0.0, -1.0]];
    let sx: [&[f64]; 2] = [&[0.0, 1.0], &[1.0, 0.0]];
    let osc = &ops.number + DMatrix::identity(d, d);
    add_kron(&mut h, &id2, &osc, p.hw);
    add_kron(&mut h, &sz, &ops.x, p.f);
    add_kron(&mut h, &sx, &ops.y, -p.f);
    add_kron(&mut h, &sz, &(&ops.x2 - &ops.y2), p.g);
    add_kron(&mut h, &sx, &ops.xy, 2.0 * p.g);
    h
}

/// Lower-branch Hamiltonian over {|xx⟩, |xy⟩, |yy⟩}:
/// H_e + ħω(n̂+1) + C²·2F₂(σ_z x̂ − σ_x ŷ) + (1−C²)·F₂(σ̄_z x̂ − σ̄_x ŷ).
pub fn build_lower_branch_hamiltonian(p: &PjtParameters, n_max: usize) -> DMatrix<f64> {
    let ops = OscillatorOperators::new(n_max);
    let d = ops.basis.len();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = DMatrix::zeros(3 * d, 3 * d);
    let id = DMatrix::identity(d, d);
    let he: [&[f64]; 3] = [&[1.0, 0.0, 1.0], &[0.0, 0.0, 0.0], &[1.0, 0.0, 1.0]];
    let id3: [&[f64]; 3] = [&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]];
    let sz: [&[f64]; 3] = [&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, -1.0]];
    let sx: [&[f64]; 3] = [&[0.0, -r, 0.0], &[-r, 0.0, -r], &[0.0, -r, 0.0]];
    let bz: [&[f64]; 3] = [&[-0.5, 0.0, 0.5], &[0.0, 1.0, 0.0], &[0.5, 0.0, -0.5]];
    let bx: [&[f64]; 3] = [&[0.0, -r, 0.0], &[-r, 0.0, r], &[0.0, r, 0.0]];
    add_kron(&mut h, &he, &id, p.lambda_e / 2.0);
    add_kron(&mut h, &id3, &(&ops.number + &id), p.hw);
    let strong = p.c2 * 2.0 * p.f2;
    add_kron(&mut h, &sz, &ops.x, strong);
    add_kron(&mut h, &sx, &ops.y, -strong);
    let weak = (1.0 - p.c2) * p.f2;
    add_kron(&mut h, &bz, &ops.x, weak);
    add_kron(&mut h, &bx, &ops.y, -weak);
    h
}

/// One row of a coefficient table. For DJT solutions `g2` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CoefficientRow {
    pub i: usize,
    pub c2: f64,
    pub d2: f64,
    pub f2: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CoefficientSums {
    pub c2: f64,
    pub d2: f64,
    pub f2: f64,
    pub g2: f64,
}

impl CoefficientSums {
    pub fn total(&self) -> f64 {
        self.c2 + self.d2 + self.f2 + self.g2
    }
}

/// Squared expansion weights of a ground-doublet vector per total phonon
/// quantum i.
///
/// DJT: c (E ⊗ A1 phonon), d (E ⊗ E phonon), f (E ⊗ A2 phonon).
/// Lower branch: c′ (E_el ⊗ A1), d′ (A1_el ⊗ E), f′ (E_el ⊗ E), g′ (E_el ⊗ A2).
/// `forbidden` collects A1_el ⊗ A-type weight, zero by symmetry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub kind: ProblemKind,
    pub rows: Vec<CoefficientRow>,
    pub forbidden: f64,
}

impl CoefficientTable {
    pub fn sums(&self) -> CoefficientSums {
        self.rows.iter().fold(CoefficientSums::default(), |s, r| CoefficientSums {
            c2: s.c2 + r.c2,
            d2: s.d2 + r.d2,
            f2: s.f2 + r.f2,
            g2: s.g2 + r.g2,
        })
    }

    /// Σ of every squared weight, including the forbidden channel.
    pub fn total(&self) -> f64 {
        self.sums().total() + self.forbidden
    }

    pub fn row(&self, i: usize) -> CoefficientRow {
        self.rows.get(i).copied().unwrap_or(CoefficientRow { i, ..Default::default() })
    }

    fn average(a: &CoefficientTable, b: &CoefficientTable) -> CoefficientTable {
        let rows = a
            .rows
            .iter()
            .zip(&b.rows)
            .map(|(x, y)| CoefficientRow {
                i: x.i,
                c2: 0.5 * (x.c2 + y.c2),
                d2: 0.5 * (x.d2 + y.d2),
                f2: 0.5 * (x.f2 + y.f2),
                g2: 0.5 * (x.g2 + y.g2),
            })
            .collect();
        CoefficientTable { kind: a.kind, rows, forbidden: 0.5 * (a.forbidden + b.forbidden) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HamFactors {
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone)]
pub struct VibronicSolution {
    pub problem: VibronicProblem,
    /// Ascending, meV.
    pub eigenvalues: Vec<f64>,
    /// Gauge-fixed ground pair: even and odd under the reflection.
    pub ground: [DVector<f64>; 2],
    /// Table averaged over both partners.
    pub table: CoefficientTable,
    /// Per-partner tables, same order as `ground`.
    pub partner_tables: [CoefficientTable; 2],
    pub ham: Option<HamFactors>,
    pub max_residual: f64,
}

impl VibronicSolution {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn kind(&self) -> ProblemKind {
        self.problem.kind()
    }
}

fn level_projections(psi: &[f64], sectors: &[VibrationalIrrepSector]) -> Vec<(SectorIrrep, usize, f64)> {
    let mut out = Vec::new();
    for s in sectors {
        for (v, &l) in s.vectors.iter().zip(&s.angular) {
            let ov: f64 = v.iter().zip(psi).map(|(a, b)| a * b).sum();
            out.push((s.irrep, l, ov * ov));
        }
    }
    out
}

/// A-type weight split into (A1, A2) shares.
fn split_a(rule: PartitionRule, irrep: SectorIrrep, l: usize, w: f64) -> (f64, f64) {
    match rule {
        PartitionRule::OrientationAveraged if l == 0 => (w, 0.0),
        PartitionRule::OrientationAveraged => (0.5 * w, 0.5 * w),
        PartitionRule::ReflectionParity if irrep == SectorIrrep::A1 => (w, 0.0),
        PartitionRule::ReflectionParity => (0.0, w),
    }
}

/// Coefficient table of a single vibronic vector.
pub fn coefficient_table(problem: &VibronicProblem, psi: &DVector<f64>) -> Result<CoefficientTable> {
    let n_max = problem.n_max;
    let d = OscillatorBasis::dim(n_max);
    let ne = problem.electronic_dim();
    if psi.len() != ne * d {
        return Err(Error::InvalidInput(format!("vector length {} != {}", psi.len(), ne * d)));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut forbidden = 0.0;
    for i in 0..=n_max {
        let sectors = classify_oscillator_level(i, n_max)?;
        let range = OscillatorBasis::level_range(i);
        let comp = |e: usize| -> Vec<f64> { range.clone().map(|k| psi[e * d + k]).collect() };
        let mut row = CoefficientRow { i, ..Default::default() };
        match problem.kind() {
            ProblemKind::Djt => {
                for e in 0..2 {
                    for (irrep, l, w) in level_projections(&comp(e), &sectors) {
                        if irrep.is_a_type() {
                            let (a1, a2) = split_a(problem.partition, irrep, l, w);
                            row.c2 += a1;
                            row.f2 += a2;
                        } else {
                            row.d2 += w;
                        }
                    }
                }
            }
            ProblemKind::LowerBranch => {
                let (xx, xy, yy) = (comp(0), comp(1), comp(2));
                let a1: Vec<f64> = xx.iter().zip(&yy).map(|(a, b)| r * (a + b)).collect();
                let ex: Vec<f64> = xx.iter().zip(&yy).map(|(a, b)| r * (b - a)).collect();
                for (irrep, _, w) in level_projections(&a1, &sectors) {
                    if irrep.is_a_type() {
                        forbidden += w;
                    } else {
                        row.d2 += w;
                    }
                }
                for el in [&ex, &xy] {
                    for (irrep, l, w) in level_projections(el, &sectors) {
                        if irrep.is_a_type() {
                            let (s1, s2) = split_a(problem.partition, irrep, l, w);
                            row.c2 += s1;
                            row.g2 += s2;
                        } else {
                            row.f2 += w;
                        }
                    }
                }
            }
        }
        rows.push(row);
    }
    Ok(CoefficientTable { kind: problem.kind(), rows, forbidden })
}

fn canonical_phase(v: &mut DVector<f64>) {
    let mut best = 0;
    for k in 0..v.len() {
        if v[k].abs() > v[best].abs() + 1e-12 {
            best = k;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Dense symmetric eigendecomposition with eigenpairs sorted ascending.
pub fn eigh(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Diagonalize, check residuals and ground degeneracy, fix the gauge of the
/// ground doublet with the y ↦ −y reflection and extract coefficients.
pub fn solve(problem: &VibronicProblem) -> Result<VibronicSolution> {
    let h = problem.hamiltonian();
    let (values, vectors) = eigh(&h);
    let norm = h.norm();
    let resid = &h * &vectors - &vectors * DMatrix::from_diagonal(&DVector::from_column_slice(&values));
    let max_residual = resid.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let bound = 1e-9 * norm.max(1.0);
    if max_residual > bound {
        return Err(Error::Eigen { residual: max_residual, bound });
    }
    let tolerance = 1e-6 * problem.hw();
    let gap = values[1] - values[0];
    if gap > tolerance {
        return Err(Error::SymmetryBreaking { gap, tolerance });
    }

    let d = OscillatorBasis::dim(problem.n_max);
    let basis = OscillatorBasis::new(problem.n_max);
    let parity: Vec<f64> = problem
        .electronic_parity()
        .iter()
        .flat_map(|&pe| basis.states.iter().map(move |s| if s.m % 2 == 0 { pe } else { -pe }))
        .collect();
    debug_assert_eq!(parity.len(), problem.electronic_dim() * d);
    let v0 = vectors.column(0).into_owned();
    let v1 = vectors.column(1).into_owned();
    let rdot = |a: &DVector<f64>, b: &DVector<f64>| a.iter().zip(b.iter()).zip(&parity).map(|((x, y), p)| x * y * p).sum::<f64>();
    let m = Matrix2::new(rdot(&v0, &v0), rdot(&v0, &v1), rdot(&v1, &v0), rdot(&v1, &v1));
    let re = SymmetricEigen::new(m);
    let (even, odd) = if re.eigenvalues[0] >= re.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let mix = |k: usize| {
        let mut v = &v0 * re.eigenvectors[(0, k)] + &v1 * re.eigenvectors[(1, k)];
        v /= v.norm();
        canonical_phase(&mut v);
        v
    };
    let ground = [mix(even), mix(odd)];
    let partner_tables = [coefficient_table(problem, &ground[0])?, coefficient_table(problem, &ground[1])?];
    let table = CoefficientTable::average(&partner_tables[0], &partner_tables[1]);
    let mut sol = VibronicSolution {
        problem: *problem,
        eigenvalues: values,
        ground,
        table,
        partner_tables,
        ham: None,
        max_residual,
    };
    if problem.kind() == ProblemKind::Djt {
        sol.ham = Some(ham_factors(&sol)?);
    }
    Ok(sol)
}

/// p = Σ(cᵢ² − dᵢ² + fᵢ²), q = Σ(cᵢ² − fᵢ²).
pub fn ham_factors(solution: &VibronicSolution) -> Result<HamFactors> {
    if solution.kind() != ProblemKind::Djt {
        return Err(Error::InvalidInput("Ham factors are defined for DJT solutions only".into()));
    }
    Ok(ham_factors_from_table(&solution.table))
}

pub fn ham_factors_from_table(table: &CoefficientTable) -> HamFactors {
    let s = table.sums();
    HamFactors { p: s.c2 - s.d2 + s.f2, q: s.c2 - s.f2 }
}
