//! C3v group machinery: SALC projection, two-hole multiplets and the
//! symmetry classification of two-mode oscillator levels.

use crate::{Error, Result};
use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Irrep {
    A1,
    A2,
    E,
}

impl Irrep {
    pub const ALL: [Irrep; 3] = [Irrep::A1, Irrep::A2, Irrep::E];

    pub fn dim(self) -> usize {
        match self {
            Irrep::E => 2,
            _ => 1,
        }
    }
}

/// The six elements of C3v: identity, C3, C3², and three vertical mirrors.
/// `sigma_v1` maps y ↦ −y; the other mirrors are `C3^k · sigma_v1`.
#[derive(Debug, Clone)]
pub struct PointGroupC3v {
    names: [&'static str; 6],
    matrices: [Matrix2<f64>; 6],
    table: [[usize; 6]; 6],
}

impl Default for PointGroupC3v {
    fn default() -> Self {
        Self::new()
    }
}

impl PointGroupC3v {
    pub const ORDER: usize = 6;

    pub fn new() -> Self {
        let rot = |k: f64| {
            let t = k * 2.0 * std::f64::consts::PI / 3.0;
            Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos())
        };
        let mirror = Matrix2::new(1.0, 0.0, 0.0, -1.0);
        let matrices = [
            Matrix2::identity(),
            rot(1.0),
            rot(2.0),
            mirror,
            rot(1.0) * mirror,
            rot(2.0) * mirror,
        ];
        let mut table = [[0usize; 6]; 6];
        for g in 0..6 {
            for h in 0..6 {
                let gh = matrices[g] * matrices[h];
                table[g][h] = (0..6)
                    .find(|&k| (matrices[k] - gh).abs().max() < 1e-12)
                    .expect("C3v closed under multiplication");
            }
        }
        PointGroupC3v {
            names: ["E", "C3", "C3^2", "sigma_v1", "sigma_v2", "sigma_v3"],
            matrices,
            table,
        }
    }

    pub fn name(&self, g: usize) -> &'static str {
        self.names[g]
    }

    /// Index of g·h (apply h first).
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        (0..6).find(|&h| self.table[g][h] == 0).expect("inverse exists")
    }

    /// Conjugacy class index: 0 identity, 1 rotations, 2 mirrors.
    pub fn class_of(&self, g: usize) -> usize {
        match g {
            0 => 0,
            1 | 2 => 1,
            _ => 2,
        }
    }

    pub fn class_sizes(&self) -> [usize; 3] {
        [1, 2, 3]
    }

    pub fn character(&self, irrep: Irrep, g: usize) -> f64 {
        const CHI: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [2.0, -1.0, 0.0]];
        let row = match irrep {
            Irrep::A1 => 0,
            Irrep::A2 => 1,
            Irrep::E => 2,
        };
        CHI[row][self.class_of(g)]
    }

    /// Real orthogonal representation matrix; for E the (x, y) rows.
    pub fn rep(&self, irrep: Irrep, g: usize) -> DMatrix<f64> {
        match irrep {
            Irrep::E => {
                let m = self.matrices[g];
                DMatrix::from_fn(2, 2, |r, c| m[(r, c)])
            }
            _ => DMatrix::from_element(1, 1, self.character(irrep, g)),
        }
    }

    /// 2×2 geometric action on the (x, y) plane.
    pub fn planar(&self, g: usize) -> Matrix2<f64> {
        self.matrices[g]
    }
}

/// Signed permutation: `g · orbital[j] = sign[j] · orbital[image[j]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPermutation {
    pub image: Vec<usize>,
    pub sign: Vec<f64>,
}

impl SignedPermutation {
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.image.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, (&i, &s)) in self.image.iter().zip(&self.sign).enumerate() {
            m[(i, j)] = s;
        }
        m
    }
}

/// One orbit of atomic orbitals under C3v.
#[derive(Debug, Clone)]
pub enum Orbit {
    /// A single orbital on the symmetry axis, fixed by every element.
    Axial(String),
    /// Three equivalent orbitals at azimuths 0°, 120°, 240°.
    Triad([String; 3]),
}

#[derive(Debug, Clone)]
pub struct SiteBasis {
    pub labels: Vec<String>,
    pub actions: Vec<SignedPermutation>,
}

impl SiteBasis {
    /// Build from explicit actions, checking bijectivity and the
    /// homomorphism property.
    pub fn new(labels: Vec<String>, actions: Vec<SignedPermutation>, group: &PointGroupC3v) -> Result<Self> {
        let n = labels.len();
        if actions.len() != PointGroupC3v::ORDER {
            return Err(Error::InvalidInput(format!("expected 6 group actions, got {}", actions.len())));
        }
        for (g, a) in actions.iter().enumerate() {
            if a.image.len() != n || a.sign.len() != n {
                return Err(Error::InvalidInput(format!("action {} has wrong length", group.name(g))));
            }
            let mut seen = vec![false; n];
            for &i in &a.image {
                if i >= n || seen[i] {
                    return Err(Error::InvalidInput(format!("action {} is not a bijection", group.name(g))));
                }
                seen[i] = true;
            }
            if a.sign.iter().any(|s| (s.abs() - 1.0).abs() > TOL) {
                return Err(Error::InvalidInput(format!("action {} has a sign other than ±1", group.name(g))));
            }
        }
        let basis = SiteBasis { labels, actions };
        basis.check_homomorphism(group)?;
        Ok(basis)
    }

    pub fn from_orbits(orbits: &[Orbit], group: &PointGroupC3v) -> Result<Self> {
        let mut labels = Vec::new();
        let mut layout = Vec::new();
        for orbit in orbits {
            match orbit {
                Orbit::Axial(l) => {
                    layout.push((labels.len(), 1));
                    labels.push(l.clone());
                }
                Orbit::Triad(ls) => {
                    layout.push((labels.len(), 3));
                    labels.extend(ls.iter().cloned());
                }
            }
        }
        let n = labels.len();
        let angle = |p: usize| p as f64 * 2.0 * std::f64::consts::PI / 3.0;
        let mut actions = Vec::with_capacity(6);
        for g in 0..6 {
            let m = group.planar(g);
            let mut image = vec![0; n];
            for &(start, len) in &layout {
                if len == 1 {
                    image[start] = start;
                    continue;
                }
                for p in 0..3 {
                    let v = m * nalgebra::Vector2::new(angle(p).cos(), angle(p).sin());
                    let q = (0..3)
                        .find(|&q| (v.x - angle(q).cos()).abs() < 1e-9 && (v.y - angle(q).sin()).abs() < 1e-9)
                        .expect("triad maps onto itself");
                    image[start + p] = start + q;
                }
            }
            actions.push(SignedPermutation { image, sign: vec![1.0; n] });
        }
        SiteBasis::new(labels, actions, group)
    }

    /// Six dangling bonds of a divacancy: s1..s3 and c1..c3.
    pub fn divacancy(group: &PointGroupC3v) -> Self {
        let t = |p: &str| [format!("{p}1"), format!("{p}2"), format!("{p}3")];
        SiteBasis::from_orbits(&[Orbit::Triad(t("s")), Orbit::Triad(t("c"))], group).expect("valid basis")
    }

    /// NV-like basis {n, c1, c2, c3}.
    pub fn nv(group: &PointGroupC3v) -> Self {
        SiteBasis::from_orbits(
            &[Orbit::Axial("n".into()), Orbit::Triad(["c1".into(), "c2".into(), "c3".into()])],
            group,
        )
        .expect("valid basis")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn matrix(&self, g: usize) -> DMatrix<f64> {
        self.actions[g].matrix()
    }

    pub fn apply(&self, g: usize, v: &[f64]) -> Vec<f64> {
        let a = &self.actions[g];
        let mut out = vec![0.0; v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[a.image[j]] += a.sign[j] * x;
        }
        out
    }

    pub fn check_homomorphism(&self, group: &PointGroupC3v) -> Result<()> {
        for g in 0..6 {
            for h in 0..6 {
                let lhs = self.matrix(g) * self.matrix(h);
                let rhs = self.matrix(group.mul(g, h));
                if (lhs - rhs).abs().max() > TOL {
                    return Err(Error::InvalidInput(format!(
                        "action is not a homomorphism: {}·{} != {}",
                        group.name(g),
                        group.name(h),
                        group.name(group.mul(g, h))
                    )));
                }
            }
        }
        Ok(())
    }

    /// Multiplicity of each irrep in the permutation representation.
    pub fn decomposition(&self, group: &PointGroupC3v) -> BTreeMap<Irrep, usize> {
        Irrep::ALL
            .iter()
            .map(|&ir| {
                let s: f64 = (0..6).map(|g| group.character(ir, g) * self.matrix(g).trace()).sum();
                (ir, (s / 6.0).round() as usize)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Salc {
    pub irrep: Irrep,
    /// 0 for x (or the only row), 1 for y.
    pub row: usize,
    pub label: String,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryAdaptedOrbitals {
    pub basis: Vec<String>,
    pub orbitals: Vec<Salc>,
}

impl SymmetryAdaptedOrbitals {
    pub fn of(&self, irrep: Irrep) -> impl Iterator<Item = &Salc> {
        self.orbitals.iter().filter(move |o| o.irrep == irrep)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn projector(basis: &SiteBasis, group: &PointGroupC3v, irrep: Irrep, r: usize, s: usize) -> DMatrix<f64> {
    let n = basis.len();
    let mut p = DMatrix::zeros(n, n);
    for g in 0..6 {
        p += basis.matrix(g) * group.rep(irrep, g)[(r, s)];
    }
    p * (irrep.dim() as f64 / 6.0)
}

/// Project the site basis onto symmetry-adapted orbitals. Gram–Schmidt runs
/// inside each irrep block in basis order; overlaps between atomic orbitals
/// are ignored. E partners are generated from the x row with P_yx.
pub fn project_salcs(basis: &SiteBasis, group: &PointGroupC3v) -> Result<SymmetryAdaptedOrbitals> {
    basis.check_homomorphism(group)?;
    let n = basis.len();
    let mut orbitals = Vec::new();
    for irrep in Irrep::ALL {
        let p = projector(basis, group, irrep, 0, 0);
        let mut kept: Vec<Vec<f64>> = Vec::new();
        for j in 0..n {
            let mut v: Vec<f64> = p.column(j).iter().copied().collect();
            for k in &kept {
                let c = dot(&v, k);
                v.iter_mut().zip(k).for_each(|(x, y)| *x -= c * y);
            }
            if normalize(&mut v) > 1e-9 {
                kept.push(v);
            }
        }
        let tag = match irrep {
            Irrep::A1 => "a1",
            Irrep::A2 => "a2",
            Irrep::E => "e",
        };
        for (k, v) in kept.into_iter().enumerate() {
            if irrep == Irrep::E {
                let pyx = projector(basis, group, irrep, 1, 0);
                let mut y: Vec<f64> = (&pyx * nalgebra::DVector::from_column_slice(&v)).iter().copied().collect();
                normalize(&mut y);
                orbitals.push(Salc { irrep, row: 0, label: format!("ex({})", k + 1), coefficients: v });
                orbitals.push(Salc { irrep, row: 1, label: format!("ey({})", k + 1), coefficients: y });
            } else {
                orbitals.push(Salc { irrep, row: 0, label: format!("{tag}({})", k + 1), coefficients: v });
            }
        }
    }
    for o in &mut orbitals {
        o.coefficients.iter_mut().filter(|c| c.abs() < TOL).for_each(|c| *c = 0.0);
    }
    if orbitals.len() != n {
        return Err(Error::InvalidInput(format!(
            "projection produced {} orbitals for a basis of {n}",
            orbitals.len()
        )));
    }
    Ok(SymmetryAdaptedOrbitals { basis: basis.labels.clone(), orbitals })
}

// ---------------------------------------------------------------------------
// Two-hole multiplets

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Orbital {
    A,
    Ex,
    Ey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Configuration {
    EE,
    AE,
    AA,
}

impl FromStr for Configuration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches('(').trim_end_matches(')').to_ascii_lowercase().as_str() {
            "ee" => Ok(Configuration::EE),
            "ae" | "ea" => Ok(Configuration::AE),
            "aa" => Ok(Configuration::AA),
            other => Err(Error::InvalidInput(format!("unknown configuration `{other}`"))),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Configuration::EE => "(ee)",
            Configuration::AE => "(ae)",
            Configuration::AA => "(aa)",
        })
    }
}

/// `orbitals.0 ⊗ orbitals.1` for holes 1 and 2, times `spins.0 ⊗ spins.1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductTerm {
    pub orbitals: (Orbital, Orbital),
    pub spins: (Spin, Spin),
    pub coefficient: f64,
}

impl ProductTerm {
    fn key(&self) -> (Orbital, Orbital, Spin, Spin) {
        (self.orbitals.0, self.orbitals.1, self.spins.0, self.spins.1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultipletState {
    pub label: String,
    pub terms: Vec<ProductTerm>,
}

impl MultipletState {
    pub fn overlap(&self, other: &MultipletState) -> f64 {
        let map: BTreeMap<_, f64> = other.terms.iter().map(|t| (t.key(), t.coefficient)).collect();
        self.terms.iter().map(|t| t.coefficient * map.get(&t.key()).copied().unwrap_or(0.0)).sum()
    }

    /// The state with both orbital and spin factors exchanged between holes.
    pub fn exchanged(&self) -> MultipletState {
        let terms = self
            .terms
            .iter()
            .map(|t| ProductTerm {
                orbitals: (t.orbitals.1, t.orbitals.0),
                spins: (t.spins.1, t.spins.0),
                coefficient: t.coefficient,
            })
            .collect();
        canonical(self.label.clone(), terms, false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoHoleMultiplet {
    pub configuration: Configuration,
    pub term: String,
    /// Twice the total spin, so 2 for triplets and 0 for singlets.
    pub two_s: u8,
    pub states: Vec<MultipletState>,
}

fn canonical(label: String, mut terms: Vec<ProductTerm>, fix_phase: bool) -> MultipletState {
    let mut merged: BTreeMap<_, f64> = BTreeMap::new();
    for t in terms.drain(..) {
        *merged.entry(t.key()).or_insert(0.0) += t.coefficient;
    }
    let mut terms: Vec<ProductTerm> = merged
        .into_iter()
        .filter(|(_, c)| c.abs() > TOL)
        .map(|((o1, o2, s1, s2), c)| ProductTerm { orbitals: (o1, o2), spins: (s1, s2), coefficient: c })
        .collect();
    if fix_phase && terms.first().is_some_and(|t| t.coefficient < 0.0) {
        terms.iter_mut().for_each(|t| t.coefficient = -t.coefficient);
    }
    MultipletState { label, terms }
}

type OrbPart = Vec<((Orbital, Orbital), f64)>;
type SpinPart = Vec<((Spin, Spin), f64)>;

fn product(label: &str, orb: &OrbPart, spin: &SpinPart) -> MultipletState {
    let mut terms = Vec::new();
    for &(o, co) in orb {
        for &(s, cs) in spin {
            terms.push(ProductTerm { orbitals: o, spins: s, coefficient: co * cs });
        }
    }
    canonical(label.to_string(), terms, true)
}

fn sym(a: Orbital, b: Orbital, sign: f64) -> OrbPart {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![((a, b), r), ((b, a), sign * r)]
}

fn triplets() -> [(&'static str, SpinPart); 3] {
    use Spin::*;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        ("+1", vec![((Up, Up), 1.0)]),
        ("0", vec![((Up, Down), r), ((Down, Up), r)]),
        ("-1", vec![((Down, Down), 1.0)]),
    ]
}

fn singlet() -> SpinPart {
    use Spin::*;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![((Up, Down), r), ((Down, Up), -r)]
}

/// Enumerate the two-hole multiplets of one configuration over the real
/// orbitals {a, e_x, e_y}.
pub fn two_hole_multiplets(config: Configuration) -> Vec<TwoHoleMultiplet> {
    use Orbital::*;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let s = singlet();
    match config {
        Configuration::EE => {
            let anti = sym(Ex, Ey, -1.0);
            let a2 = triplets().iter().map(|(ms, sp)| product(&format!("3A2(ms={ms})"), &anti, sp)).collect();
            let e = vec![
                product("1E_x", &vec![((Ex, Ex), -r), ((Ey, Ey), r)], &s),
                product("1E_y", &sym(Ex, Ey, 1.0), &s),
            ];
            let a1 = vec![product("1A1", &vec![((Ex, Ex), r), ((Ey, Ey), r)], &s)];
            vec![
                TwoHoleMultiplet { configuration: config, term: "3A2".into(), two_s: 2, states: a2 },
                TwoHoleMultiplet { configuration: config, term: "1E".into(), two_s: 0, states: e },
                TwoHoleMultiplet { configuration: config, term: "1A1".into(), two_s: 0, states: a1 },
            ]
        }
        Configuration::AE => {
            let mut e3 = Vec::new();
            for (row, orb) in [("x", Ex), ("y", Ey)] {
                for (ms, sp) in triplets() {
                    e3.push(product(&format!("3E_{row}(ms={ms})"), &sym(A, orb, -1.0), &sp));
                }
            }
            let e1 = vec![product("1E'_x", &sym(A, Ex, 1.0), &s), product("1E'_y", &sym(A, Ey, 1.0), &s)];
            vec![
                TwoHoleMultiplet { configuration: config, term: "3E".into(), two_s: 2, states: e3 },
                TwoHoleMultiplet { configuration: config, term: "1E'".into(), two_s: 0, states: e1 },
            ]
        }
        Configuration::AA => vec![TwoHoleMultiplet {
            configuration: config,
            term: "1A1'".into(),
            two_s: 0,
            states: vec![product("1A1'", &vec![((A, A), 1.0)], &s)],
        }],
    }
}

/// All 15 two-hole states over three orbitals, in configuration order.
pub fn all_two_hole_states() -> Vec<MultipletState> {
    [Configuration::EE, Configuration::AE, Configuration::AA]
        .into_iter()
        .flat_map(two_hole_multiplets)
        .flat_map(|m| m.states)
        .collect()
}

/// Rows ¹E_x, ¹E_y, ¹A₁ expressed over columns |xx⟩, |xy⟩, |yy⟩.
pub fn real_singlet_basis_change() -> nalgebra::Matrix3<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    nalgebra::Matrix3::new(-r, 0.0, r, 0.0, 1.0, 0.0, r, 0.0, r)
}

// ---------------------------------------------------------------------------
// Two-mode oscillator states

/// Cartesian occupation |n, m⟩ of the x and y modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OscillatorState {
    pub n: usize,
    pub m: usize,
}

impl OscillatorState {
    pub fn total(&self) -> usize {
        self.n + self.m
    }
}

/// All |n, m⟩ with n + m ≤ N_max. Ordered by total quantum i, then by
/// descending n, so each level is a contiguous block starting at i(i+1)/2.
#[derive(Debug, Clone)]
pub struct OscillatorBasis {
    pub n_max: usize,
    pub states: Vec<OscillatorState>,
}

impl OscillatorBasis {
    pub fn new(n_max: usize) -> Self {
        let states = (0..=n_max)
            .flat_map(|i| (0..=i).rev().map(move |n| OscillatorState { n, m: i - n }))
            .collect();
        OscillatorBasis { n_max, states }
    }

    pub fn dim(n_max: usize) -> usize {
        (n_max + 1) * (n_max + 2) / 2
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Global index of |n, m⟩, if inside the truncation.
    pub fn index(&self, n: usize, m: usize) -> Option<usize> {
        let i = n + m;
        (i <= self.n_max).then(|| i * (i + 1) / 2 + (i - n))
    }

    /// First global index and size of level i.
    pub fn level_range(i: usize) -> std::ops::Range<usize> {
        let start = i * (i + 1) / 2;
        start..start + i + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SectorIrrep {
    A1,
    A2,
    /// E row even under y ↦ −y.
    E1,
    /// E row odd under y ↦ −y.
    E2,
}

impl SectorIrrep {
    pub fn is_a_type(self) -> bool {
        matches!(self, SectorIrrep::A1 | SectorIrrep::A2)
    }
}

/// One irrep block of oscillator level i. Vectors are over the i+1 local
/// states of the level in [`OscillatorBasis`] order; `angular[k]` is the
/// |l| carried by `vectors[k]`.
#[derive(Debug, Clone, Serialize)]
pub struct VibrationalIrrepSector {
    pub i: usize,
    pub irrep: SectorIrrep,
    pub vectors: Vec<Vec<f64>>,
    pub angular: Vec<usize>,
}

fn canonical_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-12 {
            best = k;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Phonon angular momentum squared, K̂ᵀK̂ with K̂ = a_x†a_y − a_y†a_x,
/// restricted to level i.
pub fn level_angular_momentum_sq(i: usize) -> DMatrix<f64> {
    let mut k = DMatrix::<f64>::zeros(i + 1, i + 1);
    // local index j ↔ (n, m) = (i − j, j)
    for j in 0..=i {
        let (n, m) = (i - j, j);
        if m > 0 {
            // a_x† a_y |n,m⟩ = √((n+1) m) |n+1, m−1⟩
            k[(j - 1, j)] += (((n + 1) * m) as f64).sqrt();
        }
        if n > 0 {
            k[(j + 1, j)] -= ((n * (m + 1)) as f64).sqrt();
        }
    }
    k.transpose() * &k
}

/// Split level i into A1 / A2 / E1 / E2 sectors by phonon angular momentum
/// modulo 3, with rows fixed by the y ↦ −y parity (−1)^m.
pub fn classify_oscillator_level(i: usize, n_max: usize) -> Result<Vec<VibrationalIrrepSector>> {
    if i > n_max {
        return Err(Error::InvalidInput(format!("level {i} exceeds truncation {n_max}")));
    }
    let l2 = level_angular_momentum_sq(i);
    let eig = SymmetricEigen::new(l2);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        groups.entry(ev.max(0.0).sqrt().round() as usize).or_default().push(k);
    }
    let parity: Vec<f64> = (0..=i).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let mut out: BTreeMap<SectorIrrep, VibrationalIrrepSector> = BTreeMap::new();
    let mut push = |irrep, l, mut v: Vec<f64>| {
        canonical_sign(&mut v);
        let s = out.entry(irrep).or_insert_with(|| VibrationalIrrepSector { i, irrep, vectors: vec![], angular: vec![] });
        s.vectors.push(v);
        s.angular.push(l);
    };
    for (&l, cols) in &groups {
        let vecs: Vec<Vec<f64>> = cols.iter().map(|&c| eig.eigenvectors.column(c).iter().copied().collect()).collect();
        if l == 0 {
            if vecs.len() != 1 {
                return Err(Error::InvalidInput(format!("level {i}: l = 0 multiplicity {}", vecs.len())));
            }
            push(SectorIrrep::A1, 0, vecs[0].clone());
            continue;
        }
        if vecs.len() != 2 {
            return Err(Error::InvalidInput(format!("level {i}: |l| = {l} multiplicity {}", vecs.len())));
        }
        // diagonalize the parity inside the ±l pair
        let r = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&parity).map(|((x, y), p)| x * y * p).sum::<f64>();
        let m = nalgebra::Matrix2::new(r(&vecs[0], &vecs[0]), r(&vecs[0], &vecs[1]), r(&vecs[1], &vecs[0]), r(&vecs[1], &vecs[1]));
        let pe = SymmetricEigen::new(m);
        for k in 0..2 {
            let (a, b) = (pe.eigenvectors[(0, k)], pe.eigenvectors[(1, k)]);
            let v: Vec<f64> = vecs[0].iter().zip(&vecs[1]).map(|(x, y)| a * x + b * y).collect();
            let even = pe.eigenvalues[k] > 0.0;
            let irrep = match (l % 3 == 0, even) {
                (true, true) => SectorIrrep::A1,
                (true, false) => SectorIrrep::A2,
                (false, true) => SectorIrrep::E1,
                (false, false) => SectorIrrep::E2,
            };
            push(irrep, l, v);
        }
    }
    Ok(out.into_values().collect())
}
