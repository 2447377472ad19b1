//! Spin-Hamiltonian parameter processing: ZFS tensors, the SOC
//! finite-size fit and the Ham-factor reduction of SOC.

use crate::{Error, Result};
use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector2, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZfsUnit {
    GHz,
    MHz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZfsTensor {
    pub unit: ZfsUnit,
    pub matrix: [[f64; 3]; 3],
}

impl ZfsTensor {
    pub fn new(unit: ZfsUnit, matrix: [[f64; 3]; 3]) -> Result<Self> {
        let t = ZfsTensor { unit, matrix };
        t.check_symmetric()?;
        Ok(t)
    }

    pub fn from_matrix(unit: ZfsUnit, m: &Matrix3<f64>) -> Self {
        ZfsTensor { unit, matrix: [[m[(0, 0)], m[(0, 1)], m[(0, 2)]], [m[(1, 0)], m[(1, 1)], m[(1, 2)]], [m[(2, 0)], m[(2, 1)], m[(2, 2)]]] }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.matrix[r][c])
    }

    pub fn trace(&self) -> f64 {
        (0..3).map(|k| self.matrix[k][k]).sum()
    }

    pub fn check_symmetric(&self) -> Result<()> {
        let m = self.to_matrix();
        let scale = m.abs().max().max(1.0);
        if (m - m.transpose()).abs().max() > 1e-9 * scale {
            return Err(Error::InvalidInput("ZFS tensor is not symmetric".into()));
        }
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        let t: ZfsTensor = serde_json::from_str(&text).map_err(|e| Error::Parse { path: path.display().to_string(), message: e.to_string() })?;
        t.check_symmetric()?;
        Ok(t)
    }
}

/// Spin-contamination correction: (D_t − D_s)/2.
pub fn decontaminate(dt: &ZfsTensor, ds: &ZfsTensor) -> Result<ZfsTensor> {
    if dt.unit != ds.unit {
        return Err(Error::InvalidInput(format!("unit mismatch: {:?} vs {:?}", dt.unit, ds.unit)));
    }
    let mut matrix = [[0.0; 3]; 3];
    for (r, row) in matrix.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = 0.5 * (dt.matrix[r][c] - ds.matrix[r][c]);
        }
    }
    Ok(ZfsTensor { unit: dt.unit, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZfsParameters {
    pub unit: ZfsUnit,
    pub d: f64,
    pub e: f64,
    /// Rows are the x, y, z principal axes (right-handed).
    pub axes: [[f64; 3]; 3],
    pub principal: [f64; 3],
    pub trace: f64,
}

fn canonical_axis(v: &mut Vector3<f64>) {
    if let Some(k) = (0..3).find(|&k| v[k].abs() > 1e-12) {
        if v[k] < 0.0 {
            v.neg_mut();
        }
    }
}

/// Principal-axis D and E. The isotropic part is removed first; z is the
/// axis with the largest |D_kk|, and x/y are ordered so E ≥ 0.
pub fn extract_de(t: &ZfsTensor) -> Result<ZfsParameters> {
    t.check_symmetric()?;
    let m = t.to_matrix();
    let m = 0.5 * (m + m.transpose());
    let trace = m.trace();
    let traceless = m - Matrix3::identity() * (trace / 3.0);
    let eig = SymmetricEigen::new(traceless);
    let scale = traceless.abs().max().max(1e-300);
    let mut idx = [0usize, 1, 2];
    let val = |k: usize| eig.eigenvalues[k];
    idx.sort_by(|&a, &b| {
        let (va, vb) = (val(a), val(b));
        if ((va.abs() - vb.abs()) / scale).abs() > 1e-9 {
            vb.abs().total_cmp(&va.abs())
        } else {
            vb.total_cmp(&va)
        }
    });
    let z = idx[0];
    let (mut x, mut y) = (idx[1], idx[2]);
    if val(x) > val(y) {
        std::mem::swap(&mut x, &mut y);
    }
    let mut ay: Vector3<f64> = eig.eigenvectors.column(y).into_owned();
    let mut az: Vector3<f64> = eig.eigenvectors.column(z).into_owned();
    canonical_axis(&mut ay);
    canonical_axis(&mut az);
    let ax = ay.cross(&az);
    let row = |v: &Vector3<f64>| [v[0], v[1], v[2]];
    Ok(ZfsParameters {
        unit: t.unit,
        d: 1.5 * val(z),
        e: 0.5 * (val(y) - val(x)),
        axes: [row(&ax), row(&ay), row(&az)],
        principal: [val(x), val(y), val(z)],
        trace,
    })
}

/// λ_z = p·λ_z0.
pub fn reduce_soc(lambda_z0: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidInput(format!("p = {p} outside (0, 1]")));
    }
    Ok(p * lambda_z0)
}

// ---------------------------------------------------------------------------
// SOC finite-size scaling

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocRow {
    pub a_mult: f64,
    pub b_mult: f64,
    pub c_mult: f64,
    #[serde(rename = "lambda_z_GHz")]
    pub lambda_z: f64,
    #[serde(default, rename = "volume_A3")]
    pub volume: Option<f64>,
    #[serde(default)]
    pub n_atoms: Option<u32>,
}

impl SocRow {
    pub fn new(a_mult: f64, b_mult: f64, c_mult: f64, lambda_z: f64) -> Self {
        SocRow { a_mult, b_mult, c_mult, lambda_z, volume: None, n_atoms: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocDataset {
    pub rows: Vec<SocRow>,
}

impl SocDataset {
    pub fn from_csv<R: std::io::Read>(reader: R, origin: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for (k, rec) in rdr.deserialize::<SocRow>().enumerate() {
            let row = rec.map_err(|e| Error::Parse { path: format!("{origin}:row {}", k + 1), message: e.to_string() })?;
            rows.push(row);
        }
        let ds = SocDataset { rows };
        ds.validate()?;
        Ok(ds)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_csv(f, &path.display().to_string())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn validate(&self) -> Result<()> {
        for (k, r) in self.rows.iter().enumerate() {
            if r.a_mult < 1.0 || r.b_mult < 1.0 || r.c_mult < 1.0 || !(r.lambda_z > 0.0) {
                return Err(Error::InvalidInput(format!("SOC row {k}: multipliers must be ≥ 1 and λ_z > 0")));
            }
        }
        Ok(())
    }
}

/// Unit-cell constants in Å.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCell {
    pub a0: f64,
    pub c0: f64,
}

impl Default for UnitCell {
    fn default() -> Self {
        UnitCell { a0: 18.43 / 6.0, c0: 20.10 / 2.0 }
    }
}

impl UnitCell {
    /// (x_ab, y_c) = (2/(√3·a·b), c) in Å⁻² and Å.
    pub fn coordinates(&self, r: &SocRow) -> (f64, f64) {
        let a = r.a_mult * self.a0;
        let b = r.b_mult * self.a0;
        (2.0 / (3f64.sqrt() * a * b), r.c_mult * self.c0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Exclusion {
    /// Leave-one-out; drop the best row only if it cuts the sum of squares
    /// by more than 2×.
    #[default]
    Auto,
    None,
    Rows(Vec<usize>),
}

/// λ_z(x, y) = A·exp(B·x + C·y) + λ_z0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda_z0: f64,
}

impl SocModel {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * (self.b * x + self.c * y).exp() + self.lambda_z0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocFit {
    pub model: SocModel,
    /// Sum of squared residuals over included rows, GHz².
    pub ssr: f64,
    pub rms: f64,
    /// Model minus data for every row, excluded ones included.
    pub residuals: Vec<f64>,
    pub excluded: Vec<usize>,
    /// Sum of squares with all rows, before any automatic exclusion.
    pub ssr_all_rows: Option<f64>,
    pub starts: usize,
}

struct Scaled {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    xs: f64,
    ys: f64,
}

impl Scaled {
    fn new(points: &[(f64, f64, f64)]) -> Self {
        let xs = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max).max(1e-300);
        let ys = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(1e-300);
        Scaled {
            x: points.iter().map(|p| p.0 / xs).collect(),
            y: points.iter().map(|p| p.1 / ys).collect(),
            z: points.iter().map(|p| p.2).collect(),
            xs,
            ys,
        }
    }

    /// Residuals for θ = (A, u, v, λ0) with u = B·xs, v = C·ys.
    fn residuals(&self, t: &Vector4<f64>) -> Vec<f64> {
        (0..self.z.len()).map(|j| t[0] * (t[1] * self.x[j] + t[2] * self.y[j]).exp() + t[3] - self.z[j]).collect()
    }

    fn ssr(&self, t: &Vector4<f64>) -> f64 {
        self.residuals(t).iter().map(|r| r * r).sum()
    }

    /// Best (A, λ0) at fixed (u, v) by linear least squares.
    fn linear_part(&self, u: f64, v: f64) -> Option<Vector4<f64>> {
        let n = self.z.len() as f64;
        let (mut s1, mut s2, mut sz, mut spz) = (0.0, 0.0, 0.0, 0.0);
        for j in 0..self.z.len() {
            let phi = (u * self.x[j] + v * self.y[j]).exp();
            s1 += phi;
            s2 += phi * phi;
            sz += self.z[j];
            spz += phi * self.z[j];
        }
        let m = Matrix2::new(s2, s1, s1, n);
        let sol = m.lu().solve(&Vector2::new(spz, sz))?;
        let t = Vector4::new(sol[0], u, v, sol[1]);
        t.iter().all(|x| x.is_finite()).then_some(t)
    }

    fn levenberg_marquardt(&self, start: Vector4<f64>) -> Option<(Vector4<f64>, f64)> {
        let mut t = start;
        let mut r = self.residuals(&t);
        let mut cost: f64 = r.iter().map(|x| x * x).sum();
        if !cost.is_finite() {
            return None;
        }
        let mut mu = 1e-3;
        for _ in 0..2000 {
            let mut jtj = Matrix4::<f64>::zeros();
            let mut jtr = Vector4::<f64>::zeros();
            for ((x, y), rj) in self.x.iter().zip(&self.y).zip(r.iter()) {
                let phi = (t[1] * x + t[2] * y).exp();
                let row = Vector4::new(phi, t[0] * phi * x, t[0] * phi * y, 1.0);
                jtj += row * row.transpose();
                jtr += row * *rj;
            }
            if jtr.amax() <= 1e-15 * (1.0 + cost) {
                break;
            }
            let mut accepted = false;
            for _ in 0..60 {
                let mut a = jtj;
                for k in 0..4 {
                    a[(k, k)] += mu * jtj[(k, k)].max(1e-12);
                }
                let Some(step) = a.lu().solve(&(-jtr)) else {
                    mu *= 10.0;
                    continue;
                };
                let trial = t + step;
                let tr = self.residuals(&trial);
                let tc: f64 = tr.iter().map(|x| x * x).sum();
                if tc.is_finite() && tc <= cost {
                    let small = step.norm() <= 1e-14 * (1.0 + t.norm());
                    t = trial;
                    r = tr;
                    cost = tc;
                    mu = (mu / 3.0).max(1e-15);
                    if small {
                        return Some((t, cost));
                    }
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if !accepted {
                break;
            }
        }
        Some((t, cost))
    }

    fn unscale(&self, t: &Vector4<f64>) -> SocModel {
        SocModel { a: t[0], b: t[1] / self.xs, c: t[2] / self.ys, lambda_z0: t[3] }
    }
}

const GRID_HALF: i32 = 24;
const GRID_STEP: f64 = 0.5;
const MAX_STARTS: usize = 12;

/// Multi-start fit on (x, y, λ) triples. Starts are the local minima of the
/// separable least-squares objective on a fixed (u, v) grid.
fn fit_points(points: &[(f64, f64, f64)]) -> Result<(SocModel, f64, usize)> {
    let s = Scaled::new(points);
    let n = (2 * GRID_HALF + 1) as usize;
    let coord = |k: usize| (k as i32 - GRID_HALF) as f64 * GRID_STEP;
    let mut grid = vec![f64::INFINITY; n * n];
    let mut lin = vec![None; n * n];
    for iu in 0..n {
        for iv in 0..n {
            if let Some(t) = s.linear_part(coord(iu), coord(iv)) {
                grid[iu * n + iv] = s.ssr(&t);
                lin[iu * n + iv] = Some(t);
            }
        }
    }
    let mut minima: Vec<(f64, usize)> = Vec::new();
    for iu in 0..n {
        for iv in 0..n {
            let g = grid[iu * n + iv];
            if !g.is_finite() {
                continue;
            }
            let mut is_min = true;
            for du in -1i32..=1 {
                for dv in -1i32..=1 {
                    let (a, b) = (iu as i32 + du, iv as i32 + dv);
                    if (du, dv) == (0, 0) || a < 0 || b < 0 || a >= n as i32 || b >= n as i32 {
                        continue;
                    }
                    if grid[a as usize * n + b as usize] < g {
                        is_min = false;
                    }
                }
            }
            if is_min {
                minima.push((g, iu * n + iv));
            }
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    minima.truncate(MAX_STARTS);
    let starts = minima.len();
    let mut best: Option<(Vector4<f64>, f64)> = None;
    for &(_, k) in &minima {
        let Some(t0) = lin[k] else { continue };
        if let Some((t, c)) = s.levenberg_marquardt(t0) {
            if best.as_ref().is_none_or(|b| c < b.1) {
                best = Some((t, c));
            }
        }
    }
    let (t, c) = best.ok_or_else(|| Error::FitFailure(format!("no start converged ({starts} tried)")))?;
    Ok((s.unscale(&t), c, starts))
}

pub fn soc_fit(data: &SocDataset, cell: &UnitCell, exclusion: &Exclusion) -> Result<SocFit> {
    data.validate()?;
    let all: Vec<(f64, f64, f64)> = data
        .rows
        .iter()
        .map(|r| {
            let (x, y) = cell.coordinates(r);
            (x, y, r.lambda_z)
        })
        .collect();
    let subset = |skip: &[usize]| -> Vec<(f64, f64, f64)> {
        all.iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, p)| *p).collect()
    };
    let need = |pts: &[(f64, f64, f64)]| {
        if pts.len() < 6 {
            Err(Error::InvalidInput(format!("SOC fit needs ≥ 6 rows, have {}", pts.len())))
        } else {
            Ok(())
        }
    };
    let (excluded, model, ssr, starts, ssr_all) = match exclusion {
        Exclusion::None => {
            need(&all)?;
            let (m, c, s) = fit_points(&all)?;
            (vec![], m, c, s, Some(c))
        }
        Exclusion::Rows(rows) => {
            if let Some(&bad) = rows.iter().find(|&&k| k >= all.len()) {
                return Err(Error::InvalidInput(format!("excluded row {bad} out of range")));
            }
            let mut rows = rows.clone();
            rows.sort_unstable();
            rows.dedup();
            let pts = subset(&rows);
            need(&pts)?;
            let (m, c, s) = fit_points(&pts)?;
            (rows, m, c, s, None)
        }
        Exclusion::Auto => {
            need(&all)?;
            let (m0, c0, s0) = fit_points(&all)?;
            let mut chosen = (vec![], m0, c0, s0, Some(c0));
            if all.len() > 6 {
                let mut best: Option<(usize, SocModel, f64, usize)> = None;
                for k in 0..all.len() {
                    if let Ok((m, c, s)) = fit_points(&subset(&[k])) {
                        if best.as_ref().is_none_or(|b| c < b.2) {
                            best = Some((k, m, c, s));
                        }
                    }
                }
                if let Some((k, m, c, s)) = best {
                    if c0 > 2.0 * c {
                        chosen = (vec![k], m, c, s, Some(c0));
                    }
                }
            }
            chosen
        }
    };
    let residuals: Vec<f64> = all.iter().map(|&(x, y, z)| model.eval(x, y) - z).collect();
    let used = all.len() - excluded.len();
    Ok(SocFit { model, ssr, rms: (ssr / used as f64).sqrt(), residuals, excluded, ssr_all_rows: ssr_all, starts })
}

/// Sum of squared residuals of `model` over the non-excluded rows.
pub fn soc_objective(model: &SocModel, data: &SocDataset, cell: &UnitCell, excluded: &[usize]) -> f64 {
    data.rows
        .iter()
        .enumerate()
        .filter(|(k, _)| !excluded.contains(k))
        .map(|(_, r)| {
            let (x, y) = cell.coordinates(r);
            (model.eval(x, y) - r.lambda_z).powi(2)
        })
        .sum()
}
