//! Five-level optical spin-polarization loop.
//!
//! Levels: 1 = ³A₂(ms=0), 2 = ³A₂(ms=±1), 3 = ³E(ms=0), 4 = ³E(ms=±1),
//! 5 = singlet shelf, plus a sink collecting ionization losses. Rates are in
//! MHz, so time runs in µs internally; public time grids are in ns.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use serde::{Deserialize, Serialize};

pub const LEVELS: usize = 6;
pub const SINK: usize = 5;
pub type Generator = SMatrix<f64, LEVELS, LEVELS>;
pub type Populations = SVector<f64, LEVELS>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateModel {
    pub k31: f64,
    pub k42: f64,
    pub k35: f64,
    pub k45: f64,
    pub k51: f64,
    pub k52: f64,
    pub k_ic: f64,
    pub k_ir: f64,
    pub p13: f64,
    pub p24: f64,
}

impl Default for RateModel {
    fn default() -> Self {
        RateModel { k31: 0.0, k42: 0.0, k35: 0.0, k45: 0.0, k51: 0.0, k52: 0.0, k_ic: 0.0, k_ir: 0.0, p13: 1.0, p24: 1.0 }
    }
}

impl RateModel {
    pub fn validate(&self) -> Result<()> {
        let all = [self.k31, self.k42, self.k35, self.k45, self.k51, self.k52, self.k_ic, self.k_ir, self.p13, self.p24];
        if all.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidInput("rates must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// (from, to, rate) with 0-based levels.
    pub fn transitions(&self) -> [(usize, usize, f64); 10] {
        [
            (0, 2, self.p13),
            (1, 3, self.p24),
            (2, 0, self.k31 + self.k_ic),
            (3, 1, self.k42 + self.k_ic),
            (2, 4, self.k35),
            (3, 4, self.k45),
            (4, 0, self.k51),
            (4, 1, self.k52),
            (2, SINK, self.k_ir),
            (3, SINK, self.k_ir),
        ]
    }

    pub fn max_rate(&self) -> f64 {
        self.transitions().iter().map(|t| t.2).fold(0.0, f64::max)
    }

    pub fn min_nonzero_rate(&self) -> Option<f64> {
        self.transitions().iter().map(|t| t.2).filter(|&r| r > 0.0).reduce(f64::min)
    }
}

/// dn/dt = G·n with every column summing to zero.
pub fn build_generator(model: &RateModel) -> Generator {
    let mut g = Generator::zeros();
    for (from, to, k) in model.transitions() {
        if k != 0.0 {
            g[(to, from)] += k;
        }
    }
    for c in 0..LEVELS {
        g[(c, c)] = -outflow(&g, c);
    }
    g
}

/// Sum of the off-diagonal entries of column `c`, in row order. The generator
/// diagonal is exactly the negation of this.
pub fn outflow(g: &Generator, c: usize) -> f64 {
    (0..LEVELS).filter(|&r| r != c).map(|r| g[(r, c)]).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t_ns: Vec<f64>,
    pub populations: Vec<[f64; LEVELS]>,
    pub pl_mhz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticsResult {
    /// n1..n5 and the sink.
    pub populations: [f64; LEVELS],
    pub pl_mhz: f64,
    pub trajectory: Option<Trajectory>,
}

fn to_array(n: &Populations) -> [f64; LEVELS] {
    let mut a = [0.0; LEVELS];
    a.copy_from_slice(n.as_slice());
    a
}

fn pl(model: &RateModel, n: &Populations) -> f64 {
    model.k31 * n[2] + model.k42 * n[3]
}

pub fn steady_state(model: &RateModel) -> Result<KineticsResult> {
    steady_state_from(model, &[0.5, 0.5, 0.0, 0.0, 0.0])
}

/// Stationary populations. Without pumping (levels 1 and 2 both absorbing)
/// the long-time limit of `initial` is returned; with k_ir > 0 the sink is
/// absorbing and the limit is found by integration.
pub fn steady_state_from(model: &RateModel, initial: &[f64; 5]) -> Result<KineticsResult> {
    model.validate()?;
    if model.k_ir > 0.0 || (model.p13 == 0.0 && model.p24 == 0.0) {
        let t_end = 100.0 / model.min_nonzero_rate().unwrap_or(1.0) * 1e3;
        let tr = transient(model, initial, &[0.0, t_end])?;
        let last = *tr.trajectory.as_ref().expect("trajectory").populations.last().expect("end point");
        return Ok(KineticsResult { populations: last, pl_mhz: *tr.trajectory.unwrap().pl_mhz.last().unwrap(), trajectory: None });
    }
    let g = build_generator(model);
    let closed = DMatrix::from_fn(5, 5, |r, c| g[(r, c)]);
    let svd = closed.clone().svd(false, false);
    let smax = svd.singular_values.max().max(1e-300);
    let null = svd.singular_values.iter().filter(|&&s| s <= 1e-12 * smax).count();
    if null != 1 {
        return Err(Error::DegenerateModel(null));
    }
    let mut a = closed;
    for c in 0..5 {
        a[(4, c)] = 1.0;
    }
    let mut b = DVector::zeros(5);
    b[4] = 1.0;
    let x = a.lu().solve(&b).ok_or(Error::DegenerateModel(2))?;
    let mut n = Populations::zeros();
    for k in 0..5 {
        n[k] = x[k].max(0.0);
    }
    let s = n.sum();
    n /= s;
    Ok(KineticsResult { populations: to_array(&n), pl_mhz: pl(model, &n), trajectory: None })
}

const MAX_STEPS: usize = 2_000_000;

/// Adaptive RK4 (step doubling) on a ns grid; PL(t) = k31·n3 + k42·n4.
/// Fails with [`Error::Stiffness`] when the step would drop below
/// 1e-12 of the span or the step budget runs out.
pub fn transient(model: &RateModel, initial: &[f64; 5], t_grid_ns: &[f64]) -> Result<KineticsResult> {
    model.validate()?;
    if (initial.iter().sum::<f64>() - 1.0).abs() > 1e-9 || initial.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput("initial populations must be non-negative and sum to 1".into()));
    }
    if t_grid_ns.is_empty() || t_grid_ns.windows(2).any(|w| w[1] < w[0]) || t_grid_ns[0] < 0.0 {
        return Err(Error::InvalidInput("time grid must be non-empty, non-negative and sorted".into()));
    }
    let g = build_generator(model);
    let mut n = Populations::zeros();
    n.fixed_rows_mut::<5>(0).copy_from_slice(initial);
    let rate = model.max_rate();
    let span_us = t_grid_ns.last().unwrap() * 1e-3;
    let floor = 1e-12 * span_us.max(1e-12);
    let tol = 1e-12;
    // RK4 cannot step past 2.5/rate, so this span needs at least that many steps
    if rate * span_us / 2.5 > MAX_STEPS as f64 {
        return Err(Error::Stiffness { t: 0.0, floor: 2.5 / rate * 1e3 });
    }
    let mut h = if rate > 0.0 { 0.1 / rate } else { span_us.max(1e-3) };
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut out = Trajectory { t_ns: vec![], populations: vec![], pl_mhz: vec![] };
    let rk4 = |n: &Populations, h: f64| {
        let k1 = g * n;
        let k2 = g * (n + k1 * (h / 2.0));
        let k3 = g * (n + k2 * (h / 2.0));
        let k4 = g * (n + k3 * h);
        n + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    };
    for &target_ns in t_grid_ns {
        let target = target_ns * 1e-3;
        while t < target {
            let step = h.min(target - t);
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Stiffness { t: t * 1e3, floor: floor * 1e3 });
            }
            let full = rk4(&n, step);
            let half = rk4(&rk4(&n, step / 2.0), step / 2.0);
            let err = (full - half).amax();
            if err <= tol || rate == 0.0 {
                n = half;
                t += step;
                if err < tol / 32.0 {
                    h = (h * 2.0).min(2.5 / rate.max(1e-300));
                }
            } else {
                h = step / 2.0;
                if h < floor {
                    return Err(Error::Stiffness { t: t * 1e3, floor: floor * 1e3 });
                }
            }
        }
        out.t_ns.push(target_ns);
        out.populations.push(to_array(&n));
        out.pl_mhz.push(pl(model, &n));
    }
    Ok(KineticsResult { populations: to_array(&n), pl_mhz: pl(model, &n), trajectory: Some(out) })
}

/// k_rad = n·E³·|μ|²/(3π·ε₀·ħ⁴·c³), in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiativeInputs {
    pub n: f64,
    /// eV.
    pub e_zpl: f64,
    /// Debye.
    pub mu: f64,
}

const EPS0: f64 = 8.854_187_812_8e-12;
const HBAR_SI: f64 = 1.054_571_817e-34;
const C_SI: f64 = 299_792_458.0;
const EV_J: f64 = 1.602_176_634e-19;
const DEBYE_CM: f64 = 3.335_640_952e-30;

pub fn radiative_rate(inputs: &RadiativeInputs) -> Result<f64> {
    if !(inputs.n >= 1.0 && inputs.e_zpl > 0.0 && inputs.mu >= 0.0) {
        return Err(Error::InvalidInput("need n ≥ 1, E_ZPL > 0, μ ≥ 0".into()));
    }
    let e = inputs.e_zpl * EV_J;
    let mu = inputs.mu * DEBYE_CM;
    let k = inputs.n * e.powi(3) * mu * mu / (3.0 * std::f64::consts::PI * EPS0 * HBAR_SI.powi(4) * C_SI.powi(3));
    Ok(k * 1e-6)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lifetime {
    pub tau_pl_ns: f64,
    pub eta_qy: f64,
}

/// τ_PL = 1/(k_rad + k_ph + k_ir), η_QY = k_rad/(k_rad + k_ph + k_ir).
pub fn pl_lifetime(k_rad: f64, k_ph: f64, k_ir: f64) -> Result<Lifetime> {
    if !(k_rad > 0.0) || k_ph < 0.0 || k_ir < 0.0 {
        return Err(Error::InvalidInput("need k_rad > 0 and non-negative loss rates".into()));
    }
    let total = k_rad + k_ph + k_ir;
    Ok(Lifetime { tau_pl_ns: 1e3 / total, eta_qy: k_rad / total })
}

/// C = (k0 − k±1)/k±1 with k0 = k31 + kIC + k35 + kir and
/// k±1 = k42 + kIC + k45 + kir.
pub fn odmr_contrast(k31: f64, k42: f64, k45: f64, k35: f64, k_ic: f64, k_ir: f64) -> Result<f64> {
    let k0 = k31 + k_ic + k35 + k_ir;
    let k1 = k42 + k_ic + k45 + k_ir;
    if !(k0 > 0.0 && k1 > 0.0) {
        return Err(Error::InvalidInput("k0 and k±1 must be positive".into()));
    }
    Ok((k0 - k1) / k1)
}

pub fn contrast_of(model: &RateModel) -> Result<f64> {
    odmr_contrast(model.k31, model.k42, model.k45, model.k35, model.k_ic, model.k_ir)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KineticsReport {
    #[serde(rename = "tau_PL_ns")]
    pub tau_pl_ns: f64,
    #[serde(rename = "eta_QY")]
    pub eta_qy: f64,
    pub contrast: f64,
}

/// Scalar summary with k_rad = k42 and k_ph = kIC + k45.
pub fn report(model: &RateModel) -> Result<KineticsReport> {
    let lt = pl_lifetime(model.k42, model.k_ic + model.k45, model.k_ir)?;
    Ok(KineticsReport { tau_pl_ns: lt.tau_pl_ns, eta_qy: lt.eta_qy, contrast: contrast_of(model)? })
}
