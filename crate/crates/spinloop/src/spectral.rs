//! Huang–Rhys phonon-overlap lineshapes and configuration-coordinate checks.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SIGMA: f64 = 10.0;
pub const DEFAULT_DE: f64 = 0.5;
pub const DEFAULT_E_MAX: f64 = 600.0;

/// Grid starts this many σ below zero so the zero-phonon Gaussian is whole.
const LOWER_SIGMAS: f64 = 6.0;
const STICK_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrMode {
    pub s: f64,
    /// meV.
    pub hw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuangRhysModel {
    pub modes: Vec<HrMode>,
    pub sigma: f64,
    pub de: f64,
    pub e_max: f64,
}

impl HuangRhysModel {
    pub fn single(s: f64, hw: f64, sigma: f64) -> Self {
        HuangRhysModel { modes: vec![HrMode { s, hw }], sigma, de: DEFAULT_DE, e_max: DEFAULT_E_MAX }
    }

    pub fn total_s(&self) -> f64 {
        self.modes.iter().map(|m| m.s).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !(self.de > 0.0) || !(self.e_max > 0.0) {
            return Err(Error::InvalidInput("σ, δE and E_max must be positive".into()));
        }
        for m in &self.modes {
            if !(m.s >= 0.0 && m.s.is_finite()) || !(m.hw > 0.0) {
                return Err(Error::InvalidInput(format!("invalid mode S = {}, ħω = {}", m.s, m.hw)));
            }
        }
        if self.de > self.sigma / 2.0 {
            return Err(Error::Resolution { de: self.de, half_sigma: self.sigma / 2.0 });
        }
        Ok(())
    }

    /// Zero-phonon plus sideband lines (energy, weight) before broadening,
    /// as the convolution of each mode's Poisson progression.
    pub fn sticks(&self) -> Vec<(f64, f64)> {
        let cutoff = self.e_max + LOWER_SIGMAS * self.sigma;
        let mut lines = vec![(0.0, 1.0)];
        for mode in &self.modes {
            let progression = poisson_progression(mode.s, mode.hw, cutoff);
            let mut next = Vec::with_capacity(lines.len() * progression.len());
            for &(e0, w0) in &lines {
                for &(e1, w1) in &progression {
                    let (e, w) = (e0 + e1, w0 * w1);
                    if e <= cutoff && w > STICK_FLOOR {
                        next.push((e, w));
                    }
                }
            }
            lines = next;
        }
        lines
    }
}

fn poisson_progression(s: f64, hw: f64, cutoff: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut w = (-s).exp();
    let mut n = 0usize;
    loop {
        let e = n as f64 * hw;
        if e > cutoff {
            break;
        }
        if w > STICK_FLOOR {
            out.push((e, w));
        } else if n as f64 > s {
            break;
        }
        n += 1;
        w *= s / n as f64;
        if s == 0.0 {
            break;
        }
    }
    out
}

/// Normalized density on a uniform grid, meV⁻¹.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralFunction {
    pub e0: f64,
    pub de: f64,
    pub values: Vec<f64>,
    pub sigma: f64,
    /// |∫F − 1| of the raw broadened sum before rescaling.
    pub normalization_residual: f64,
}

impl SpectralFunction {
    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.e0 + k as f64 * self.de)
    }

    pub fn e_end(&self) -> f64 {
        self.e0 + (self.values.len() - 1) as f64 * self.de
    }

    /// Linear interpolation; zero outside the grid.
    pub fn value_at(&self, e: f64) -> f64 {
        let t = (e - self.e0) / self.de;
        if !(t >= 0.0) || t > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let j = t.floor() as usize;
        let frac = t - j as f64;
        if frac < 1e-12 || j + 1 >= self.values.len() {
            return self.values[j];
        }
        self.values[j] * (1.0 - frac) + self.values[j + 1] * frac
    }

    /// Trapezoid integral of `g(E)·F(E)`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let n = self.values.len();
        let mut s = 0.0;
        for (k, (e, v)) in self.energies().zip(&self.values).enumerate() {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            s += w * g(e) * v;
        }
        s * self.de
    }

    pub fn norm(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn first_moment(&self) -> f64 {
        self.integrate(|e| e)
    }
}

pub fn build_lineshape(model: &HuangRhysModel) -> Result<SpectralFunction> {
    model.validate()?;
    let sticks = model.sticks();
    let lower = (LOWER_SIGMAS * model.sigma / model.de).ceil();
    let e0 = -lower * model.de;
    let n = lower as usize + (model.e_max / model.de).round() as usize + 1;
    let mut values = vec![0.0; n];
    let inv = 1.0 / (model.sigma * (2.0 * std::f64::consts::PI).sqrt());
    let reach = 10.0 * model.sigma;
    for &(ec, w) in &sticks {
        let lo = (((ec - reach - e0) / model.de).floor().max(0.0)) as usize;
        let hi = ((((ec + reach - e0) / model.de).ceil()) as usize).min(n - 1);
        for (k, v) in values.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let x = (e0 + k as f64 * model.de - ec) / model.sigma;
            *v += w * inv * (-0.5 * x * x).exp();
        }
    }
    let mut f = SpectralFunction { e0, de: model.de, values, sigma: model.sigma, normalization_residual: 0.0 };
    let raw = f.norm();
    if !(raw > 0.0) {
        return Err(Error::InvalidInput("lineshape has no weight on the grid".into()));
    }
    f.values.iter_mut().for_each(|v| *v /= raw);
    f.normalization_residual = (raw - 1.0).abs();
    Ok(f)
}

/// F(Δ − shift), zero below the grid start (no anti-Stokes lines at 0 K).
pub fn evaluate_shifted(f: &SpectralFunction, delta: f64, shift: f64) -> f64 {
    f.value_at(delta - shift)
}

/// Two displaced harmonic surfaces along one configuration coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcdModel {
    /// √amu·Å.
    pub dq: f64,
    /// eV.
    pub de: f64,
    /// meV.
    pub hw_g: f64,
    /// meV.
    pub hw_e: f64,
}

/// amu·Å²/ħ² in meV⁻¹: k = KAPPA·(ħΩ)² gives meV/(amu·Å²).
const KAPPA: f64 = 1.660_539_066_60e-47 / (1.054_571_817e-34 * 1.054_571_817e-34) * 1.602_176_634e-22;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub crossings: Vec<f64>,
    pub huang_rhys: f64,
    pub q_range: f64,
    /// meV/(amu·Å²).
    pub k_g: f64,
    pub k_e: f64,
}

impl CrossingReport {
    pub fn has_crossing(&self) -> bool {
        !self.crossings.is_empty()
    }
}

impl CcdModel {
    pub fn stiffness(hw: f64) -> f64 {
        KAPPA * hw * hw
    }

    /// Ground and excited energies at Q, meV.
    pub fn energies(&self, q: f64) -> (f64, f64) {
        let kg = Self::stiffness(self.hw_g);
        let ke = Self::stiffness(self.hw_e);
        (0.5 * kg * q * q, self.de * 1000.0 + 0.5 * ke * (q - self.dq).powi(2))
    }
}

pub fn ccd_crossing(model: &CcdModel, q_range: f64) -> Result<CrossingReport> {
    if !(model.hw_g > 0.0 && model.hw_e > 0.0) {
        return Err(Error::InvalidInput("mode quanta must be positive".into()));
    }
    if !(q_range > 0.0) {
        return Err(Error::InvalidInput("Q range must be positive".into()));
    }
    let kg = CcdModel::stiffness(model.hw_g);
    let ke = CcdModel::stiffness(model.hw_e);
    // E_e − E_g = a Q² + b Q + c
    let a = 0.5 * (ke - kg);
    let b = -ke * model.dq;
    let c = model.de * 1000.0 + 0.5 * ke * model.dq * model.dq;
    let mut roots = Vec::new();
    if a.abs() < 1e-12 * ke.max(kg) {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let qq = -0.5 * (b + b.signum() * sq);
            roots.push(qq / a);
            if qq != 0.0 {
                roots.push(c / qq);
            }
        }
    }
    let mut crossings: Vec<f64> = roots.into_iter().filter(|q| q.abs() <= q_range).collect();
    crossings.sort_by(f64::total_cmp);
    crossings.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    Ok(CrossingReport {
        crossings,
        huang_rhys: 0.5 * kg * model.dq * model.dq / model.hw_g,
        q_range,
        k_g: kg,
        k_e: ke,
    })
}
