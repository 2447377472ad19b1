//! Golden-rule intersystem-crossing rates for the upper (³E → ¹A₁) and
//! lower (¹E → ³A₂) branches.
//!
//! SOC constants are given as frequencies in GHz and converted to energies
//! ε = h·ν in meV; a channel rate is `prefactor · ε² · Σ wᵢ F(gap − i·ħω) / ħ`.

use crate::spectral::{evaluate_shifted, SpectralFunction};
use crate::vibronic::{CoefficientTable, ProblemKind};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Planck constant, meV·s.
pub const H_MEV_S: f64 = 4.135_667_696e-12;
/// Reduced Planck constant, meV·s.
pub const HBAR_MEV_S: f64 = 6.582_119_569e-13;
pub const PERP_RATIO: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SocSource {
    Computed,
    Experimental,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocParameters {
    /// GHz.
    pub lambda_z: f64,
    /// GHz.
    pub lambda_perp: f64,
    pub source: SocSource,
}

impl SocParameters {
    /// λ_⊥ = 1.2·λ_z.
    pub fn from_lambda_z(lambda_z: f64, source: SocSource) -> Self {
        SocParameters { lambda_z, lambda_perp: PERP_RATIO * lambda_z, source }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SocParameters { lambda_z: self.lambda_z * factor, lambda_perp: self.lambda_perp * factor, ..*self }
    }
}

/// GHz → meV.
pub fn soc_energy(ghz: f64) -> f64 {
    H_MEV_S * ghz * 1e9
}

/// Rate in MHz for prefactor·ε²·(density sum)/ħ.
fn rate_mhz(prefactor: f64, ghz: f64, density: f64) -> f64 {
    let e = soc_energy(ghz);
    prefactor * e * e * density / HBAR_MEV_S * 1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperIscResult {
    pub delta: f64,
    pub gamma_a1: f64,
    pub gamma_e12: f64,
    pub gamma_a2: f64,
    pub ratio: f64,
    pub k45: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerIscResult {
    pub sigma: f64,
    pub gamma_z: f64,
    pub gamma_pm: f64,
    pub gamma_mp: f64,
    pub gamma_perp: f64,
    pub gamma_total: f64,
    pub ratio: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

fn check_table(table: &CoefficientTable, kind: ProblemKind) -> Result<()> {
    if table.kind != kind {
        return Err(Error::InvalidInput(format!("expected a {kind:?} coefficient table")));
    }
    let total = table.total();
    if (total - 1.0).abs() > 1e-3 {
        return Err(Error::InvalidInput(format!("coefficient table sums to {total}, not 1")));
    }
    Ok(())
}

/// Σᵢ wᵢ·F(gap − i·ħω) for each of the four table columns.
fn shifted_sums(table: &CoefficientTable, f: &SpectralFunction, hw: f64, gap: f64) -> [f64; 4] {
    let mut s = [0.0; 4];
    for r in &table.rows {
        let v = evaluate_shifted(f, gap, r.i as f64 * hw);
        s[0] += r.c2 * v;
        s[1] += r.d2 * v;
        s[2] += r.f2 * v;
        s[3] += r.g2 * v;
    }
    s
}

pub fn k45_off_resonant(gamma_a1: f64, gamma_e12: f64, gamma_a2: f64) -> f64 {
    (gamma_a1 + 2.0 * gamma_e12 + gamma_a2) / 4.0
}

/// Γ_A1 = 4π·ε_⊥²·Σcᵢ²F/ħ, Γ_E12 with dᵢ²/2, Γ_A2 with fᵢ².
pub fn upper_isc(soc: &SocParameters, table: &CoefficientTable, f: &SpectralFunction, hw: f64, delta: f64) -> Result<UpperIscResult> {
    check_table(table, ProblemKind::Djt)?;
    if delta < 0.0 {
        return Err(Error::InvalidInput("Δ must be non-negative".into()));
    }
    let [c, d, fs, _] = shifted_sums(table, f, hw, delta);
    let k = |s: f64| rate_mhz(4.0 * PI, soc.lambda_perp, s);
    let (a1, e12, a2) = (k(c), k(0.5 * d), k(fs));
    Ok(UpperIscResult { delta, gamma_a1: a1, gamma_e12: e12, gamma_a2: a2, ratio: ratio(e12, a1), k45: k45_off_resonant(a1, e12, a2) })
}

/// Γ_z = 8π·ε_z²·C²·Σd′ᵢ²L/ħ; Γ_± and Γ_∓ = 2π·ε_⊥²·(1−C²)·Σ(c′ᵢ² or f′ᵢ²)L/ħ.
pub fn lower_isc(soc: &SocParameters, table: &CoefficientTable, c2: f64, l: &SpectralFunction, hw: f64, sigma: f64) -> Result<LowerIscResult> {
    check_table(table, ProblemKind::LowerBranch)?;
    if !(0.0..=1.0).contains(&c2) {
        return Err(Error::InvalidInput(format!("C² = {c2} outside [0, 1]")));
    }
    let [c, d, fs, _] = shifted_sums(table, l, hw, sigma);
    let gz = rate_mhz(8.0 * PI, soc.lambda_z, c2 * d);
    let gpm = rate_mhz(2.0 * PI, soc.lambda_perp, (1.0 - c2) * c);
    let gmp = rate_mhz(2.0 * PI, soc.lambda_perp, (1.0 - c2) * fs);
    let perp = gpm + gmp;
    Ok(LowerIscResult { sigma, gamma_z: gz, gamma_pm: gpm, gamma_mp: gmp, gamma_perp: perp, gamma_total: gz + perp, ratio: ratio(gz, perp) })
}

pub fn sweep_upper(soc: &SocParameters, table: &CoefficientTable, f: &SpectralFunction, hw: f64, gaps: &[f64]) -> Result<Vec<UpperIscResult>> {
    check_monotone(gaps)?;
    gaps.iter().map(|&g| upper_isc(soc, table, f, hw, g)).collect()
}

pub fn sweep_lower(soc: &SocParameters, table: &CoefficientTable, c2: f64, l: &SpectralFunction, hw: f64, gaps: &[f64]) -> Result<Vec<LowerIscResult>> {
    check_monotone(gaps)?;
    gaps.iter().map(|&g| lower_isc(soc, table, c2, l, hw, g)).collect()
}

fn check_monotone(gaps: &[f64]) -> Result<()> {
    if gaps.is_empty() {
        return Err(Error::InvalidInput("empty gap grid".into()));
    }
    if gaps.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("gap grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Rates under 1e-6 MHz are written as zero.
pub fn clip_rate(r: f64) -> f64 {
    if r.abs() < 1e-6 {
        0.0
    } else {
        r
    }
}
