//! Bundled parameter documents for PL1 and PLX1.
//!
//! Every numeric field is stored as `{"value": .., "source": ".."}`; tables
//! (SOC series, hyperfine sites) carry one `source` for the whole block.
//! Documents are checked for internal consistency when loaded.

use crate::isc::{SocParameters, SocSource};
use crate::kinetics::{RadiativeInputs, RateModel};
use crate::spectral::{CcdModel, HrMode, HuangRhysModel};
use crate::spinparams::{SocDataset, SocRow, UnitCell};
use crate::vibronic::{f2_from_apes, JtParameters, PjtParameters, VibronicProblem};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

pub const BUNDLED: [&str; 2] = ["pl1", "plx1"];

const PL1_JSON: &str = include_str!("../presets/pl1.json");
const PLX1_JSON: &str = include_str!("../presets/plx1.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sourced<T = f64> {
    pub value: T,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JtBlock {
    pub e_jt: Sourced,
    pub delta_jt: Sourced,
    pub hw: Sourced,
    pub f: Sourced,
    pub g: Sourced,
    pub n_max: Sourced<usize>,
}

impl JtBlock {
    pub fn params(&self) -> JtParameters {
        JtParameters { e_jt: self.e_jt.value, delta_jt: self.delta_jt.value, hw: self.hw.value, f: self.f.value, g: self.g.value }
    }

    pub fn problem(&self) -> VibronicProblem {
        VibronicProblem::djt(self.params(), self.n_max.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PjtBlock {
    pub lambda_e: Sourced,
    pub hw: Sourced,
    pub e_jt2: Sourced,
    pub c2: Sourced,
    pub f2: Sourced,
    pub n_max: Sourced<usize>,
}

impl PjtBlock {
    pub fn params(&self) -> PjtParameters {
        PjtParameters { lambda_e: self.lambda_e.value, hw: self.hw.value, e_jt2: self.e_jt2.value, c2: self.c2.value, f2: self.f2.value }
    }

    pub fn problem(&self) -> VibronicProblem {
        VibronicProblem::lower_branch(self.params(), self.n_max.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerAlternate {
    pub pjt: PjtBlock,
    pub sigma: Sourced,
    pub gamma_z: Sourced,
    pub ratio: Sourced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gaps {
    pub delta: Sourced,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_check: Option<Sourced>,
    pub sigma: Sourced,
    pub lambda: Sourced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCellBlock {
    pub a0: Sourced,
    pub c0: Sourced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocBlock {
    pub source: String,
    pub dataset: Vec<SocRow>,
    pub unit_cell: UnitCellBlock,
    pub lambda_z0: Sourced,
    pub p: Sourced,
    pub lambda_z: Sourced,
}

impl SocBlock {
    pub fn dataset(&self) -> SocDataset {
        SocDataset { rows: self.dataset.clone() }
    }

    pub fn unit_cell(&self) -> UnitCell {
        UnitCell { a0: self.unit_cell.a0.value, c0: self.unit_cell.c0.value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineshapeBlock {
    pub s: Sourced,
    pub hw: Sourced,
    pub sigma: Sourced,
    pub de: Sourced,
    pub e_max: Sourced,
}

impl LineshapeBlock {
    pub fn model(&self) -> HuangRhysModel {
        HuangRhysModel {
            modes: vec![HrMode { s: self.s.value, hw: self.hw.value }],
            sigma: self.sigma.value,
            de: self.de.value,
            e_max: self.e_max.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IscBlock {
    pub lambda_z: Sourced,
    pub lambda_perp: Sourced,
    pub soc_source: SocSource,
    pub upper_lineshape: LineshapeBlock,
    pub lower_lineshape: LineshapeBlock,
}

impl IscBlock {
    pub fn soc(&self) -> SocParameters {
        SocParameters { lambda_z: self.lambda_z.value, lambda_perp: self.lambda_perp.value, source: self.soc_source }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitedZfs {
    pub d_e: Sourced,
    pub d1_e: Sourced,
    pub d2_e: Sourced,
    pub d1_e_reduced: Sourced,
    pub d2_e_reduced: Sourced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZfsBlock {
    pub d_raw: Sourced,
    pub d_corrected: Sourced,
    pub e: Sourced,
    pub excited: ExcitedZfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiativeBlock {
    pub n: Sourced,
    pub e_zpl: Sourced,
    pub mu: Sourced,
}

impl RadiativeBlock {
    pub fn inputs(&self) -> RadiativeInputs {
        RadiativeInputs { n: self.n.value, e_zpl: self.e_zpl.value, mu: self.mu.value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesBlock {
    pub k31: Sourced,
    pub k42: Sourced,
    pub k35: Sourced,
    pub k45: Sourced,
    pub k51: Sourced,
    pub k52: Sourced,
    pub k_ic: Sourced,
    pub k_ir: Sourced,
    pub p13: Sourced,
    pub p24: Sourced,
    pub gamma_a1: Sourced,
    pub gamma_e12: Sourced,
    pub gamma_a2: Sourced,
}

impl RatesBlock {
    pub fn model(&self) -> RateModel {
        RateModel {
            k31: self.k31.value,
            k42: self.k42.value,
            k35: self.k35.value,
            k45: self.k45.value,
            k51: self.k51.value,
            k52: self.k52.value,
            k_ic: self.k_ic.value,
            k_ir: self.k_ir.value,
            p13: self.p13.value,
            p24: self.p24.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerTargets {
    pub gamma_z: Sourced,
    pub ratio: Sourced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdBlock {
    pub dq: Sourced,
    pub de: Sourced,
    pub hw_g: Sourced,
    pub hw_e: Sourced,
    pub q_range: Sourced,
}

impl CcdBlock {
    pub fn model(&self) -> CcdModel {
        CcdModel { dq: self.dq.value, de: self.de.value, hw_g: self.hw_g.value, hw_e: self.hw_e.value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperfineSite {
    pub site: String,
    pub multiplicity: u32,
    #[serde(rename = "a_MHz")]
    pub a: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperfineBlock {
    pub source: String,
    pub sites: Vec<HyperfineSite>,
}

/// Measured cross-references, never used as inputs unless a block above
/// copies them explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_z: Option<Sourced>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_z_uncertainty: Option<Sourced>,
    pub d: Sourced,
    pub zpl_nm: Sourced,
    pub zpl_ev: Sourced,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifetime_ns: Option<Sourced>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contrast_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectPreset {
    pub name: String,
    pub description: String,
    pub jt: JtBlock,
    pub pjt: PjtBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_alternate: Option<LowerAlternate>,
    pub gaps: Gaps,
    pub soc: SocBlock,
    pub isc: IscBlock,
    pub zfs: ZfsBlock,
    pub radiative: RadiativeBlock,
    pub rates: RatesBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_targets: Option<LowerTargets>,
    pub ccd: CcdBlock,
    pub hyperfine: HyperfineBlock,
    pub experimental: ExperimentalBlock,
}

/// Raw JSON of a bundled preset or a preset file.
pub fn preset_document(selector: &str) -> Result<(String, Value)> {
    let text = match selector.to_ascii_lowercase().as_str() {
        "pl1" => PL1_JSON.to_string(),
        "plx1" => PLX1_JSON.to_string(),
        _ => {
            let path = Path::new(selector);
            if !path.exists() {
                return Err(Error::InvalidInput(format!("unknown preset '{selector}' (bundled: pl1, plx1, or a JSON path)")));
            }
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: selector.to_string(), source })?
        }
    };
    let value = serde_json::from_str(&text).map_err(|e| Error::Parse { path: selector.to_string(), message: e.to_string() })?;
    Ok((selector.to_string(), value))
}

pub fn load_preset(selector: &str) -> Result<DefectPreset> {
    load_preset_with(selector, &[])
}

/// Load, apply `path=value` overrides, then validate.
pub fn load_preset_with(selector: &str, overrides: &[String]) -> Result<DefectPreset> {
    let (origin, mut doc) = preset_document(selector)?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    from_value(doc, &origin)
}

/// Deserialize with the offending field path in the error.
pub fn from_value(doc: Value, origin: &str) -> Result<DefectPreset> {
    let preset: DefectPreset = serde_path_to_error::deserialize(doc).map_err(|e| Error::Parse {
        path: format!("{origin}:{}", e.path()),
        message: e.into_inner().to_string(),
    })?;
    let issues = preset.consistency_issues();
    if !issues.is_empty() {
        return Err(Error::Validation(format!("{} ({origin}): {}", preset.name, issues.join("; "))));
    }
    Ok(preset)
}

pub fn from_json_str(text: &str, origin: &str) -> Result<DefectPreset> {
    let doc = serde_json::from_str(text).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })?;
    from_value(doc, origin)
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn check_jt(block: &JtBlock, at: &str, out: &mut Vec<String>) {
    let p = block.params();
    if !(p.hw > 2.0 * p.g && p.g >= 0.0 && p.f >= 0.0) {
        out.push(format!("{at}: need f, g ≥ 0 and hw > 2g"));
        return;
    }
    let implied = JtParameters::from_coupling(p.f, p.g, p.hw);
    let d = rel_dev(implied.e_jt, p.e_jt);
    if d > 0.01 {
        out.push(format!(
            "{at}: F/E_JT relation E_JT = F²/(2(ħω − 2G)) off by {:.1}% ({:.2} vs {:.2} meV; f: {}, e_jt: {})",
            100.0 * d, implied.e_jt, p.e_jt, block.f.source, block.e_jt.source
        ));
    }
    let implied_delta = 4.0 * p.e_jt * p.g / (p.hw + 2.0 * p.g);
    let d = rel_dev(implied_delta, p.delta_jt);
    if d > 0.01 {
        out.push(format!(
            "{at}: G/δ relation δ = 4E_JT·G/(ħω + 2G) off by {:.1}% ({:.2} vs {:.2} meV; g: {})",
            100.0 * d, implied_delta, p.delta_jt, block.g.source
        ));
    }
}

fn check_pjt(block: &PjtBlock, at: &str, out: &mut Vec<String>) {
    let p = block.params();
    if !(0.0..=1.0).contains(&p.c2) {
        out.push(format!("{at}: C² = {} outside [0, 1]", p.c2));
        return;
    }
    let f2 = f2_from_apes(p.hw, p.e_jt2, p.c2);
    let d = rel_dev(f2, p.f2);
    if d > 0.01 {
        out.push(format!("{at}: F₂ relation F₂ = √(2ħω·E_JT2)/(1 + C²) off by {:.1}% ({f2:.2} vs {:.2} meV; {})", 100.0 * d, p.f2, block.f2.source));
    }
}

impl DefectPreset {
    /// Every failed consistency relation, with the sources involved.
    pub fn consistency_issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        check_jt(&self.jt, "jt", &mut out);
        check_pjt(&self.pjt, "pjt", &mut out);
        if let Some(alt) = &self.lower_alternate {
            check_pjt(&alt.pjt, "lower_alternate.pjt", &mut out);
        }
        let r = &self.rates;
        let k45 = crate::isc::k45_off_resonant(r.gamma_a1.value, r.gamma_e12.value, r.gamma_a2.value);
        if (k45 - r.k45.value).abs() > 0.01 {
            out.push(format!("rates: k45 = (Γ_A1 + 2Γ_E12 + Γ_A2)/4 gives {k45:.3} MHz, preset has {} ({})", r.k45.value, r.k45.source));
        }
        if let Err(e) = r.model().validate() {
            out.push(format!("rates: {e}"));
        }
        if let Err(e) = self.soc.dataset().validate() {
            out.push(format!("soc: {e}"));
        }
        for (name, ls) in [("upper_lineshape", &self.isc.upper_lineshape), ("lower_lineshape", &self.isc.lower_lineshape)] {
            if let Err(e) = ls.model().validate() {
                out.push(format!("isc.{name}: {e}"));
            }
        }
        if !(self.isc.lambda_z.value > 0.0 && self.isc.lambda_perp.value >= 0.0) {
            out.push("isc: λ_z must be positive and λ_⊥ non-negative".into());
        }
        if self.jt.n_max.value < 2 || self.pjt.n_max.value < 2 {
            out.push("n_max must be at least 2".into());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("preset serializes")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("preset serializes")
    }
}

/// Dotted paths of numeric leaves with no enclosing `source` string.
pub fn provenance_gaps(doc: &Value) -> Vec<String> {
    fn walk(v: &Value, path: &str, covered: bool, out: &mut Vec<String>) {
        match v {
            Value::Number(_) if !covered => out.push(path.to_string()),
            Value::Object(map) => {
                let here = covered || map.get("source").and_then(Value::as_str).is_some_and(|s| !s.trim().is_empty());
                for (k, child) in map {
                    walk(child, &join(path, k), here, out);
                }
            }
            Value::Array(items) => {
                for (k, child) in items.iter().enumerate() {
                    walk(child, &join(path, &k.to_string()), covered, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(doc, "", false, &mut out);
    out
}

fn join(a: &str, b: &str) -> String {
    if a.is_empty() {
        b.to_string()
    } else {
        format!("{a}.{b}")
    }
}

/// Apply `dotted.path=value`. The path must already exist; if it names a
/// `{value, source}` object the value is replaced and the source is marked
/// as overridden. The right-hand side is read as JSON, falling back to a
/// string.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::InvalidInput(format!("override '{spec}' is not of the form path=value")))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(Error::InvalidInput(format!("override '{spec}' has an empty path")));
    }
    let new: Value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = &mut *doc;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(|k| items.get_mut(k)),
            _ => None,
        }
        .ok_or_else(|| Error::InvalidInput(format!("override path '{path}' does not exist in the preset")))?;
    }
    match node {
        Value::Object(map) if map.contains_key("value") && !new.is_object() => {
            map.insert("value".into(), new);
            map.insert("source".into(), Value::String(format!("override: {path}={}", raw.trim())));
        }
        other => *other = new,
    }
    Ok(())
}
