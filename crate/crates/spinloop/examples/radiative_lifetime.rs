//! Radiative rate from the dipole moment, then lifetime and quantum yield
//! with the ISC loss channel.

use spinloop::kinetics::{pl_lifetime, radiative_rate};
use spinloop::presets::load_preset;

fn main() -> spinloop::Result<()> {
    for name in ["pl1", "plx1"] {
        let p = load_preset(name)?;
        let k = radiative_rate(&p.radiative.inputs())?;
        let lt = pl_lifetime(k, p.rates.k45.value, p.rates.k_ir.value)?;
        println!(
            "{name}: k_rad = {k:.2} MHz (τ_rad = {:.1} ns); with k_ph = k45 = {}: τ_PL = {:.2} ns, η_QY = {:.2}%",
            1e3 / k,
            p.rates.k45.value,
            lt.tau_pl_ns,
            100.0 * lt.eta_qy
        );
    }
    Ok(())
}
