//! Load the bundled presets, apply an override, audit provenance and show
//! the consistency check catching a corrupted coupling constant.

use spinloop::presets::{load_preset, load_preset_with, provenance_gaps, BUNDLED};

fn main() -> spinloop::Result<()> {
    for name in BUNDLED {
        let p = load_preset(name)?;
        println!(
            "{}: Δ = {} meV, Σ = {} meV, k31 = {} MHz, ISC λ_z = {} GHz ({})",
            p.name, p.gaps.delta.value, p.gaps.sigma.value, p.rates.k31.value, p.isc.lambda_z.value, p.isc.lambda_z.source
        );
        println!("  numeric fields without provenance: {}", provenance_gaps(&p.to_value()).len());
    }
    let p = load_preset_with("pl1", &["gaps.delta=185".to_string()])?;
    println!("override: Δ = {} ({})", p.gaps.delta.value, p.gaps.delta.source);
    match load_preset_with("pl1", &["jt.f=84.07".to_string()]) {
        Ok(_) => println!("corrupted F unexpectedly accepted"),
        Err(e) => println!("corrupted F rejected: {e}"),
    }
    Ok(())
}
