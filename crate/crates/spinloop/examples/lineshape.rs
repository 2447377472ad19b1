//! Huang–Rhys lineshapes: a single bundled mode and a two-mode sideband,
//! written as E_meV,density_per_meV to stdout.

use spinloop::presets::load_preset;
use spinloop::spectral::{build_lineshape, HrMode, HuangRhysModel};

fn main() -> spinloop::Result<()> {
    let preset = load_preset("pl1")?;
    let single = build_lineshape(&preset.isc.upper_lineshape.model())?;
    let two = build_lineshape(&HuangRhysModel {
        modes: vec![HrMode { s: 0.5, hw: 30.0 }, HrMode { s: 0.5, hw: 60.0 }],
        sigma: 10.0,
        de: 0.5,
        e_max: 600.0,
    })?;
    eprintln!("bundled PL1 mode: norm {:.6}, first moment {:.3} meV", single.norm(), single.first_moment());
    eprintln!("two-mode: first moment {:.3} meV (S·ħω sum = 45)", two.first_moment());
    println!("E_meV,single,two_mode");
    for ((e, a), b) in single.energies().zip(&single.values).zip(&two.values).step_by(4) {
        println!("{e},{a:.6e},{b:.6e}");
    }
    Ok(())
}
