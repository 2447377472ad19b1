//! Configuration-coordinate check: do the ³A₂ and ³E parabolas cross?

use spinloop::presets::load_preset;
use spinloop::spectral::{ccd_crossing, CcdModel};

fn main() -> spinloop::Result<()> {
    for name in ["pl1", "plx1"] {
        let p = load_preset(name)?;
        let rep = ccd_crossing(&p.ccd.model(), p.ccd.q_range.value)?;
        println!("{name}: ΔQ = {} √amu·Å, ΔE = {} eV, S = {:.2}, crossings within ±{}: {:?}", p.ccd.dq.value, p.ccd.de.value, rep.huang_rhys, rep.q_range, rep.crossings);
    }
    let sym = CcdModel { dq: 1.0, de: 0.0, hw_g: 40.0, hw_e: 40.0 };
    println!("ΔE = 0, equal quanta: {:?}", ccd_crossing(&sym, 3.0)?.crossings);
    Ok(())
}
