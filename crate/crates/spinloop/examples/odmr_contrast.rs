//! ODMR contrast from the rate tables, and its growth with k45.

use spinloop::kinetics::odmr_contrast;
use spinloop::presets::load_preset;

fn main() -> spinloop::Result<()> {
    for name in ["pl1", "plx1"] {
        let r = load_preset(name)?.rates;
        let c = odmr_contrast(r.k31.value, r.k42.value, r.k45.value, r.k35.value, r.k_ic.value, r.k_ir.value)?;
        println!("{name}: C = {:.2}%", 100.0 * c);
    }
    println!("k45_MHz,contrast_percent");
    for k45 in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0] {
        println!("{k45},{:.3}", 100.0 * odmr_contrast(35.6, 35.6, k45, 0.0, 0.0, 0.0)?);
    }
    Ok(())
}
