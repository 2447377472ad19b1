//! Upper-branch ISC rates versus the ³E–¹A₁ gap for both presets.

use spinloop::isc::sweep_upper;
use spinloop::presets::load_preset;
use spinloop::spectral::build_lineshape;
use spinloop::vibronic::solve;

fn main() -> spinloop::Result<()> {
    for name in ["pl1", "plx1"] {
        let p = load_preset(name)?;
        let table = solve(&p.jt.problem())?.table;
        let f = build_lineshape(&p.isc.upper_lineshape.model())?;
        let gaps: Vec<f64> = (0..=40).map(|k| 10.0 * k as f64).chain([p.gaps.delta.value]).collect::<Vec<_>>();
        let mut gaps = gaps;
        gaps.sort_by(f64::total_cmp);
        gaps.dedup();
        println!("{name}: λ_⊥ = {} GHz ({:?})", p.isc.lambda_perp.value, p.isc.soc_source);
        println!("  gap   Γ_A1    Γ_E12   Γ_A2   ratio");
        for r in sweep_upper(&p.isc.soc(), &table, &f, p.jt.hw.value, &gaps)? {
            let mark = if r.delta == p.gaps.delta.value { " <- preset Δ" } else { "" };
            println!("{:5.0} {:7.3} {:7.3} {:6.3} {:6.3}{mark}", r.delta, r.gamma_a1, r.gamma_e12, r.gamma_a2, r.ratio);
        }
    }
    Ok(())
}
