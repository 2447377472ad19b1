//! Lower-branch ISC rates versus the ¹E–³A₂ gap, with the main and the
//! alternate PL1 parameter sets.

use spinloop::isc::{lower_isc, sweep_lower};
use spinloop::presets::load_preset;
use spinloop::spectral::build_lineshape;
use spinloop::vibronic::solve;

fn main() -> spinloop::Result<()> {
    let p = load_preset("pl1")?;
    let l = build_lineshape(&p.isc.lower_lineshape.model())?;
    let soc = p.isc.soc();
    let alt = p.lower_alternate.as_ref().expect("PL1 ships an alternate set");
    for (label, block, gap) in [("main", &p.pjt, p.gaps.sigma.value), ("alternate", &alt.pjt, alt.sigma.value)] {
        let table = solve(&block.problem())?.table;
        let (c2, hw) = (block.c2.value, block.hw.value);
        let at = lower_isc(&soc, &table, c2, &l, hw, gap)?;
        println!("{label}: Σ = {gap} meV  Γ_z = {:.3}  Γ_⊥ = {:.3} MHz  Γ_z/Γ_⊥ = {:.2}", at.gamma_z, at.gamma_perp, at.ratio);
        let grid: Vec<f64> = (0..=20).map(|k| 20.0 * k as f64).collect();
        for r in sweep_lower(&soc, &table, c2, &l, hw, &grid)?.iter().filter(|r| r.gamma_total > 1e-4) {
            println!("    {:5.0} {:8.4} {:8.4} {:6.2}", r.sigma, r.gamma_z, r.gamma_perp, r.ratio);
        }
    }
    Ok(())
}
