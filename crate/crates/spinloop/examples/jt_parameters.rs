//! Coupling constants from adiabatic-surface energies: F and G from
//! (E_JT, δ, ħω), and F₂, C² for the lower branch.

use spinloop::vibronic::{f2_from_apes, jt_params_from_apes, mixing_from_amplitudes};

fn main() -> spinloop::Result<()> {
    for (name, e_jt, delta, hw) in [("PL1", 73.62, 18.24, 46.21), ("PLX1", 79.22, 23.01, 54.78), ("linear", 50.0, 0.0, 40.0)] {
        let p = jt_params_from_apes(e_jt, delta, hw)?;
        println!("{name:7} E_JT = {e_jt:6.2}  δ = {delta:5.2}  ħω = {hw:5.2}  ->  F = {:6.2}  G = {:5.2} meV", p.f, p.g);
    }
    for (name, hw, e_jt2, c2) in [("PL1", 36.6, 118.4, 0.89), ("PLX1", 39.5, 109.5, 0.91)] {
        println!("{name:7} F2 = {:.2} meV", f2_from_apes(hw, e_jt2, c2));
    }
    let s2 = 0.055f64 / 0.5;
    println!("C2 with p^2 = 0.5, s^2 = {s2:.3}: {:.3}", mixing_from_amplitudes(0.5f64.sqrt(), s2.sqrt())?);
    Ok(())
}
