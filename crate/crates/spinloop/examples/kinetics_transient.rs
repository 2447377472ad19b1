//! Five-level loop: PL decay after a pulse into ³E, then the steady state
//! under weak continuous pumping.

use spinloop::kinetics::{steady_state, transient};
use spinloop::presets::load_preset;

fn main() -> spinloop::Result<()> {
    let model = load_preset("pl1")?.rates.model();
    let grid: Vec<f64> = (0..=20).map(|k| 10.0 * k as f64).collect();
    let mut pulse = model;
    pulse.p13 = 0.0;
    pulse.p24 = 0.0;
    let res = transient(&pulse, &[0.0, 0.0, 0.5, 0.5, 0.0], &grid)?;
    let tr = res.trajectory.expect("trajectory");
    println!("t_ns,n1,n2,n3,n4,n5,PL_MHz");
    for ((t, n), pl) in tr.t_ns.iter().zip(&tr.populations).zip(&tr.pl_mhz) {
        println!("{t},{:.5},{:.5},{:.5},{:.5},{:.5},{:.4}", n[0], n[1], n[2], n[3], n[4], pl);
    }
    let ss = steady_state(&model)?;
    eprintln!("steady state (P = 1 MHz): n = {:?}", ss.populations.map(|x| (x * 1e5).round() / 1e5));
    eprintln!("ms=0 polarization n1/(n1+n2) = {:.4}", ss.populations[0] / (ss.populations[0] + ss.populations[1]));
    Ok(())
}
