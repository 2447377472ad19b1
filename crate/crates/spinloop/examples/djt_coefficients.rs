//! Solve the E⊗e problem for both centers and print the coefficient tables
//! with the Ham reduction factors.

use spinloop::vibronic::{jt_params_from_apes, solve, VibronicProblem, DEFAULT_DJT_N_MAX};

fn main() -> spinloop::Result<()> {
    for (name, e_jt, delta, hw) in [("PL1", 73.62, 18.24, 46.21), ("PLX1", 79.22, 23.01, 54.78)] {
        let params = jt_params_from_apes(e_jt, delta, hw)?;
        let sol = solve(&VibronicProblem::djt(params, DEFAULT_DJT_N_MAX))?;
        println!("{name}: F = {:.2} meV, G = {:.2} meV, E0 = {:.3} meV", params.f, params.g, sol.ground_energy());
        println!("   i      c2      d2      f2");
        for r in sol.table.rows.iter().take(7) {
            println!("{:4} {:7.4} {:7.4} {:7.4}", r.i, r.c2, r.d2, r.f2);
        }
        let s = sol.table.sums();
        let ham = sol.ham.expect("DJT solutions carry p, q");
        println!(" sum {:7.4} {:7.4} {:7.4}", s.c2, s.d2, s.f2);
        println!("p = {:.4}, q = {:.4}\n", ham.p, ham.q);
    }
    Ok(())
}
