//! Lower-branch (¹E ground) vibronic problem: primed coefficients.

use spinloop::vibronic::{solve, PjtParameters, VibronicProblem, DEFAULT_LOWER_N_MAX};

fn main() -> spinloop::Result<()> {
    let sets = [
        ("PL1", PjtParameters { lambda_e: 847.0, hw: 36.6, e_jt2: 118.4, c2: 0.89, f2: 49.3 }),
        ("PLX1", PjtParameters { lambda_e: 891.0, hw: 39.5, e_jt2: 109.5, c2: 0.91, f2: 48.7 }),
    ];
    for (name, p) in sets {
        let sol = solve(&VibronicProblem::lower_branch(p, DEFAULT_LOWER_N_MAX))?;
        println!("{name}: ground {:.3} meV above ħω_E", sol.ground_energy() - p.hw);
        println!("   i     c'2     d'2     f'2     g'2");
        for r in sol.table.rows.iter().take(5) {
            println!("{:4} {:7.4} {:7.4} {:7.4} {:7.4}", r.i, r.c2, r.d2, r.f2, r.g2);
        }
        let s = sol.table.sums();
        println!(" sum {:7.4} {:7.4} {:7.4} {:7.4}  (forbidden {:.1e})\n", s.c2, s.d2, s.f2, s.g2, sol.table.forbidden);
    }
    Ok(())
}
