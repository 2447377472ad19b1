//! Preset generation: grid search over single-mode Huang–Rhys lineshapes
//! (S, ħω, σ) against target ISC rates. Prints the best candidates for
//! each preset slot; the chosen values live in presets/*.json.
//!
//! Run with `cargo run --release --example calibrate_lineshape`.

use spinloop::isc::{lower_isc, upper_isc, SocParameters, SocSource};
use spinloop::spectral::{build_lineshape, HuangRhysModel, SpectralFunction};
use spinloop::vibronic::{f2_from_apes, jt_params_from_apes, solve, CoefficientTable, PjtParameters, VibronicProblem};
use spinloop::Result;

const SIGMAS: [f64; 12] = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 15.0];

fn lg(x: f64, target: f64) -> f64 {
    (x.max(1e-9) / target).ln().powi(2)
}

struct Candidate {
    cost: f64,
    model: (f64, f64, f64),
    summary: String,
}

fn search<F: Fn(&SpectralFunction) -> Result<(f64, String)>>(title: &str, s_max: f64, objective: F) -> Result<()> {
    let mut best: Vec<Candidate> = Vec::new();
    for &sigma in &SIGMAS {
        for si in 1..=(s_max / 0.25) as usize {
            let s = si as f64 * 0.25;
            for hi in 0..=140 {
                let hw = 10.0 + 0.5 * hi as f64;
                let f = build_lineshape(&HuangRhysModel::single(s, hw, sigma))?;
                let (cost, summary) = objective(&f)?;
                best.push(Candidate { cost, model: (s, hw, sigma), summary });
                if best.len() > 64 {
                    best.sort_by(|a, b| a.cost.total_cmp(&b.cost));
                    best.truncate(8);
                }
            }
        }
    }
    best.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    println!("{title}");
    for c in best.iter().take(5) {
        println!("  S = {:5.2}, hw = {:5.1}, sigma = {:4.1}  cost {:.2e}  {}", c.model.0, c.model.1, c.model.2, c.cost, c.summary);
    }
    Ok(())
}

fn djt_table(e_jt: f64, delta: f64, hw: f64) -> Result<CoefficientTable> {
    Ok(solve(&VibronicProblem::djt(jt_params_from_apes(e_jt, delta, hw)?, 10))?.table)
}

fn main() -> Result<()> {
    let pl1 = djt_table(73.62, 18.24, 46.21)?;
    let soc = SocParameters::from_lambda_z(3.538, SocSource::Experimental);
    search("PL1 upper (13.60 / 6.85 / 0.46 MHz at 160, ratio 0.55 at 185)", 6.0, |f| {
        let a = upper_isc(&soc, &pl1, f, 46.21, 160.0)?;
        let b = upper_isc(&soc, &pl1, f, 46.21, 185.0)?;
        let cost = 4.0 * lg(a.gamma_a1, 13.60) + lg(a.gamma_e12, 6.85) + 0.25 * lg(a.gamma_a2, 0.46) + 4.0 * (b.ratio - 0.55).powi(2);
        Ok((cost, format!("A1 {:.2} E12 {:.2} A2 {:.2} r160 {:.3} r185 {:.3}", a.gamma_a1, a.gamma_e12, a.gamma_a2, a.ratio, b.ratio)))
    })?;

    let plx1 = djt_table(79.22, 23.01, 54.78)?;
    let soc = SocParameters::from_lambda_z(0.85, SocSource::Computed);
    search("PLX1 upper (0.95 / 0.03 MHz at 62)", 10.0, |f| {
        let a = upper_isc(&soc, &plx1, f, 54.78, 62.0)?;
        let cost = 4.0 * lg(a.gamma_a1, 0.95) + 0.25 * lg(a.gamma_e12 + 0.01, 0.04);
        Ok((cost, format!("A1 {:.3} E12 {:.3} A2 {:.3} r62 {:.3}", a.gamma_a1, a.gamma_e12, a.gamma_a2, a.ratio)))
    })?;

    let main = PjtParameters { lambda_e: 847.0, hw: 36.6, e_jt2: 118.4, c2: 0.89, f2: 49.3 };
    let alt = PjtParameters { lambda_e: 620.0, c2: 0.88, f2: f2_from_apes(36.6, 118.4, 0.88), ..main };
    let t_main = solve(&VibronicProblem::lower_branch(main, 10))?.table;
    let t_alt = solve(&VibronicProblem::lower_branch(alt, 10))?.table;
    let soc = SocParameters::from_lambda_z(3.538, SocSource::Experimental);
    search("PL1 lower (ratio 3.30, Γz 0.19 at 146; ratio 2.83, Γz 0.06 at 290)", 10.0, |l| {
        let a = lower_isc(&soc, &t_main, main.c2, l, main.hw, 146.0)?;
        let b = lower_isc(&soc, &t_alt, alt.c2, l, alt.hw, 290.0)?;
        let cost = (a.ratio - 3.30).powi(2) + (b.ratio - 2.83).powi(2) + 0.5 * lg(a.gamma_z, 0.19) + 0.5 * lg(b.gamma_z, 0.06);
        Ok((cost, format!("r146 {:.2} Gz {:.3} | r290 {:.2} Gz {:.3}", a.ratio, a.gamma_z, b.ratio, b.gamma_z)))
    })?;
    Ok(())
}
