//! Symmetry-adapted orbitals for the divacancy and NV-like site bases, and
//! the two-hole multiplets built from {a, e_x, e_y}.

use spinloop::multiplets::{project_salcs, real_singlet_basis_change, two_hole_multiplets, Configuration, PointGroupC3v, SiteBasis};

fn main() -> spinloop::Result<()> {
    let group = PointGroupC3v::new();
    for basis in [SiteBasis::divacancy(&group), SiteBasis::nv(&group)] {
        println!("basis {:?}: {:?}", basis.labels, basis.decomposition(&group));
        for o in project_salcs(&basis, &group)?.orbitals {
            let c: Vec<String> = o.coefficients.iter().map(|x| format!("{x:+.4}")).collect();
            println!("  {:6} {:?}  [{}]", o.label, o.irrep, c.join(" "));
        }
    }
    for config in [Configuration::EE, Configuration::AE, Configuration::AA] {
        for m in two_hole_multiplets(config) {
            println!("{config} {} (2S = {}): {} states", m.term, m.two_s, m.states.len());
            for s in &m.states {
                let terms: Vec<String> = s.terms.iter().map(|t| format!("{:+.3}|{:?}{:?};{:?}{:?}>", t.coefficient, t.orbitals.0, t.orbitals.1, t.spins.0, t.spins.1)).collect();
                println!("    {:12} {}", s.label, terms.join(" "));
            }
        }
    }
    println!("singlet transform (rows 1E_x, 1E_y, 1A1 over xx, xy, yy):\n{}", real_singlet_basis_change());
    Ok(())
}
