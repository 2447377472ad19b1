//! Finite-size extrapolation of the axial SOC constant from the bundled
//! supercell series, then Ham reduction to the value used in the ³E manifold.

use spinloop::spinparams::{reduce_soc, soc_fit, Exclusion, SocDataset, UnitCell};
use std::path::Path;

fn main() -> spinloop::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for (name, p) in [("pl1", 0.0704), ("plx1", 0.087)] {
        let data = SocDataset::read_csv(&dir.join(format!("soc_{name}.csv")))?;
        let fit = soc_fit(&data, &UnitCell::default(), &Exclusion::Auto)?;
        let m = fit.model;
        println!("{name}: lambda_z0 = {:.3} GHz  (A = {:.4}, B = {:.4}, C = {:.4})", m.lambda_z0, m.a, m.b, m.c);
        println!("  rms {:.3} GHz over {} rows, excluded {:?}, all-rows SSR {:?}", fit.rms, data.rows.len() - fit.excluded.len(), fit.excluded, fit.ssr_all_rows.map(|s| (s * 1e3).round() / 1e3));
        println!("  reduced lambda_z (p = {p}) = {:.3} GHz", reduce_soc(m.lambda_z0, p)?);
    }
    Ok(())
}
