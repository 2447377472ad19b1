//! Spin-contamination correction and D/E extraction for the bundled sample
//! tensors, plus a rotated rhombic tensor.

use nalgebra::{Matrix3, Rotation3, Vector3};
use spinloop::spinparams::{decontaminate, extract_de, ZfsTensor, ZfsUnit};
use std::path::Path;

fn main() -> spinloop::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for name in ["pl1", "plx1"] {
        let dt = ZfsTensor::read_json(&dir.join(format!("zfs_dt_{name}.json")))?;
        let ds = ZfsTensor::read_json(&dir.join(format!("zfs_ds_{name}.json")))?;
        let raw = extract_de(&dt)?;
        let fixed = extract_de(&decontaminate(&dt, &ds)?)?;
        println!("{name}: D raw {:.3} GHz -> corrected {:.3} GHz, E {:.3}", raw.d, fixed.d, fixed.e);
    }
    let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), 0.4) * Rotation3::from_axis_angle(&Vector3::z_axis(), 1.1);
    let m = rot.matrix() * Matrix3::from_diagonal(&Vector3::new(-700.0, -500.0, 1200.0)) * rot.matrix().transpose();
    let p = extract_de(&ZfsTensor::from_matrix(ZfsUnit::MHz, &m))?;
    println!("rotated rhombic: D = {:.3} MHz, E = {:.3} MHz, z axis {:?}", p.d, p.e, p.axes[2].map(|x| (x * 1e4).round() / 1e4));
    Ok(())
}
