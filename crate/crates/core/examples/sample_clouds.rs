//! Samples both test manifolds and reports their discrete measures.

use std::f64::consts::PI;

use nonlocal_neumann::geometry::{sample_case, write_cloud_csv, ManifoldCase};

fn main() -> nonlocal_neumann::Result<()> {
    for (case, ts, area, length) in [
        (ManifoldCase::Hemisphere2, [5, 10, 20, 40], PI, 3f64.sqrt() * PI),
        (ManifoldCase::Hemisphere3, [4, 6, 8, 10], PI * PI, 4.0 * PI),
    ] {
        for t in ts {
            let c = sample_case(case, t, 1)?;
            println!(
                "{case} t={t:>2}: n0={:>6} m0={:>5} delta={:.4} sum A={:.4} ({area:.4}) sum L={:.4} ({length:.4})",
                c.len(),
                c.boundary_len(),
                c.delta,
                c.total_volume(),
                c.total_boundary()
            );
        }
    }
    let c = sample_case(ManifoldCase::Hemisphere2, 10, 1)?;
    let path = std::env::temp_dir().join("hemisphere2_t10.csv");
    std::fs::write(&path, write_cloud_csv(&c)).map_err(|e| nonlocal_neumann::Error::io(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}
