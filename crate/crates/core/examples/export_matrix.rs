//! Writes the assembled stiffness matrix in coordinate form.

use nonlocal_neumann::prelude::*;

fn main() -> Result<()> {
    let cloud = sample_case(ManifoldCase::Hemisphere3, 4, 1)?;
    let profile = KernelProfile::cosine();
    let kernel = ScaledKernel::new(&profile, cloud.delta, cloud.intrinsic_dim)?;
    let system = assemble(&cloud, &kernel, Mode::Full)?;
    let path = std::env::temp_dir().join("hemisphere3_t4.coo");
    system.export_matrix(&path)?;
    println!(
        "n0={} nnz={} asymmetry={:e} -> {}",
        system.len(),
        system.s.nnz(),
        system.s.asymmetry(),
        path.display()
    );
    Ok(())
}
