//! Boundary-sum and omega-hat deviations on the cap boundary circle.

use nonlocal_neumann::geometry::ManifoldCase;
use nonlocal_neumann::harness::lemma_diagnostics;
use nonlocal_neumann::kernels::KernelProfile;

fn main() -> nonlocal_neumann::Result<()> {
    let deltas = [0.4, 0.2, 0.1, 0.05, 0.025];
    let rep = lemma_diagnostics(ManifoldCase::Hemisphere2, &deltas, &KernelProfile::cosine(), None)?;
    println!("C_R = {:.10}", rep.cr);
    for r in &rep.rows {
        println!(
            "delta={:.3} points={:>5} |B-C_R|={:.3e} |omega-delta C_R|={:.3e}",
            r.delta, r.boundary_points, r.boundary_deviation, r.omega_deviation
        );
    }
    println!("orders: boundary {:.3}, omega {:.3}", rep.boundary_order, rep.omega_order);
    Ok(())
}
