//! One full and one reduced solve on the spherical cap.

use nonlocal_neumann::prelude::*;

fn main() -> Result<()> {
    let t = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let case = ManifoldCase::Hemisphere2;
    let cloud = sample_case(case, t, 1)?;
    let profile = KernelProfile::cosine();
    let kernel = ScaledKernel::new(&profile, cloud.delta, cloud.intrinsic_dim)?;
    for mode in [Mode::Full, Mode::Reduced] {
        let system = assemble(&cloud, &kernel, mode)?;
        let sol = solve_mean_zero(&system, &SolveOptions::default())?.require_converged()?;
        let e2 = e2_error(&sol.u, &cloud, |x| case.exact_u(x))?;
        println!(
            "{mode:>7}: n0={} nnz={} iterations={} e2={e2:.4e}",
            cloud.len(),
            system.s.nnz(),
            sol.iterations
        );
    }
    Ok(())
}
