//! Damped Picard iteration for -Δu + λu|u|^{2p-2} = f and its energy trace.

use nonlocal_neumann::geometry::{sample_case, ManifoldCase, Mode};
use nonlocal_neumann::assembly::weighted_mean;
use nonlocal_neumann::harness::{e2_error, e2_from_samples};
use nonlocal_neumann::kernels::{KernelProfile, ScaledKernel};
use nonlocal_neumann::variants::{manufactured_nonlinear, nonlinear_solve, NonlinearProblem, Variant, VariantConfig};

fn main() -> nonlocal_neumann::Result<()> {
    let case = ManifoldCase::Hemisphere2;
    let cloud = sample_case(case, 20, 1)?;
    let profile = KernelProfile::cosine();
    let kernel = ScaledKernel::new(&profile, cloud.delta, 2)?;
    for p in [1.5, 2.0] {
        let man = manufactured_nonlinear(case, 1.0, p);
        let problem = NonlinearProblem::new(&cloud, &kernel, Mode::Full, 1.0, p, &*man.f)?;
        let out = nonlinear_solve(&problem, &VariantConfig { p, ..VariantConfig::new(Variant::Nonlinear) })?;
        let a = &cloud.volume_weights;
        let exact: Vec<f64> = (0..cloud.len()).map(|i| case.exact_u(cloud.point(i))).collect();
        let shift = weighted_mean(&out.solve.u, a) - weighted_mean(&exact, a);
        let centred: Vec<f64> = out.solve.u.iter().map(|u| u - shift).collect();
        println!(
            "p={p}: {} steps, residual {:.2e}, e2 {:.4e}, e2 after removing the mean {:.4e}",
            out.picard_iterations,
            out.nonlinear_residual,
            e2_error(&out.solve.u, &cloud, |x| case.exact_u(x))?,
            e2_from_samples(&centred, &exact, a)?
        );
        for (k, j) in out.energies.iter().enumerate().step_by(5) {
            println!("  J[{k:>2}] = {j:.10e}");
        }
    }
    Ok(())
}
