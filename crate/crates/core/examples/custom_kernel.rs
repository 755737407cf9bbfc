//! Solves with a tabulated kernel profile instead of the cosine.

use nonlocal_neumann::prelude::*;

fn main() -> Result<()> {
    let table: String = (0..=100)
        .map(|i| {
            let r = i as f64 / 100.0;
            format!("{r} {}\n", (1.0 - r * r).powi(2))
        })
        .collect();
    let profile = KernelProfile::from_table_text(&table)?;
    let case = ManifoldCase::Hemisphere2;
    for t in [10, 20, 40] {
        let cloud = sample_case(case, t, 1)?;
        let kernel = ScaledKernel::new(&profile, cloud.delta, 2)?;
        let system = assemble(&cloud, &kernel, Mode::Full)?;
        let sol = solve_mean_zero(&system, &SolveOptions::default().with_jacobi(true))?;
        println!("t={t:>2} e2={:.4e}", e2_error(&sol.u, &cloud, |x| case.exact_u(x))?);
    }
    Ok(())
}
