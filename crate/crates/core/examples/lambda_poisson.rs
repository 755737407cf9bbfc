//! The coercive problem -Δu + λu = f with a manufactured solution.

use nonlocal_neumann::geometry::{ManifoldCase, Mode};
use nonlocal_neumann::harness::run_single;
use nonlocal_neumann::kernels::KernelProfile;
use nonlocal_neumann::variants::{Field, Variant, VariantConfig};

fn main() -> nonlocal_neumann::Result<()> {
    let profile = KernelProfile::cosine();
    for lambda in [Field::Constant(1.0), Field::function(|x| 1.0 + x[2] * x[2])] {
        let mut cfg = VariantConfig::new(Variant::Lambda);
        cfg.lambda = lambda;
        for t in [5, 10, 20, 40] {
            let (row, _, _) = run_single(ManifoldCase::Hemisphere2, t, 1, Mode::Full, &cfg, &profile)?;
            println!("t={t:>2} delta={:.4} e2={:.4e} iterations={}", row.delta, row.e2, row.iters);
        }
    }
    Ok(())
}
