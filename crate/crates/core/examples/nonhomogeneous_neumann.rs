//! Pure Neumann problem with a nonzero boundary flux.

use nonlocal_neumann::geometry::{ManifoldCase, Mode};
use nonlocal_neumann::harness::run_single;
use nonlocal_neumann::kernels::KernelProfile;
use nonlocal_neumann::variants::{NeumannData, Variant, VariantConfig};

fn main() -> nonlocal_neumann::Result<()> {
    let profile = KernelProfile::cosine();
    let mut cfg = VariantConfig::new(Variant::Nonhomogeneous);
    cfg.g_case = NeumannData::Manufactured;
    for mode in [Mode::Full, Mode::Reduced] {
        for t in [5, 10, 20, 40] {
            let (row, _, _) = run_single(ManifoldCase::Hemisphere2, t, 1, mode, &cfg, &profile)?;
            println!("{mode:>7} t={t:>2} e2={:.4e}", row.e2);
        }
    }
    Ok(())
}
