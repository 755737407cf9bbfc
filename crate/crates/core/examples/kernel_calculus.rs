//! Cosine kernel hierarchy, scaled kernels and the boundary constant.

use nonlocal_neumann::kernels::{compute_cr, KernelLevel, KernelProfile, ScaledKernel};

fn main() -> nonlocal_neumann::Result<()> {
    let k = KernelProfile::cosine();
    println!("{:>6} {:>12} {:>12} {:>12}", "r", "R", "Rbar", "Rdbar");
    for i in 0..=10 {
        let r = i as f64 / 10.0;
        println!(
            "{r:>6.2} {:>12.8} {:>12.8} {:>12.8}",
            k.value(KernelLevel::Base, r),
            k.value(KernelLevel::Bar, r),
            k.value(KernelLevel::DoubleBar, r)
        );
    }
    for m in [2, 3] {
        println!("C_R(m={m}) = {:.10}", compute_cr(&k, m)?);
    }
    let sk = ScaledKernel::new(&k, 0.1, 2)?;
    println!(
        "R_0.1 at distance 0, 0.1, 0.2: {:.4} {:.4} {:.4}",
        sk.eval(KernelLevel::Base, &[0.0, 0.0], &[0.0, 0.0]),
        sk.eval(KernelLevel::Base, &[0.0, 0.0], &[0.1, 0.0]),
        sk.eval(KernelLevel::Base, &[0.0, 0.0], &[0.2, 0.0])
    );
    Ok(())
}
