//! Seeded sweep over resolutions with CSV and SVG output.

use nonlocal_neumann::geometry::{ManifoldCase, Mode};
use nonlocal_neumann::harness::{convergence_study, emit_report, StudyConfig};

fn main() -> nonlocal_neumann::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cfg = StudyConfig::new(ManifoldCase::Hemisphere2, vec![5, 10, 15, 20, 30], 2, Mode::Full);
    let report = convergence_study(&cfg)?;
    for (delta, e2) in report.medians() {
        println!("delta={delta:.4} median e2={e2:.4e}");
    }
    println!("slope {:.3}", report.slope);
    let dir = std::env::temp_dir().join("nonlocal_study");
    let paths = emit_report(&report, &dir, "hemisphere2_full")?;
    println!("wrote {} and {}", paths.csv.display(), paths.svg.display());
    Ok(())
}
