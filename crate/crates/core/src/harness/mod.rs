//! Convergence studies, the e₂ metric, kernel-lemma diagnostics and report
//! files.

mod config;
mod lemmas;
mod report;

use std::time::Instant;

use rayon::prelude::*;

pub use config::{expand_config_args, parse_config};
pub use lemmas::{boundary_kernel_sum, lemma_diagnostics, omega_hat_continuum, LemmaReport, LemmaRow};
pub use report::{emit_lemma_report, emit_report, write_csv, write_svg, ReportPaths};

use crate::error::{Error, Result};
use crate::geometry::{sample_case, ManifoldCase, Mode, PointCloud};
use crate::kernels::{KernelProfile, ScaledKernel};
use crate::variants::{solve_variant, Variant, VariantConfig};

/// `e₂ = sqrt(Σ (u_j - u(p_j))² A_j / Σ u(p_j)² A_j)`.
pub fn e2_error<F>(u: &[f64], cloud: &PointCloud, exact: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let samples: Vec<f64> = (0..cloud.len()).map(|i| exact(cloud.point(i))).collect();
    e2_from_samples(u, &samples, &cloud.volume_weights)
}

/// [`e2_error`] with the exact values already sampled.
pub fn e2_from_samples(u: &[f64], exact: &[f64], a: &[f64]) -> Result<f64> {
    if u.len() != exact.len() || u.len() != a.len() {
        return Err(Error::Parameter(format!(
            "length mismatch: u {}, exact {}, weights {}",
            u.len(),
            exact.len(),
            a.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for ((ui, ei), wi) in u.iter().zip(exact).zip(a) {
        num += (ui - ei) * (ui - ei) * wi;
        den += ei * ei * wi;
    }
    if !(den > 0.0) {
        return Err(Error::Validation(
            "exact solution has zero weighted norm, e2 is undefined".into(),
        ));
    }
    Ok((num / den).sqrt())
}

/// Least-squares fit of `ln y = slope · ln x + intercept`.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Configuration(format!(
            "slope fit needs matching data of at least 2 points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Validation("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation("slope fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// One `(t, seed)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub t: usize,
    pub delta: f64,
    pub n0: usize,
    pub m0: usize,
    pub seed: u64,
    pub e2: f64,
    pub iters: usize,
    pub wall_ms: u64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub case: ManifoldCase,
    pub mode: Mode,
    pub variant: Variant,
    /// Sorted by descending δ, then seed.
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `ln median(e₂)` against `ln δ`.
    pub slope: f64,
    pub intercept: f64,
}

impl ConvergenceReport {
    /// `(δ, median e₂)` over converged seeds, for each `t`.
    pub fn medians(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut i = 0;
        while i < self.rows.len() {
            let t = self.rows[i].t;
            let mut vals: Vec<f64> = Vec::new();
            let delta = self.rows[i].delta;
            while i < self.rows.len() && self.rows[i].t == t {
                if self.rows[i].converged {
                    vals.push(self.rows[i].e2);
                }
                i += 1;
            }
            if !vals.is_empty() {
                out.push((delta, median(&mut vals)));
            }
        }
        out
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    /// Median e₂ at the smallest δ.
    pub fn finest_e2(&self) -> Option<f64> {
        self.medians().last().map(|m| m.1)
    }
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Parameters of a convergence sweep.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub case: ManifoldCase,
    pub ts: Vec<usize>,
    /// Seeds used are `1..=seeds`.
    pub seeds: u64,
    pub mode: Mode,
    pub variant: VariantConfig,
    pub profile: KernelProfile,
    /// Record wall-clock time per run (breaks byte-for-byte reproducibility).
    pub timing: bool,
}

impl StudyConfig {
    pub fn new(case: ManifoldCase, ts: Vec<usize>, seeds: u64, mode: Mode) -> Self {
        Self {
            case,
            ts,
            seeds,
            mode,
            variant: VariantConfig::default(),
            profile: KernelProfile::cosine(),
            timing: true,
        }
    }

    pub fn with_variant(mut self, variant: VariantConfig) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_timing(mut self, on: bool) -> Self {
        self.timing = on;
        self
    }
}

/// Runs one `(t, seed)` solve.
pub fn run_single(
    case: ManifoldCase,
    t: usize,
    seed: u64,
    mode: Mode,
    variant: &VariantConfig,
    profile: &KernelProfile,
) -> Result<(ConvergenceRow, crate::solver::SolveResult, PointCloud)> {
    let start = Instant::now();
    let cloud = sample_case(case, t, seed)?;
    let kernel = ScaledKernel::new(profile, cloud.delta, cloud.intrinsic_dim)?;
    let sol = solve_variant(&cloud, &kernel, mode, variant)?;
    let e2 = e2_from_samples(&sol.result.u, &sol.exact, &cloud.volume_weights)?;
    let row = ConvergenceRow {
        t,
        delta: cloud.delta,
        n0: cloud.len(),
        m0: cloud.boundary_len(),
        seed,
        e2,
        iters: sol.result.iterations,
        wall_ms: start.elapsed().as_millis() as u64,
        converged: sol.result.converged,
    };
    log::info!(
        "{case} {mode} t={t} seed={seed}: n0={} e2={:.4e} iters={}",
        row.n0,
        row.e2,
        row.iters
    );
    Ok((row, sol.result, cloud))
}

/// Sweeps `t` and seeds, solving each run and fitting the convergence slope.
pub fn convergence_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    if cfg.ts.len() < 4 {
        return Err(Error::Configuration(format!(
            "a convergence study needs at least 4 resolutions, got {}",
            cfg.ts.len()
        )));
    }
    if cfg.seeds == 0 {
        return Err(Error::Configuration("at least one seed is required".into()));
    }
    let mut ts = cfg.ts.clone();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() != cfg.ts.len() {
        return Err(Error::Configuration("resolutions must be distinct".into()));
    }
    cfg.variant.validate(cfg.case.intrinsic_dim())?;
    let jobs: Vec<(usize, u64)> = ts
        .iter()
        .flat_map(|&t| (1..=cfg.seeds).map(move |s| (t, s)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(t, seed)| {
            run_single(cfg.case, t, seed, cfg.mode, &cfg.variant, &cfg.profile).map(|(mut row, _, _)| {
                if !cfg.timing {
                    row.wall_ms = 0;
                }
                row
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.t.cmp(&b.t).then(a.seed.cmp(&b.seed)));
    for r in rows.iter().filter(|r| !r.converged) {
        log::warn!("t={} seed={} did not converge; excluded from the fit", r.t, r.seed);
    }
    let mut report = ConvergenceReport {
        case: cfg.case,
        mode: cfg.mode,
        variant: cfg.variant.kind,
        rows,
        slope: f64::NAN,
        intercept: f64::NAN,
    };
    let med = report.medians();
    if med.len() < 4 {
        return Err(Error::NonConvergence(format!(
            "only {} resolutions converged, the fit needs 4",
            med.len()
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = med.into_iter().unzip();
    let (slope, intercept) = fit_loglog(&x, &y)?;
    report.slope = slope;
    report.intercept = intercept;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power_law() {
        let x = [0.4, 0.2, 0.1, 0.05, 0.025];
        let y: Vec<f64> = x.iter().map(|d: &f64| 3.7 * d.powf(2.5)).collect();
        let (s, c) = fit_loglog(&x, &y).unwrap();
        assert!((s - 2.5).abs() < 1e-10);
        assert!((c - 3.7f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn e2_of_exact_is_zero() {
        let u = [1.0, -2.0, 0.5];
        let a = [0.2, 0.3, 0.5];
        assert_eq!(e2_from_samples(&u, &u, &a).unwrap(), 0.0);
        assert!(e2_from_samples(&u, &[0.0; 3], &a).is_err());
    }

    #[test]
    fn short_sweeps_are_rejected() {
        let cfg = StudyConfig::new(ManifoldCase::Hemisphere2, vec![5, 10], 1, Mode::Full);
        assert!(matches!(convergence_study(&cfg), Err(Error::Configuration(_))));
    }
}
