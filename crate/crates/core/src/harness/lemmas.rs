//! Consistency of the boundary kernel sum and of `ω̂` on the 2-hemisphere,
//! evaluated on deterministic high-resolution fixtures.

use std::f64::consts::PI;

use super::fit_loglog;
use crate::error::{Error, Result};
use crate::geometry::ManifoldCase;
use crate::kernels::{compute_cr, KernelLevel, KernelProfile, ScaledKernel};
use crate::quadrature::GaussLegendre;

/// Boundary samples per unit `δ_min` in the circle fixture.
const POINTS_PER_DELTA: f64 = 200.0;
/// Minimum accepted fixture resolution.
const MIN_POINTS_PER_DELTA: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub delta: f64,
    /// Number of equispaced boundary points in the fixture.
    pub boundary_points: usize,
    /// `B(δ) = 2δ Σ_l R̿_δ(q, q_l) L_l`.
    pub boundary_sum: f64,
    pub boundary_deviation: f64,
    pub omega_hat: f64,
    /// `|ω̂_δ(q) - δ C_R|`.
    pub omega_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub case: ManifoldCase,
    pub cr: f64,
    /// Sorted by descending δ.
    pub rows: Vec<LemmaRow>,
    pub boundary_order: f64,
    pub omega_order: f64,
}

/// `2δ Σ_l R̿_δ(q_0, q_l) L_l` on `n` equispaced points of the circle of
/// radius `radius`, with `L_l = 2π radius / n`.
pub fn boundary_kernel_sum(kernel: &ScaledKernel<'_>, radius: f64, n: usize) -> f64 {
    let h = 2.0 * PI * radius / n as f64;
    let q0 = [radius, 0.0];
    let sum: f64 = (0..n)
        .map(|l| {
            let a = 2.0 * PI * l as f64 / n as f64;
            kernel.eval(KernelLevel::DoubleBar, &q0, &[radius * a.cos(), radius * a.sin()])
        })
        .sum();
    2.0 * kernel.delta() * sum * h
}

/// `ω̂_δ(q) = ∫ -(x - q)·n R̄_δ(x, q) dμ_x` over the cap `z ≥ 1/2` at
/// `q = (√3/2, 0, 1/2)`, by Gauss–Legendre panels in `z` and in the
/// azimuth window where the kernel is supported (area element `dz dφ`).
pub fn omega_hat_continuum(kernel: &ScaledKernel<'_>, panels: usize) -> f64 {
    let r = 3f64.sqrt() / 2.0;
    let q = [r, 0.0, 0.5];
    let n = [0.5, 0.0, -r];
    let delta = kernel.delta();
    let reach = (1.0 - 2.0 * delta * delta).clamp(-1.0, 1.0).acos();
    let z_top = (PI / 3.0 - reach).max(0.0).cos();
    let rule = GaussLegendre::gl64();
    rule.integrate_composite(0.5, z_top, panels, |z| {
        let rho = (1.0 - z * z).max(0.0).sqrt();
        if rho == 0.0 {
            return 0.0;
        }
        let c = (rho * rho + r * r + (z - 0.5) * (z - 0.5) - 4.0 * delta * delta) / (2.0 * rho * r);
        if c >= 1.0 {
            return 0.0;
        }
        let phi_max = if c <= -1.0 { PI } else { c.acos() };
        2.0 * rule.integrate_composite(0.0, phi_max, panels, |phi| {
            let x = [rho * phi.cos(), rho * phi.sin(), z];
            let proj: f64 = x.iter().zip(&q).zip(&n).map(|((a, b), m)| (a - b) * m).sum();
            -proj * kernel.eval(KernelLevel::Bar, &x, &q)
        })
    })
}

/// Deviations of `B(δ)` from `C_R` and of `ω̂_δ` from `δ C_R` over a δ sweep,
/// with fitted orders.
pub fn lemma_diagnostics(
    case: ManifoldCase,
    deltas: &[f64],
    profile: &KernelProfile,
    points_per_delta: Option<f64>,
) -> Result<LemmaReport> {
    if case != ManifoldCase::Hemisphere2 {
        return Err(Error::Configuration(format!(
            "lemma diagnostics are implemented for hemisphere2, got {case}"
        )));
    }
    if deltas.len() < 4 {
        return Err(Error::Configuration(format!(
            "lemma diagnostics need at least 4 horizons, got {}",
            deltas.len()
        )));
    }
    if deltas.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::Configuration("horizons must be positive".into()));
    }
    let mut ds = deltas.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    let (dmax, dmin) = (ds[0], ds[ds.len() - 1]);
    if dmax < 4.0 * dmin {
        return Err(Error::Configuration(format!(
            "horizons must span a factor of at least 4, got {dmax}/{dmin}"
        )));
    }
    let radius = 3f64.sqrt() / 2.0;
    let density = points_per_delta.unwrap_or(POINTS_PER_DELTA);
    let n = (density * 2.0 * PI * radius / dmin).ceil() as usize;
    let spacing = 2.0 * PI * radius / n as f64;
    if dmin / spacing < MIN_POINTS_PER_DELTA {
        return Err(Error::Precondition(format!(
            "boundary fixture has {:.1} points per δ, at least {MIN_POINTS_PER_DELTA} needed",
            dmin / spacing
        )));
    }
    let cr = compute_cr(profile, 2)?;
    let rows = ds
        .iter()
        .map(|&delta| {
            let kernel = ScaledKernel::new(profile, delta, 2)?;
            let b = boundary_kernel_sum(&kernel, radius, n);
            let w = omega_hat_continuum(&kernel, 32);
            Ok(LemmaRow {
                delta,
                boundary_points: n,
                boundary_sum: b,
                boundary_deviation: (b - cr).abs(),
                omega_hat: w,
                omega_deviation: (w - delta * cr).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let yb: Vec<f64> = rows.iter().map(|r| r.boundary_deviation).collect();
    let yw: Vec<f64> = rows.iter().map(|r| r.omega_deviation).collect();
    let (boundary_order, _) = fit_loglog(&x, &yb)?;
    let (omega_order, _) = fit_loglog(&x, &yw)?;
    Ok(LemmaReport {
        case,
        cr,
        rows,
        boundary_order,
        omega_order,
    })
}
