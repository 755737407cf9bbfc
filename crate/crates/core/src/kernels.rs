//! Radial kernel profiles and their integrated hierarchy.
//!
//! A profile `R` is a nonnegative function supported on `[0, 1]`. Three
//! companion levels are derived from it:
//!
//! * `underline`: `-R'`, so that `R(r) = ∫_r^∞ underline(s) ds`;
//! * `bar`: `∫_r^∞ R(s) ds`;
//! * `dbar`: `∫_r^∞ bar(s) ds`.
//!
//! On point pairs the kernels are rescaled as
//! `(4πδ²)^{-m/2} · level(|x-y|² / 4δ²)`, which vanishes for `|x-y| > 2δ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{unit_sphere_area, GaussLegendre};

/// Which member of the integrated hierarchy to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelLevel {
    Underline,
    Base,
    Bar,
    DoubleBar,
}

impl KernelLevel {
    pub const ALL: [KernelLevel; 4] = [
        KernelLevel::Underline,
        KernelLevel::Base,
        KernelLevel::Bar,
        KernelLevel::DoubleBar,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Cosine,
    Tabulated,
}

/// Immutable radial profile with support radius 1.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    repr: Repr,
    nondegeneracy_floor: f64,
}

#[derive(Debug, Clone)]
enum Repr {
    Cosine,
    Tabulated(Table),
}

/// Piecewise-cubic Hermite interpolant of tabulated `base` values with
/// node values of `bar` and `dbar` precomputed by Gauss–Legendre panels.
#[derive(Debug, Clone)]
struct Table {
    r: Vec<f64>,
    base: Vec<f64>,
    slope: Vec<f64>,
    bar: Vec<f64>,
    dbar: Vec<f64>,
}

impl KernelProfile {
    /// `R(r) = ½(1 + cos πr)` on `[0, 1]`, with closed-form antiderivatives.
    pub fn cosine() -> Self {
        Self {
            repr: Repr::Cosine,
            nondegeneracy_floor: 0.5,
        }
    }

    pub fn kind(&self) -> ProfileKind {
        match self.repr {
            Repr::Cosine => ProfileKind::Cosine,
            Repr::Tabulated(_) => ProfileKind::Tabulated,
        }
    }

    /// Lower bound of `base` on `[0, 1/2]`.
    pub fn nondegeneracy_floor(&self) -> f64 {
        self.nondegeneracy_floor
    }

    pub fn support_radius(&self) -> f64 {
        1.0
    }

    /// Checked evaluation of one level at `r`.
    pub fn eval(&self, level: KernelLevel, r: f64) -> Result<f64> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InputDomain(format!(
                "kernel argument must be finite and nonnegative, got {r}"
            )));
        }
        Ok(self.value(level, r))
    }

    /// Unchecked evaluation; `r` must be nonnegative.
    #[inline]
    pub fn value(&self, level: KernelLevel, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        if r > 1.0 {
            return 0.0;
        }
        match &self.repr {
            Repr::Cosine => cosine_value(level, r),
            Repr::Tabulated(t) => t.value(level, r),
        }
    }

    /// Reads a two-column `r base(r)` table (whitespace or comma separated,
    /// `#` comments allowed) and builds the integrated profile.
    pub fn from_table_text(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut base = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            r.push(parse(cols[0])?);
            base.push(parse(cols[1])?);
        }
        build_integrated(&r, &base)
    }
}

#[inline]
fn cosine_value(level: KernelLevel, r: f64) -> f64 {
    // e = 1 - r keeps the expressions accurate near the support edge.
    let e = 1.0 - r;
    match level {
        KernelLevel::Underline => 0.5 * PI * (PI * r).sin(),
        KernelLevel::Base => 0.5 * (1.0 + (PI * r).cos()),
        KernelLevel::Bar => 0.5 * e - (PI * e).sin() / (2.0 * PI),
        KernelLevel::DoubleBar => {
            let s = (0.5 * PI * e).sin();
            0.25 * e * e - s * s / (PI * PI)
        }
    }
}

/// Builds `bar` and `dbar` for a tabulated base profile.
///
/// `r` must be strictly increasing from 0 to 1 and `base` nonnegative.
/// Between nodes `base` is interpolated by a monotone cubic Hermite spline,
/// `underline` is its analytic negative derivative.
pub fn build_integrated(r: &[f64], base: &[f64]) -> Result<KernelProfile> {
    if r.len() != base.len() {
        return Err(Error::Validation(format!(
            "table has {} radii but {} values",
            r.len(),
            base.len()
        )));
    }
    if r.len() < 2 {
        return Err(Error::Validation("table needs at least two rows".into()));
    }
    if r.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation("radii must be strictly increasing".into()));
    }
    if r[0] != 0.0 || r[r.len() - 1] != 1.0 {
        return Err(Error::Validation(format!(
            "table must cover [0, 1] exactly, got [{}, {}]",
            r[0],
            r[r.len() - 1]
        )));
    }
    if let Some((i, v)) = base
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(Error::Validation(format!(
            "profile value {v} at r = {} is negative or not finite",
            r[i]
        )));
    }

    let slope = pchip_slopes(r, base);
    let n = r.len();
    let mut table = Table {
        r: r.to_vec(),
        base: base.to_vec(),
        slope,
        bar: vec![0.0; n],
        dbar: vec![0.0; n],
    };
    // Tail integrals from the right end, panel by panel.
    for k in (0..n - 1).rev() {
        let (a, b) = (table.r[k], table.r[k + 1]);
        let bar_b = table.bar[k + 1];
        let dbar_b = table.dbar[k + 1];
        table.bar[k] = bar_b + table.partial_bar(k, a);
        table.dbar[k] = dbar_b + (b - a) * bar_b + table.partial_dbar(k, a);
    }

    let mut floor = f64::INFINITY;
    for i in 0..=1000 {
        let x = 0.5 * i as f64 / 1000.0;
        floor = floor.min(table.value(KernelLevel::Base, x));
    }
    if !(floor > 0.0) {
        return Err(Error::Validation(format!(
            "profile is degenerate: min over [0, 1/2] is {floor}"
        )));
    }
    Ok(KernelProfile {
        repr: Repr::Tabulated(table),
        nondegeneracy_floor: floor,
    })
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = d[0];
        m[1] = d[0];
        return m;
    }
    for k in 1..n - 1 {
        if d[k - 1] * d[k] <= 0.0 {
            m[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], d[0], d[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

impl Table {
    fn panel(&self, r: f64) -> usize {
        match self.r.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.r.len() - 2),
        }
    }

    fn hermite(&self, k: usize, r: f64) -> (f64, f64) {
        let (a, b) = (self.r[k], self.r[k + 1]);
        let h = b - a;
        let t = (r - a) / h;
        let (y0, y1, m0, m1) = (self.base[k], self.base[k + 1], self.slope[k], self.slope[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * m1;
        let dv = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * h * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * h * m1)
            / h;
        (v, dv)
    }

    /// `∫_r^{b_k} base`.
    fn partial_bar(&self, k: usize, r: f64) -> f64 {
        let b = self.r[k + 1];
        GaussLegendre::gl64().integrate(r, b, |s| self.hermite(k, s).0)
    }

    /// `∫_r^{b_k} (s - r) base(s) ds`, the double tail integral inside a panel.
    fn partial_dbar(&self, k: usize, r: f64) -> f64 {
        let b = self.r[k + 1];
        GaussLegendre::gl64().integrate(r, b, |s| (s - r) * self.hermite(k, s).0)
    }

    fn value(&self, level: KernelLevel, r: f64) -> f64 {
        let k = self.panel(r);
        match level {
            KernelLevel::Base => self.hermite(k, r).0.max(0.0),
            KernelLevel::Underline => -self.hermite(k, r).1,
            KernelLevel::Bar => self.bar[k + 1] + self.partial_bar(k, r),
            KernelLevel::DoubleBar => {
                let b = self.r[k + 1];
                self.dbar[k + 1] + (b - r) * self.bar[k + 1] + self.partial_dbar(k, r)
            }
        }
    }
}

/// Checked single evaluation of `level` at `r`.
pub fn profile_eval(profile: &KernelProfile, level: KernelLevel, r: f64) -> Result<f64> {
    profile.eval(level, r)
}

/// A profile rescaled to horizon `delta` on an `m`-dimensional manifold.
#[derive(Debug, Clone, Copy)]
pub struct ScaledKernel<'a> {
    profile: &'a KernelProfile,
    delta: f64,
    m: usize,
    normal: f64,
    inv_four_delta_sq: f64,
}

impl<'a> ScaledKernel<'a> {
    pub fn new(profile: &'a KernelProfile, delta: f64, m: usize) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Parameter(format!("horizon must be positive, got {delta}")));
        }
        if m == 0 {
            return Err(Error::Parameter("intrinsic dimension must be at least 1".into()));
        }
        Ok(Self {
            profile,
            delta,
            m,
            normal: (4.0 * PI * delta * delta).powf(-(m as f64) / 2.0),
            inv_four_delta_sq: 1.0 / (4.0 * delta * delta),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.m
    }

    pub fn profile(&self) -> &'a KernelProfile {
        self.profile
    }

    /// `C_δ = (4πδ²)^{-m/2}`.
    pub fn normalisation(&self) -> f64 {
        self.normal
    }

    /// Interaction radius `2δ`.
    pub fn radius(&self) -> f64 {
        2.0 * self.delta
    }

    #[inline]
    pub fn at_dist_sq(&self, level: KernelLevel, dist_sq: f64) -> f64 {
        let r = dist_sq * self.inv_four_delta_sq;
        if r > 1.0 {
            0.0
        } else {
            self.normal * self.profile.value(level, r)
        }
    }

    #[inline]
    pub fn eval(&self, level: KernelLevel, x: &[f64], y: &[f64]) -> f64 {
        self.at_dist_sq(level, dist_sq(x, y))
    }
}

#[inline]
pub fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `(4πδ²)^{-m/2} · level(|x−y|²/(4δ²))`.
pub fn scaled_eval(
    profile: &KernelProfile,
    level: KernelLevel,
    x: &[f64],
    y: &[f64],
    delta: f64,
    m: usize,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Parameter(format!(
            "points live in different dimensions ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let k = ScaledKernel::new(profile, delta, m)?;
    Ok(k.eval(level, x, y))
}

/// Boundary constant `C_R = π^{-m/2} ∫_{R^{m-1}} dbar(|x|²) dx`, computed as a
/// radial integral `π^{-m/2} |S^{m-2}| ∫_0^1 dbar(ρ²) ρ^{m-2} dρ`.
pub fn compute_cr(profile: &KernelProfile, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Parameter(format!(
            "boundary constant needs m >= 2, got {m}"
        )));
    }
    let rule = GaussLegendre::gl64();
    let radial = rule.integrate_composite(0.0, 1.0, 16, |rho| {
        profile.value(KernelLevel::DoubleBar, rho * rho) * rho.powi(m as i32 - 2)
    });
    Ok(PI.powf(-(m as f64) / 2.0) * unit_sphere_area(m - 2) * radial)
}
