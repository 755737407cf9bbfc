use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const MANIFOLD_TOL: f64 = 1e-10;

/// The two parametrised test manifolds.
///
/// * `Hemisphere2`: spherical cap `x²+y²+z² = 1, z ≥ 1/2` in `R³`, boundary
///   circle of radius `√3/2` at `z = 1/2`.
/// * `Hemisphere3`: upper half `w ≥ 0` of the unit 3-sphere in `R⁴`, boundary
///   the unit 2-sphere at `w = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldCase {
    Hemisphere2,
    Hemisphere3,
}

impl ManifoldCase {
    pub fn name(self) -> &'static str {
        match self {
            ManifoldCase::Hemisphere2 => "hemisphere2",
            ManifoldCase::Hemisphere3 => "hemisphere3",
        }
    }

    /// Intrinsic dimension `m`.
    pub fn intrinsic_dim(self) -> usize {
        match self {
            ManifoldCase::Hemisphere2 => 2,
            ManifoldCase::Hemisphere3 => 3,
        }
    }

    /// Ambient dimension `d`.
    pub fn ambient_dim(self) -> usize {
        self.intrinsic_dim() + 1
    }

    /// `(n0, m0)` for resolution `t`: total sample count and boundary count.
    pub fn sample_sizes(self, t: usize) -> (usize, usize) {
        match self {
            ManifoldCase::Hemisphere2 => (t * t + 3 * t, 3 * t),
            ManifoldCase::Hemisphere3 => (3 * t * t * t + 4 * t * t, 4 * t * t),
        }
    }

    /// Neighbour count for interior volume weights.
    pub fn weight_neighbors(self) -> usize {
        match self {
            ManifoldCase::Hemisphere2 => 20,
            ManifoldCase::Hemisphere3 => 50,
        }
    }

    /// Neighbour count for the boundary triangle-area rule (3-hemisphere only).
    pub fn boundary_weight_neighbors(self) -> usize {
        20
    }

    /// Exact measure of the manifold.
    pub fn volume(self) -> f64 {
        match self {
            ManifoldCase::Hemisphere2 => PI,
            ManifoldCase::Hemisphere3 => PI * PI,
        }
    }

    /// Exact measure of the boundary.
    pub fn boundary_measure(self) -> f64 {
        match self {
            ManifoldCase::Hemisphere2 => 2.0 * PI * 3f64.sqrt() / 2.0,
            ManifoldCase::Hemisphere3 => 4.0 * PI,
        }
    }

    /// Residual of the manifold equations at `x` (sphere and half-space).
    pub fn manifold_residual(self, x: &[f64]) -> f64 {
        let sphere = (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs();
        let side = match self {
            ManifoldCase::Hemisphere2 => (0.5 - x[2]).max(0.0),
            ManifoldCase::Hemisphere3 => (-x[3]).max(0.0),
        };
        sphere + side
    }

    /// Residual of the boundary equations at `q`.
    pub fn boundary_residual(self, q: &[f64]) -> f64 {
        match self {
            ManifoldCase::Hemisphere2 => {
                (q[0] * q[0] + q[1] * q[1] - 0.75).abs() + (q[2] - 0.5).abs()
            }
            ManifoldCase::Hemisphere3 => {
                (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] - 1.0).abs() + q[3].abs()
            }
        }
    }

    fn check_dim(self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::Validation(format!(
                "{} expects points in R^{}, got length {}",
                self.name(),
                self.ambient_dim(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Exact solution and forcing `(u, -Δu)` at a point of the manifold.
    pub fn exact_fields(self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        let res = self.manifold_residual(x);
        if res > MANIFOLD_TOL {
            return Err(Error::Validation(format!(
                "point {x:?} is off {} (residual {res:e})",
                self.name()
            )));
        }
        Ok((self.exact_u(x), self.forcing(x)))
    }

    /// `u = (z-½)² - 1/12` on the cap, `u = xyz` on the 3-hemisphere.
    #[inline]
    pub fn exact_u(self, x: &[f64]) -> f64 {
        match self {
            ManifoldCase::Hemisphere2 => {
                let s = x[2] - 0.5;
                s * s - 1.0 / 12.0
            }
            ManifoldCase::Hemisphere3 => x[0] * x[1] * x[2],
        }
    }

    /// `-Δ_M u`: `6z² - 2z - 2` on the cap, `15xyz` on the 3-hemisphere.
    #[inline]
    pub fn forcing(self, x: &[f64]) -> f64 {
        match self {
            ManifoldCase::Hemisphere2 => 6.0 * x[2] * x[2] - 2.0 * x[2] - 2.0,
            ManifoldCase::Hemisphere3 => 15.0 * x[0] * x[1] * x[2],
        }
    }

    /// Outward unit normal of the embedding sphere (the point itself).
    pub fn surface_normal(self, x: &[f64]) -> Vec<f64> {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter().map(|v| v / n).collect()
    }

    /// Outward unit co-normal at a boundary point.
    pub fn conormal(self, q: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(q)?;
        let res = self.boundary_residual(q);
        if res > MANIFOLD_TOL {
            return Err(Error::Validation(format!(
                "point {q:?} is off the boundary of {} (residual {res:e})",
                self.name()
            )));
        }
        Ok(self.conormal_unchecked(q))
    }

    pub(crate) fn conormal_unchecked(self, q: &[f64]) -> Vec<f64> {
        match self {
            ManifoldCase::Hemisphere2 => {
                // radial direction in the boundary plane tilted down the sphere
                let rho = (q[0] * q[0] + q[1] * q[1]).sqrt();
                let (c, s) = (q[0] / rho, q[1] / rho);
                let z = q[2];
                vec![z * c, z * s, -rho]
            }
            ManifoldCase::Hemisphere3 => vec![0.0, 0.0, 0.0, -1.0],
        }
    }
}

impl fmt::Display for ManifoldCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ManifoldCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hemisphere2" => Ok(ManifoldCase::Hemisphere2),
            "hemisphere3" => Ok(ManifoldCase::Hemisphere3),
            other => Err(Error::Configuration(format!("unknown case '{other}'"))),
        }
    }
}
