//! Point clouds on the two test manifolds: sampling, co-normals, and
//! quadrature weights from tangent-plane Delaunay stars.

mod cases;
pub mod delaunay;
pub mod grid;
mod io;
mod sampling;
mod weights;

pub use cases::ManifoldCase;
pub use io::{read_cloud_csv, write_cloud_csv};
pub use sampling::{sample_case, sample_points};
pub use weights::{
    boundary_adjacency, boundary_weights, circle_arc_weights, star_weights, tangent_basis,
    volume_weights,
};

pub use crate::geometry::grid::SpatialGrid;

/// Whether the boundary terms of the model are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Full second-order model with boundary coupling.
    Full,
    /// Earlier model without boundary terms (all `L_k = 0`).
    Reduced,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Reduced => "reduced",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "reduced" => Ok(Mode::Reduced),
            other => Err(crate::Error::Configuration(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Samples of a manifold and its boundary together with quadrature weights.
///
/// The boundary samples are the last `n_boundary` entries of `points`
/// (`q_k = p_{k + n0 - m0}`).
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub case: ManifoldCase,
    /// Ambient dimension `d`.
    pub dim: usize,
    /// Intrinsic dimension `m`.
    pub intrinsic_dim: usize,
    /// `n0 * d` coordinates, point-major.
    pub points: Vec<f64>,
    pub n_boundary: usize,
    /// Volume weights `A_i`.
    pub volume_weights: Vec<f64>,
    /// Boundary weights `L_k`.
    pub boundary_weights: Vec<f64>,
    /// `m0 * d` co-normal components.
    pub conormals: Vec<f64>,
    pub delta: f64,
    pub t: usize,
    pub seed: u64,
}

impl PointCloud {
    /// Number of samples `n0` (boundary samples included).
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of boundary samples `m0`.
    pub fn boundary_len(&self) -> usize {
        self.n_boundary
    }

    /// Index in `points` of the first boundary sample.
    pub fn boundary_offset(&self) -> usize {
        self.len() - self.n_boundary
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn boundary_point(&self, k: usize) -> &[f64] {
        self.point(self.boundary_offset() + k)
    }

    #[inline]
    pub fn conormal(&self, k: usize) -> &[f64] {
        &self.conormals[k * self.dim..(k + 1) * self.dim]
    }

    /// Flat coordinates of the boundary samples.
    pub fn boundary_coords(&self) -> &[f64] {
        &self.points[self.boundary_offset() * self.dim..]
    }

    /// Zeroes the boundary weights, giving the reduced model's input.
    pub fn reduce(&mut self) {
        self.boundary_weights.iter_mut().for_each(|l| *l = 0.0);
    }

    /// Copy with boundary weights set according to `mode`.
    pub fn with_mode(&self, mode: Mode) -> PointCloud {
        let mut c = self.clone();
        if mode == Mode::Reduced {
            c.reduce();
        }
        c
    }

    pub fn total_volume(&self) -> f64 {
        self.volume_weights.iter().sum()
    }

    pub fn total_boundary(&self) -> f64 {
        self.boundary_weights.iter().sum()
    }
}
