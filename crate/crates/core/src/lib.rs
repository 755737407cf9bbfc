//! Second-order nonlocal point-cloud solver for the Poisson equation on a
//! manifold with Neumann boundary.
//!
//! The pipeline is: [`kernels`] (radial profile and its integrated levels),
//! [`geometry`] (sampled test manifolds with quadrature weights),
//! [`assembly`] (the symmetric positive semi-definite system),
//! [`solver`] (projected conjugate gradients), [`variants`]
//! (λ-Poisson, nonhomogeneous Neumann and nonlinear models) and
//! [`harness`] (convergence studies, lemma diagnostics and reports).
//!
//! ```no_run
//! use nonlocal_neumann::prelude::*;
//!
//! let cloud = sample_case(ManifoldCase::Hemisphere2, 10, 1)?;
//! let profile = KernelProfile::cosine();
//! let kernel = ScaledKernel::new(&profile, cloud.delta, 2)?;
//! let system = assemble(&cloud, &kernel, Mode::Full)?;
//! let sol = solve_mean_zero(&system, &SolveOptions::default())?;
//! let e2 = e2_error(&sol.u, &cloud, |x| cloud.case.exact_u(x))?;
//! println!("e2 = {e2:.3e}");
//! # Ok::<(), nonlocal_neumann::Error>(())
//! ```

mod error;

pub mod assembly;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod variants;

pub use error::{Error, Result};

/// The names most programs need.
pub mod prelude {
    pub use crate::assembly::{assemble, boundary_trace, NonlocalSystem};
    pub use crate::geometry::{sample_case, ManifoldCase, Mode, PointCloud};
    pub use crate::harness::e2_error;
    pub use crate::kernels::{KernelLevel, KernelProfile, ScaledKernel};
    pub use crate::solver::{solve_mean_zero, solve_spd, SolveOptions, SolveResult};
    pub use crate::variants::{Variant, VariantConfig};
    pub use crate::{Error, Result};
}
