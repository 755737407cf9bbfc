//! Discrete nonlocal operator on a point cloud.
//!
//! With `ζ_rk = -(p_r - q_k)·n_k R̄_δ(p_r, q_k)`, `ω̂_k = Σ_r ζ_rk A_r` and the
//! normalised trace `B = diag(1/ω̂) ζᵀ A` (so that `V = B U`), the system is
//!
//! ```text
//! S = R_A / δ² + 2 Bᵀ R̄_L B,        rhs = A F,
//! ```
//!
//! where `R_A` and `R̄_L` are graph Laplacians with pair weights
//! `R_δ(p_i, p_j) A_i A_j` and `R̄_δ(q_k, q_l) L_k L_l`.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ManifoldCase, Mode, PointCloud, SpatialGrid};
use crate::kernels::{dist_sq, KernelLevel, ScaledKernel};
use crate::sparse::{CsrMatrix, LinearOperator};

/// `ζ_δ(p, q) = -(p - q)·n_q R̄_δ(p, q)`.
pub fn zeta_entry(p: &[f64], q: &[f64], n_q: &[f64], kernel: &ScaledKernel<'_>) -> f64 {
    let bar = kernel.eval(KernelLevel::Bar, p, q);
    if bar == 0.0 {
        return 0.0;
    }
    let proj: f64 = p.iter().zip(q).zip(n_q).map(|((a, b), n)| (a - b) * n).sum();
    -proj * bar
}

/// For every point, its neighbours within `2δ` (itself included) with
/// squared distances, in ascending index order.
#[derive(Debug, Clone)]
pub struct Neighbourhoods {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Neighbourhoods {
    pub fn interior(cloud: &PointCloud, radius: f64) -> Self {
        let grid = SpatialGrid::new(&cloud.points, cloud.dim, radius);
        let rows = (0..cloud.len())
            .into_par_iter()
            .map(|i| {
                let x = cloud.point(i);
                grid.within(x, radius)
                    .into_iter()
                    .map(|j| (j, dist_sq(x, cloud.point(j))))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Total number of stored pairs.
    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Kernel matrix `K_ij = level_δ(p_i, p_j)` on the neighbourhood pattern.
pub fn kernel_matrix(nb: &Neighbourhoods, kernel: &ScaledKernel<'_>, level: KernelLevel) -> CsrMatrix {
    let rows = (0..nb.len())
        .into_par_iter()
        .map(|i| {
            nb.row(i)
                .iter()
                .map(|&(j, d2)| (j, kernel.at_dist_sq(level, d2)))
                .filter(|&(_, v)| v != 0.0)
                .collect()
        })
        .collect();
    CsrMatrix::from_rows(nb.len(), rows)
}

/// Graph Laplacian with pair weights `w(i, j) · a_i a_j`.
fn graph_laplacian<W>(nb: &Neighbourhoods, a: &[f64], weight: W) -> CsrMatrix
where
    W: Fn(f64) -> f64 + Sync,
{
    let rows = (0..nb.len())
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(nb.row(i).len());
            let mut diag = 0.0;
            let mut diag_slot = None;
            for &(j, d2) in nb.row(i) {
                if j == i {
                    diag_slot = Some(row.len());
                    row.push((i, 0.0));
                    continue;
                }
                let w = weight(d2);
                if w == 0.0 {
                    continue;
                }
                let v = w * (a[i] * a[j]);
                diag += v;
                row.push((j, -v));
            }
            match diag_slot {
                Some(s) => row[s].1 = diag,
                None => {
                    let pos = row.partition_point(|&(j, _)| j < i);
                    row.insert(pos, (i, diag));
                }
            }
            row
        })
        .collect();
    CsrMatrix::from_rows(nb.len(), rows)
}

/// `R_A`: off-diagonals `-R_δ(p_i,p_j)A_iA_j`, diagonal the negated row sum.
pub fn interior_laplacian(cloud: &PointCloud, kernel: &ScaledKernel<'_>) -> CsrMatrix {
    let nb = Neighbourhoods::interior(cloud, kernel.radius());
    interior_laplacian_on(&nb, &cloud.volume_weights, kernel)
}

/// [`interior_laplacian`] on precomputed neighbourhoods.
pub fn interior_laplacian_on(nb: &Neighbourhoods, a: &[f64], kernel: &ScaledKernel<'_>) -> CsrMatrix {
    graph_laplacian(nb, a, |d2| kernel.at_dist_sq(KernelLevel::Base, d2))
}

/// `R̄_L`: graph Laplacian on the boundary samples with pair weights
/// `R̄_δ(q_k,q_l)L_kL_l`.
pub fn boundary_laplacian(cloud: &PointCloud, kernel: &ScaledKernel<'_>) -> CsrMatrix {
    let coords = cloud.boundary_coords();
    let d = cloud.dim;
    let m0 = cloud.boundary_len();
    let radius = kernel.radius();
    let grid = SpatialGrid::new(coords, d, radius);
    let rows = (0..m0)
        .into_par_iter()
        .map(|k| {
            let q = &coords[k * d..(k + 1) * d];
            grid.within(q, radius)
                .into_iter()
                .map(|l| (l, dist_sq(q, &coords[l * d..(l + 1) * d])))
                .collect()
        })
        .collect();
    let nb = Neighbourhoods { rows };
    graph_laplacian(&nb, &cloud.boundary_weights, |d2| kernel.at_dist_sq(KernelLevel::Bar, d2))
}

/// Raw `ζ` stored boundary-major: row `k` holds `ζ(p_r, q_k)` over `r`.
pub fn zeta_rows(cloud: &PointCloud, kernel: &ScaledKernel<'_>) -> CsrMatrix {
    let radius = kernel.radius();
    let grid = SpatialGrid::new(&cloud.points, cloud.dim, radius);
    let rows = (0..cloud.boundary_len())
        .into_par_iter()
        .map(|k| {
            let q = cloud.boundary_point(k);
            let n = cloud.conormal(k);
            grid.within(q, radius)
                .into_iter()
                .map(|r| (r, zeta_entry(cloud.point(r), q, n, kernel)))
                .filter(|&(_, v)| v != 0.0)
                .collect()
        })
        .collect();
    CsrMatrix::from_rows(cloud.len(), rows)
}

/// `ω̂_k = Σ_r ζ(p_r, q_k) A_r`.
pub fn omega_hat(zeta: &CsrMatrix, a: &[f64]) -> Vec<f64> {
    zeta.mul_vec(a)
}

/// Boundary part of the model.
#[derive(Debug, Clone)]
pub struct BoundaryCoupling {
    /// `ζ(p_r, q_k) / ω̂_k`, `n0 × m0`.
    pub zeta: CsrMatrix,
    pub omega_hat: Vec<f64>,
    /// Boundary graph Laplacian, `m0 × m0`.
    pub rbar_l: CsrMatrix,
    pub boundary_weights: Vec<f64>,
    /// `B = ζᵀ A`, `m0 × n0`; `V = B U`.
    pub trace: CsrMatrix,
}

impl BoundaryCoupling {
    /// Builds the coupling; in reduced mode every matrix is empty.
    pub fn new(cloud: &PointCloud, kernel: &ScaledKernel<'_>, mode: Mode) -> Result<Self> {
        let n0 = cloud.len();
        let m0 = cloud.boundary_len();
        let raw = zeta_rows(cloud, kernel);
        let omega = omega_hat(&raw, &cloud.volume_weights);
        if mode == Mode::Reduced {
            return Ok(Self {
                zeta: CsrMatrix::zeros(n0, m0),
                omega_hat: omega,
                rbar_l: CsrMatrix::zeros(m0, m0),
                boundary_weights: vec![0.0; m0],
                trace: CsrMatrix::zeros(m0, n0),
            });
        }
        if let Some((k, &w)) = omega.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
            return Err(Error::NonPositiveOmega { index: k, value: w });
        }
        let a = &cloud.volume_weights;
        let trace_rows = (0..m0)
            .map(|k| {
                let (c, v) = raw.row(k);
                c.iter().zip(v).map(|(&r, &z)| (r, z * a[r] / omega[k])).collect()
            })
            .collect();
        let trace = CsrMatrix::from_rows(n0, trace_rows);
        let zeta_rows = (0..m0)
            .map(|k| {
                let (c, v) = raw.row(k);
                c.iter().zip(v).map(|(&r, &z)| (r, z / omega[k])).collect()
            })
            .collect();
        let zeta = CsrMatrix::from_rows(n0, zeta_rows).transpose();
        Ok(Self {
            zeta,
            omega_hat: omega,
            rbar_l: boundary_laplacian(cloud, kernel),
            boundary_weights: cloud.boundary_weights.clone(),
            trace,
        })
    }

    pub fn is_reduced(&self) -> bool {
        self.trace.nnz() == 0
    }
}

/// `V_k = (1/ω̂_k) Σ_i u_i ζ(p_i, q_k) A_i`; zero in reduced mode.
pub fn boundary_trace(coupling: &BoundaryCoupling, u: &[f64]) -> Vec<f64> {
    coupling.trace.mul_vec(u)
}

/// `f_δ^i = Σ_j f(p_j) R̄_δ(p_i,p_j) A_j + Σ_k f(q_k) ζ(p_i,q_k) L_k`.
pub fn source_raw<F>(cloud: &PointCloud, rbar: &CsrMatrix, zeta: &CsrMatrix, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let fa: Vec<f64> = (0..cloud.len())
        .map(|j| f(cloud.point(j)) * cloud.volume_weights[j])
        .collect();
    let mut out = rbar.mul_vec(&fa);
    let fl: Vec<f64> = (0..cloud.boundary_len())
        .map(|k| f(cloud.boundary_point(k)) * cloud.boundary_weights[k])
        .collect();
    if fl.iter().any(|v| *v != 0.0) {
        let b = zeta.tr_mul_vec(&fl);
        out.iter_mut().zip(b).for_each(|(o, v)| *o += v);
    }
    out
}

/// Removes the `A`-weighted mean.
pub fn subtract_weighted_mean(v: &mut [f64], a: &[f64]) -> f64 {
    let mean = weighted_mean(v, a);
    v.iter_mut().for_each(|x| *x -= mean);
    mean
}

pub fn weighted_mean(v: &[f64], a: &[f64]) -> f64 {
    let num: f64 = v.iter().zip(a).map(|(x, w)| x * w).sum();
    let den: f64 = a.iter().sum();
    num / den
}

/// `F = f_δ - f̃⁰_δ`, with `A`-weighted mean zero.
///
/// The boundary term vanishes when the boundary weights are zero, which is how
/// the reduced model is obtained.
pub fn source_vector<F>(cloud: &PointCloud, kernel: &ScaledKernel<'_>, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let nb = Neighbourhoods::interior(cloud, kernel.radius());
    let rbar = kernel_matrix(&nb, kernel, KernelLevel::Bar);
    let zeta = zeta_rows(cloud, kernel);
    let mut out = source_raw(cloud, &rbar, &zeta, f);
    subtract_weighted_mean(&mut out, &cloud.volume_weights);
    out
}

/// The assembled linear system and what is needed to post-process it.
#[derive(Debug, Clone)]
pub struct NonlocalSystem {
    pub s: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Source vector before multiplication by `A`.
    pub source: Vec<f64>,
    pub coupling: BoundaryCoupling,
    pub volume_weights: Vec<f64>,
    pub delta: f64,
    pub mode: Mode,
    pub case: ManifoldCase,
    pub seed: u64,
    pub t: usize,
}

impl NonlocalSystem {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn boundary_len(&self) -> usize {
        self.coupling.omega_hat.len()
    }

    /// Writes `S` as `row col value` lines to `path` and a `key = value`
    /// header to `path.header`.
    pub fn export_matrix(&self, path: &Path) -> Result<()> {
        let mut body = String::with_capacity(self.s.nnz() * 32);
        for i in 0..self.s.n_rows {
            let (c, v) = self.s.row(i);
            for (&j, &x) in c.iter().zip(v) {
                let _ = writeln!(body, "{i} {j} {x:e}");
            }
        }
        std::fs::write(path, body).map_err(|e| Error::io(path, e))?;
        let header = format!(
            "n0 = {}\nm0 = {}\ndelta = {:?}\nmode = {}\nseed = {}\ncase = {}\nt = {}\nnnz = {}\n",
            self.len(),
            self.boundary_len(),
            self.delta,
            self.mode,
            self.seed,
            self.case,
            self.t,
            self.s.nnz()
        );
        let mut hp = path.as_os_str().to_owned();
        hp.push(".header");
        std::fs::write(&hp, header).map_err(|e| Error::io(hp.clone(), e))
    }
}

impl LinearOperator for NonlocalSystem {
    fn dim(&self) -> usize {
        self.s.n_rows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.s.mul_vec_into(x, y);
    }

    fn diagonal(&self) -> Vec<f64> {
        self.s.diagonal()
    }
}

/// Reusable pieces of an assembly: neighbourhoods, `R̄` on the cloud, raw `ζ`.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub neighbours: Neighbourhoods,
    pub rbar: CsrMatrix,
    pub zeta_rows: CsrMatrix,
}

impl Stencil {
    pub fn new(cloud: &PointCloud, kernel: &ScaledKernel<'_>) -> Self {
        let neighbours = Neighbourhoods::interior(cloud, kernel.radius());
        let rbar = kernel_matrix(&neighbours, kernel, KernelLevel::Bar);
        Self {
            neighbours,
            rbar,
            zeta_rows: zeta_rows(cloud, kernel),
        }
    }
}

/// Assembles `S` and `rhs = A F` for the field `f` of the case.
pub fn assemble(cloud: &PointCloud, kernel: &ScaledKernel<'_>, mode: Mode) -> Result<NonlocalSystem> {
    let case = cloud.case;
    assemble_with(cloud, kernel, mode, |x| case.forcing(x))
}

/// [`assemble`] with an explicit source field.
pub fn assemble_with<F>(
    cloud: &PointCloud,
    kernel: &ScaledKernel<'_>,
    mode: Mode,
    f: F,
) -> Result<NonlocalSystem>
where
    F: Fn(&[f64]) -> f64,
{
    let cloud = cloud.with_mode(mode);
    let stencil = Stencil::new(&cloud, kernel);
    let mut source = source_raw(&cloud, &stencil.rbar, &stencil.zeta_rows, f);
    subtract_weighted_mean(&mut source, &cloud.volume_weights);
    assemble_from_source(&cloud, kernel, mode, &stencil, source)
}

/// Builds the system for a given mean-free source vector `F`.
pub fn assemble_from_source(
    cloud: &PointCloud,
    kernel: &ScaledKernel<'_>,
    mode: Mode,
    stencil: &Stencil,
    source: Vec<f64>,
) -> Result<NonlocalSystem> {
    let a = &cloud.volume_weights;
    let coupling = BoundaryCoupling::new(cloud, kernel, mode)?;
    let mut s = interior_laplacian_on(&stencil.neighbours, a, kernel);
    let inv = 1.0 / (kernel.delta() * kernel.delta());
    s.scale(inv);
    if mode == Mode::Full {
        let bnd = coupling.trace.congruence(&coupling.rbar_l);
        s = s.add_scaled(2.0, &bnd);
    }
    let rhs = source.iter().zip(a).map(|(f, w)| f * w).collect();
    Ok(NonlocalSystem {
        s,
        rhs,
        source,
        coupling,
        volume_weights: a.clone(),
        delta: kernel.delta(),
        mode,
        case: cloud.case,
        seed: cloud.seed,
        t: cloud.t,
    })
}

/// Direct evaluation of `A_i · [Σ_j R_δ(u_i-u_j)A_j/δ² + 2 Σ_k ζ̃_ik Σ_l (v_k-v_l) R̄_δ(q_k,q_l) L_l L_k]`
/// with `V = B U`, by explicit double sums over all pairs.
pub fn direct_operator(cloud: &PointCloud, kernel: &ScaledKernel<'_>, mode: Mode, u: &[f64]) -> Result<Vec<f64>> {
    let cloud = cloud.with_mode(mode);
    let n0 = cloud.len();
    let m0 = cloud.boundary_len();
    let a = &cloud.volume_weights;
    let l = &cloud.boundary_weights;
    let d2 = kernel.delta() * kernel.delta();
    let mut zeta = vec![vec![0.0; m0]; n0];
    let mut omega = vec![0.0; m0];
    for k in 0..m0 {
        for r in 0..n0 {
            zeta[r][k] = zeta_entry(cloud.point(r), cloud.boundary_point(k), cloud.conormal(k), kernel);
            omega[k] += zeta[r][k] * a[r];
        }
    }
    let v: Vec<f64> = (0..m0)
        .map(|k| {
            if mode == Mode::Reduced {
                return 0.0;
            }
            (0..n0).map(|i| u[i] * zeta[i][k] * a[i]).sum::<f64>() / omega[k]
        })
        .collect();
    let lap_v: Vec<f64> = (0..m0)
        .map(|k| {
            (0..m0)
                .map(|j| {
                    (v[k] - v[j])
                        * kernel.eval(KernelLevel::Bar, cloud.boundary_point(k), cloud.boundary_point(j))
                        * l[j]
                })
                .sum()
        })
        .collect();
    Ok((0..n0)
        .map(|i| {
            let p = cloud.point(i);
            let diffusion: f64 = (0..n0)
                .map(|j| kernel.eval(KernelLevel::Base, p, cloud.point(j)) * (u[i] - u[j]) * a[j])
                .sum::<f64>()
                / d2;
            let boundary: f64 = if mode == Mode::Reduced {
                0.0
            } else {
                2.0 * (0..m0).map(|k| lap_v[k] * zeta[i][k] / omega[k] * l[k]).sum::<f64>()
            };
            a[i] * (diffusion + boundary)
        })
        .collect())
}
