#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nonlocal_neumann::geometry::{Mode, PointCloud};
use nonlocal_neumann::kernels::{KernelLevel, ScaledKernel};
use nonlocal_neumann::sparse::CsrMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn zeta(cloud: &PointCloud, kernel: &ScaledKernel<'_>, r: usize, k: usize) -> f64 {
    let p = cloud.point(r);
    let q = cloud.boundary_point(k);
    let n = cloud.conormal(k);
    let proj: f64 = (0..cloud.dim).map(|a| (p[a] - q[a]) * n[a]).sum();
    -proj * kernel.eval(KernelLevel::Bar, p, q)
}

/// The model's double sums at `u` with the boundary values eliminated
/// through `v_k = Σ_i ζ_ik A_i u_i / Σ_i ζ_ik A_i`, each row times `A_i`.
pub fn oracle_apply(cloud: &PointCloud, kernel: &ScaledKernel<'_>, mode: Mode, u: &[f64]) -> Vec<f64> {
    let n0 = cloud.len();
    let m0 = cloud.boundary_len();
    let a = &cloud.volume_weights;
    let l = &cloud.boundary_weights;
    let d2 = kernel.delta().powi(2);
    let z: Vec<Vec<f64>> = (0..n0).map(|r| (0..m0).map(|k| zeta(cloud, kernel, r, k)).collect()).collect();
    let omega: Vec<f64> = (0..m0).map(|k| (0..n0).map(|r| z[r][k] * a[r]).sum()).collect();
    let v: Vec<f64> = (0..m0).map(|k| (0..n0).map(|r| z[r][k] * a[r] * u[r]).sum::<f64>() / omega[k]).collect();
    (0..n0)
        .map(|i| {
            let pi = cloud.point(i);
            let mut diffusion = 0.0;
            for j in 0..n0 {
                diffusion += kernel.eval(KernelLevel::Base, pi, cloud.point(j)) * (u[i] - u[j]) * a[j];
            }
            let mut bnd = 0.0;
            if mode == Mode::Full {
                for k in 0..m0 {
                    if z[i][k] == 0.0 {
                        continue;
                    }
                    let qk = cloud.boundary_point(k);
                    let mut lap = 0.0;
                    for ll in 0..m0 {
                        lap += (v[k] - v[ll]) * kernel.eval(KernelLevel::Bar, qk, cloud.boundary_point(ll)) * l[ll];
                    }
                    bnd += z[i][k] / omega[k] * lap * l[k];
                }
            }
            a[i] * (diffusion / d2 + 2.0 * bnd)
        })
        .collect()
}

pub fn dense(m: &CsrMatrix) -> DMatrix<f64> {
    let rows = m.to_dense();
    DMatrix::from_fn(m.n_rows, m.n_cols, |i, j| rows[i][j])
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Minimum-norm solution of a singular symmetric system, by eigenvectors.
pub fn pseudo_solve(m: &DMatrix<f64>, b: &[f64], rel_cut: f64) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let b = DVector::from_column_slice(b);
    let mut x = DVector::zeros(b.len());
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() > rel_cut * top {
            let v = eig.eigenvectors.column(k);
            x += v * (v.dot(&b) / lam);
        }
    }
    x.iter().copied().collect()
}

pub fn random_vectors(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}
