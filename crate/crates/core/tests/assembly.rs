mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use common::{dense, eigenvalues, oracle_apply, random_vectors, rel_diff};
use nonlocal_neumann::assembly::{
    assemble, assemble_with, boundary_laplacian, boundary_trace, interior_laplacian, source_vector, weighted_mean,
    zeta_entry, BoundaryCoupling,
};
use nonlocal_neumann::geometry::{sample_case, ManifoldCase, Mode, PointCloud};
use nonlocal_neumann::kernels::{KernelLevel, KernelProfile, ScaledKernel};
use nonlocal_neumann::sparse::dot;
use proptest::prelude::*;

fn hemi(t: usize, seed: u64) -> PointCloud {
    sample_case(ManifoldCase::Hemisphere2, t, seed).unwrap()
}

fn circle_cloud(m0: usize, delta: f64) -> PointCloud {
    let r = 3f64.sqrt() / 2.0;
    let mut points = Vec::new();
    let mut conormals = Vec::new();
    for k in 0..m0 {
        let a = 2.0 * PI * k as f64 / m0 as f64;
        points.extend([r * a.cos(), r * a.sin(), 0.5]);
        conormals.extend([0.5 * a.cos(), 0.5 * a.sin(), -r]);
    }
    PointCloud {
        case: ManifoldCase::Hemisphere2,
        dim: 3,
        intrinsic_dim: 2,
        points,
        n_boundary: m0,
        volume_weights: vec![0.3; m0],
        boundary_weights: (0..m0).map(|k| 0.5 + 0.1 * k as f64).collect(),
        conormals,
        delta,
        t: 0,
        seed: 0,
    }
}

#[test]
fn zeta_vanishes_at_coincidence_and_beyond_support() {
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, 0.2, 2).unwrap();
    let q = [3f64.sqrt() / 2.0, 0.0, 0.5];
    let n = [0.5, 0.0, -(3f64.sqrt()) / 2.0];
    assert_eq!(zeta_entry(&q, &q, &n, &k), 0.0);
    let far = [0.0, 0.0, 1.0];
    assert_eq!(zeta_entry(&far, &q, &n, &k), 0.0);
}

#[test]
fn zeta_half_horizon_inward() {
    let prof = KernelProfile::cosine();
    let delta = 0.2;
    let k = ScaledKernel::new(&prof, delta, 2).unwrap();
    let q = [3f64.sqrt() / 2.0, 0.0, 0.5];
    let n = [0.5, 0.0, -(3f64.sqrt()) / 2.0];
    let p: Vec<f64> = q.iter().zip(&n).map(|(a, b)| a - 0.5 * delta * b).collect();
    let z = zeta_entry(&p, &q, &n, &k);
    let expect = 0.5 * delta * k.normalisation() * prof.value(KernelLevel::Bar, 0.0625);
    assert!(z > 0.0);
    assert_relative_eq!(z, expect, max_relative = 1e-14);
}

#[test]
fn interior_laplacian_structure() {
    let c = hemi(10, 1);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let ra = interior_laplacian(&c, &k);
    let ones = vec![1.0; c.len()];
    assert!(ra.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12 * ra.norm_inf()));
    assert_eq!(ra.asymmetry(), 0.0);
    for i in 0..c.len() {
        let (cols, vals) = ra.row(i);
        let off: f64 = cols.iter().zip(vals).filter(|(j, _)| **j != i).map(|(_, v)| v.abs()).sum();
        assert_relative_eq!(ra.get(i, i), off, max_relative = 1e-12);
        assert!(cols.iter().zip(vals).all(|(j, v)| *j == i || *v <= 0.0));
    }
}

#[test]
fn two_point_interior_laplacian() {
    let mut c = circle_cloud(2, 0.5);
    c.points = vec![0.0, 0.0, 1.0, 0.3, 0.0, 0.95];
    c.volume_weights = vec![0.7, 1.3];
    c.n_boundary = 0;
    c.boundary_weights.clear();
    c.conormals.clear();
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, 0.5, 2).unwrap();
    let w = k.eval(KernelLevel::Base, &c.points[0..3], &c.points[3..6]) * 0.7 * 1.3;
    let ra = common::dense(&interior_laplacian(&c, &k));
    assert_relative_eq!(ra[(0, 0)], w, max_relative = 1e-14);
    assert_relative_eq!(ra[(1, 1)], w, max_relative = 1e-14);
    assert_relative_eq!(ra[(0, 1)], -w, max_relative = 1e-14);
    assert_relative_eq!(ra[(1, 0)], -w, max_relative = 1e-14);
}

#[test]
fn three_point_boundary_laplacian() {
    let c = circle_cloud(3, 0.8);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, 0.8, 2).unwrap();
    let rbl = dense(&boundary_laplacian(&c, &k));
    let l = &c.boundary_weights;
    let chord_sq = 3.0 * 0.75;
    let bar = k.normalisation() * prof.value(KernelLevel::Bar, chord_sq / (4.0 * 0.64));
    for a in 0..3 {
        for b in 0..3 {
            let expect = if a == b {
                (0..3).filter(|&o| o != a).map(|o| bar * l[a] * l[o]).sum::<f64>()
            } else {
                -bar * l[a] * l[b]
            };
            assert_relative_eq!(rbl[(a, b)], expect, max_relative = 1e-12);
        }
    }
    let row_sums = rbl.row_sum();
    assert!(row_sums.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn reduced_system_is_scaled_interior_laplacian() {
    let c = hemi(10, 2);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let sys = assemble(&c, &k, Mode::Reduced).unwrap();
    let ra = dense(&interior_laplacian(&c, &k)) / (c.delta * c.delta);
    let s = dense(&sys.s);
    assert!((s - ra).abs().max() <= 1e-14 * sys.s.norm_inf());
    assert!(sys.coupling.is_reduced());
    assert!(boundary_trace(&sys.coupling, &vec![1.0; c.len()]).iter().all(|v| *v == 0.0));
}

#[test]
fn sparse_operator_matches_double_sums() {
    let prof = KernelProfile::cosine();
    for t in [5, 10] {
        let c = hemi(t, 1);
        let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
        for mode in [Mode::Full, Mode::Reduced] {
            let sys = assemble(&c, &k, mode).unwrap();
            let local = c.with_mode(mode);
            for u in random_vectors(c.len(), 20, t as u64) {
                let err = rel_diff(&sys.s.mul_vec(&u), &oracle_apply(&local, &k, mode, &u));
                assert!(err < 1e-10, "t={t} {mode}: {err:e}");
            }
        }
    }
}

#[test]
fn full_system_has_one_dimensional_kernel() {
    let c = hemi(5, 1);
    assert_eq!(c.len(), 40);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    for mode in [Mode::Full, Mode::Reduced] {
        let sys = assemble(&c, &k, mode).unwrap();
        let eig = eigenvalues(&dense(&sys.s));
        let top = eig.last().unwrap().abs();
        assert!(eig[0].abs() <= 1e-12 * top, "{mode}: {:e}", eig[0]);
        assert!(eig[1] > 1e-8 * top, "{mode}: {:e}", eig[1]);
    }
}

#[test]
fn trace_of_constants_is_constant() {
    let c = hemi(10, 3);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let coupling = BoundaryCoupling::new(&c, &k, Mode::Full).unwrap();
    for v in boundary_trace(&coupling, &vec![2.5; c.len()]) {
        assert_relative_eq!(v, 2.5, max_relative = 1e-14);
    }
    assert!(coupling.omega_hat.iter().all(|w| *w > 0.0));
}

#[test]
fn trace_of_exact_solution_is_first_order_close() {
    let prof = KernelProfile::cosine();
    let gap = |t| {
        let c = hemi(t, 1);
        let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
        let coupling = BoundaryCoupling::new(&c, &k, Mode::Full).unwrap();
        let u: Vec<f64> = (0..c.len()).map(|i| ManifoldCase::Hemisphere2.exact_u(c.point(i))).collect();
        let v = boundary_trace(&coupling, &u);
        let worst = (0..c.boundary_len())
            .map(|kk| (v[kk] - ManifoldCase::Hemisphere2.exact_u(c.boundary_point(kk))).abs())
            .fold(0.0, f64::max);
        (worst, c.delta)
    };
    let (g10, d10) = gap(10);
    let (g40, d40) = gap(40);
    assert!(g40 < g10);
    assert!(g40 <= d40, "{g40} vs delta {d40}");
    assert!(g10 <= d10, "{g10} vs delta {d10}");
}

#[test]
fn source_vector_is_weighted_mean_free() {
    let c = hemi(10, 1);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let f = source_vector(&c, &k, |x| ManifoldCase::Hemisphere2.forcing(x));
    let total: f64 = f.iter().zip(&c.volume_weights).map(|(a, b)| a * b).sum();
    let scale: f64 = f.iter().zip(&c.volume_weights).map(|(a, b)| (a * b).abs()).sum();
    assert!(total.abs() <= 1e-12 * scale);
    assert!(source_vector(&c, &k, |_| 0.0).iter().all(|v| *v == 0.0));
    let constant = source_vector(&c, &k, |_| 1.0);
    assert!(weighted_mean(&constant, &c.volume_weights).abs() < 1e-14);
}

#[test]
fn rhs_sums_to_zero() {
    let c = hemi(10, 4);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let sys = assemble_with(&c, &k, Mode::Full, |x| x[0] * x[1] + x[2]).unwrap();
    let sum: f64 = sys.rhs.iter().sum();
    let l1: f64 = sys.rhs.iter().map(|v| v.abs()).sum();
    assert!(sum.abs() <= 1e-12 * l1);
}

#[test]
fn matrix_export_round_trip() {
    let c = hemi(5, 1);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let sys = assemble(&c, &k, Mode::Full).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.coo");
    sys.export_matrix(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut m = vec![vec![0.0; c.len()]; c.len()];
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let (i, j, v): (usize, usize, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap());
        m[i][j] = v;
    }
    assert_eq!(m, sys.s.to_dense());
    let header = std::fs::read_to_string(dir.path().join("s.coo.header")).unwrap();
    assert!(header.contains("n0 = 40"));
    assert!(header.contains(&format!("nnz = {}", sys.s.nnz())));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assembled_system_structure(seed in 1u64..500, t in 5usize..12, full in any::<bool>()) {
        let c = hemi(t, seed);
        let prof = KernelProfile::cosine();
        let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
        let mode = if full { Mode::Full } else { Mode::Reduced };
        let sys = assemble(&c, &k, mode).unwrap();
        prop_assert_eq!(sys.s.asymmetry(), 0.0);
        let ones = vec![1.0; c.len()];
        let s1 = sys.s.mul_vec(&ones).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(s1 <= 1e-10 * sys.s.norm_inf());
        for x in random_vectors(c.len(), 10, seed) {
            let norm = dot(&x, &x).sqrt();
            let x: Vec<f64> = x.iter().map(|v| v / norm).collect();
            prop_assert!(dot(&x, &sys.s.mul_vec(&x)) >= -1e-12);
        }
    }
}
