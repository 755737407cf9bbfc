use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{boundary_weights, volume_weights, ManifoldCase, PointCloud};
use crate::error::{Error, Result};

/// Raw sample coordinates for resolution `t`: `n0 * d` values, boundary last.
///
/// The uniform matrix `B` is drawn row by row from a ChaCha8 stream seeded
/// with `seed`.
pub fn sample_points(case: ManifoldCase, t: usize, seed: u64) -> Result<(Vec<f64>, usize)> {
    if t < 4 {
        return Err(Error::Configuration(format!("resolution t must be >= 4, got {t}")));
    }
    let (n0, m0) = case.sample_sizes(t);
    let d = case.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n0 * d);
    match case {
        ManifoldCase::Hemisphere2 => {
            let h = 3f64.sqrt() / 2.0;
            for i in 0..n0 {
                let b1: f64 = rng.gen();
                let b2: f64 = rng.gen();
                let phi = 2.0 * PI * b1;
                if i < n0 - m0 {
                    let z = 0.5 * (b2 + 1.0);
                    let rho = (1.0 - z * z).sqrt();
                    pts.extend_from_slice(&[rho * phi.cos(), rho * phi.sin(), z]);
                } else {
                    pts.extend_from_slice(&[h * phi.cos(), h * phi.sin(), 0.5]);
                }
            }
        }
        ManifoldCase::Hemisphere3 => {
            for i in 0..n0 {
                let b1: f64 = rng.gen();
                let b2: f64 = rng.gen();
                let b3: f64 = rng.gen();
                if i < n0 - m0 {
                    let (a, c) = (b1.sqrt(), (1.0 - b1).sqrt());
                    let (t1, t2) = (2.0 * PI * b2, PI * b3);
                    pts.extend_from_slice(&[a * t1.cos(), a * t1.sin(), c * t2.cos(), c * t2.sin()]);
                } else {
                    let s = 2.0 * b2 - 1.0;
                    let rho = (1.0 - s * s).sqrt();
                    let phi = 2.0 * PI * b1;
                    pts.extend_from_slice(&[rho * phi.cos(), rho * phi.sin(), s, 0.0]);
                }
            }
        }
    }
    Ok((pts, m0))
}

/// Samples the case at resolution `t`, with `δ = sqrt(1/t)`, and computes
/// co-normals, volume weights and (full-model) boundary weights.
pub fn sample_case(case: ManifoldCase, t: usize, seed: u64) -> Result<PointCloud> {
    let (points, m0) = sample_points(case, t, seed)?;
    let d = case.ambient_dim();
    let n0 = points.len() / d;
    let mut conormals = Vec::with_capacity(m0 * d);
    for k in 0..m0 {
        let q = &points[(n0 - m0 + k) * d..(n0 - m0 + k + 1) * d];
        conormals.extend(case.conormal_unchecked(q));
    }
    let mut cloud = PointCloud {
        case,
        dim: d,
        intrinsic_dim: case.intrinsic_dim(),
        points,
        n_boundary: m0,
        volume_weights: Vec::new(),
        boundary_weights: Vec::new(),
        conormals,
        delta: (1.0 / t as f64).sqrt(),
        t,
        seed,
    };
    cloud.volume_weights = volume_weights(&cloud, case.weight_neighbors())?;
    cloud.boundary_weights = boundary_weights(&cloud)?;
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_follow_the_recipes() {
        let (p, m0) = sample_points(ManifoldCase::Hemisphere2, 5, 1).unwrap();
        assert_eq!((p.len() / 3, m0), (40, 15));
        let (p, m0) = sample_points(ManifoldCase::Hemisphere3, 4, 1).unwrap();
        assert_eq!((p.len() / 4, m0), (256, 64));
        assert!(sample_points(ManifoldCase::Hemisphere2, 3, 1).is_err());
    }

    #[test]
    fn samples_lie_on_the_manifold() {
        for case in [ManifoldCase::Hemisphere2, ManifoldCase::Hemisphere3] {
            let (p, m0) = sample_points(case, 6, 9).unwrap();
            let d = case.ambient_dim();
            let n0 = p.len() / d;
            for i in 0..n0 {
                let x = &p[i * d..(i + 1) * d];
                assert!(case.manifold_residual(x) < 1e-12);
                if i >= n0 - m0 {
                    assert!(case.boundary_residual(x) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_points() {
        let a = sample_points(ManifoldCase::Hemisphere3, 5, 42).unwrap();
        let b = sample_points(ManifoldCase::Hemisphere3, 5, 42).unwrap();
        let c = sample_points(ManifoldCase::Hemisphere3, 5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.0, c.0);
    }
}
