use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::delaunay::{simplex_measure, tetrahedralize, triangulate};
use super::grid::SpatialGrid;
use super::{ManifoldCase, PointCloud};
use crate::error::{Error, Result};
use crate::kernels::dist_sq;

/// Relative size of the retry perturbation, in units of local spacing.
const PERTURBATION: f64 = 1e-12;

/// Orthonormal basis of the orthogonal complement of `normals` in `R^d`.
///
/// Gram–Schmidt over the normals followed by the coordinate axes, taken in
/// order of increasing alignment with the first normal.
pub fn tangent_basis(normals: &[&[f64]], d: usize) -> Vec<Vec<f64>> {
    let mut frame: Vec<Vec<f64>> = Vec::new();
    let push = |v: &[f64], frame: &mut Vec<Vec<f64>>| -> bool {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for f in frame.iter() {
                let c: f64 = w.iter().zip(f).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(f).for_each(|(a, b)| *a -= c * b);
            }
        }
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n < 1e-8 {
            return false;
        }
        w.iter_mut().for_each(|a| *a /= n);
        frame.push(w);
        true
    };
    for n in normals {
        push(n, &mut frame);
    }
    let k = frame.len();
    let lead = normals.first().map(|n| n.to_vec()).unwrap_or_else(|| vec![0.0; d]);
    let mut axes: Vec<usize> = (0..d).collect();
    axes.sort_by(|&a, &b| lead[a].abs().partial_cmp(&lead[b].abs()).unwrap().then(a.cmp(&b)));
    for a in axes {
        if frame.len() == d {
            break;
        }
        let mut e = vec![0.0; d];
        e[a] = 1.0;
        push(&e, &mut frame);
    }
    frame.split_off(k)
}

/// Neighbour-count growth allowed for 2-D stars that are not certified.
pub const STAR_GROWTH_2D: usize = 8;
/// Fraction of the neighbour radius that incident circumspheres may use.
const CERTIFY: f64 = 0.95;

/// Per-point weights from tangent-plane Delaunay stars.
///
/// For every point: take its `k` nearest neighbours in `coords`, project the
/// points onto the tangent space spanned by `tangent(i)`, triangulate (2-D)
/// or tetrahedralize (3-D), and return `1/(m+1)` of the measure of the
/// simplices incident to the point. `extra(i)` lists further points that
/// always join the star of `i`.
///
/// A star counts as complete when every incident circumsphere lies inside
/// the ball spanned by the neighbours; otherwise more neighbours are taken,
/// up to `cap`. `cap = k` gives the plain fixed-`k` rule.
#[allow(clippy::too_many_arguments)]
pub fn star_weights<T, E>(
    coords: &[f64],
    dim: usize,
    k: usize,
    cap: usize,
    cell: f64,
    seed: u64,
    tangent: T,
    extra: E,
) -> Result<Vec<f64>>
where
    T: Fn(usize) -> Vec<Vec<f64>> + Sync,
    E: Fn(usize) -> Vec<usize> + Sync,
{
    let n = coords.len() / dim;
    if n < k + 1 {
        return Err(Error::Sampling(format!(
            "need at least {} points for {k}-neighbour weights, have {n}",
            k + 1
        )));
    }
    let grid = SpatialGrid::new(coords, dim, cell);
    (0..n)
        .into_par_iter()
        .map(|i| star_weight(coords, dim, &grid, (k, cap.max(k)), seed, i, &tangent(i), &extra(i)))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn star_weight(
    coords: &[f64],
    dim: usize,
    grid: &SpatialGrid<'_>,
    (k, cap): (usize, usize),
    seed: u64,
    i: usize,
    basis: &[Vec<f64>],
    extra: &[usize],
) -> Result<f64> {
    let n = coords.len() / dim;
    let x = &coords[i * dim..(i + 1) * dim];
    let m = basis.len();
    let mut kk = k;
    loop {
        let mut members = vec![i];
        members.extend(grid.nearest(x, kk, Some(i)));
        let reach = members
            .last()
            .map(|&j| dist_sq(x, &coords[j * dim..(j + 1) * dim]).sqrt())
            .unwrap_or(0.0);
        for &j in extra {
            if !members.contains(&j) {
                members.push(j);
            }
        }
        let projected: Vec<[f64; 3]> = members
            .iter()
            .map(|&j| {
                let y = &coords[j * dim..(j + 1) * dim];
                let mut c = [0.0; 3];
                for (a, e) in basis.iter().enumerate() {
                    c[a] = y.iter().zip(x).zip(e).map(|((yv, xv), ev)| (yv - xv) * ev).sum();
                }
                c
            })
            .collect();
        let (w, need) = match star_measure(&projected, m) {
            Some(v) => v,
            None => {
                let spacing = members[1..]
                    .iter()
                    .map(|&j| dist_sq(x, &coords[j * dim..(j + 1) * dim]).sqrt())
                    .sum::<f64>()
                    / (members.len() - 1) as f64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let jittered: Vec<[f64; 3]> = projected
                    .iter()
                    .map(|p| {
                        let mut q = *p;
                        for v in q.iter_mut().take(m) {
                            *v += PERTURBATION * spacing * (2.0 * rng.gen::<f64>() - 1.0);
                        }
                        q
                    })
                    .collect();
                log::debug!("degenerate star at point {i}, retrying with perturbation");
                star_measure(&jittered, m).ok_or_else(|| Error::Degenerate {
                    index: i,
                    reason: "star has no positive measure after perturbation".into(),
                })?
            }
        };
        if need <= CERTIFY * reach || kk >= cap || kk + 1 >= n {
            return Ok(w / (m + 1) as f64);
        }
        let radius = need / CERTIFY;
        let wanted = if radius < 3.0 * reach { grid.within(x, radius).len() } else { cap };
        kk = wanted.max(kk * 3 / 2 + 1).min(cap).min(n - 1);
    }
}

/// Star measure of vertex 0 and the radius around it that the incident
/// circumspheres reach.
fn star_measure(projected: &[[f64; 3]], m: usize) -> Option<(f64, f64)> {
    let tri = match m {
        2 => {
            let flat: Vec<[f64; 2]> = projected.iter().map(|p| [p[0], p[1]]).collect();
            triangulate(&flat).ok()?
        }
        3 => tetrahedralize(projected).ok()?,
        _ => return None,
    };
    let mut total = 0.0;
    let mut need: f64 = 0.0;
    for s in tri.incident(0) {
        total += simplex_measure(projected, s, m);
        need = match circumsphere(projected, &s[..m + 1], m) {
            Some((c, r)) => need.max(c.iter().map(|v| v * v).sum::<f64>().sqrt() + r),
            None => f64::INFINITY,
        };
    }
    (total > 0.0 && total.is_finite()).then_some((total, need))
}

/// Circumcentre and radius of a triangle (`m = 2`) or tetrahedron (`m = 3`).
fn circumsphere(pts: &[[f64; 3]], s: &[usize], m: usize) -> Option<([f64; 3], f64)> {
    let a = pts[s[0]];
    let rows: Vec<[f64; 3]> = s[1..]
        .iter()
        .map(|&j| [pts[j][0] - a[0], pts[j][1] - a[1], pts[j][2] - a[2]])
        .collect();
    // Solve 2 (p_j - a)·c = |p_j - a|² in the first m coordinates.
    let rhs: Vec<f64> = rows.iter().map(|r| r[..m].iter().map(|v| v * v).sum::<f64>()).collect();
    let c = if m == 2 {
        let det = 2.0 * (rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]);
        if det == 0.0 {
            return None;
        }
        [
            (rhs[0] * rows[1][1] - rhs[1] * rows[0][1]) / det,
            (rows[0][0] * rhs[1] - rows[1][0] * rhs[0]) / det,
            0.0,
        ]
    } else {
        let (u, v, w) = (rows[0], rows[1], rows[2]);
        let det = 2.0
            * (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                + u[2] * (v[0] * w[1] - v[1] * w[0]));
        if det == 0.0 {
            return None;
        }
        let cross = |p: [f64; 3], q: [f64; 3]| {
            [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]]
        };
        let (vw, wu, uv) = (cross(v, w), cross(w, u), cross(u, v));
        let mut c = [0.0; 3];
        for t in 0..3 {
            c[t] = 2.0 * (rhs[0] * vw[t] + rhs[1] * wu[t] + rhs[2] * uv[t]) / det;
        }
        c
    };
    let r = c[..m].iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut centre = [0.0; 3];
    for t in 0..m {
        centre[t] = a[t] + c[t];
    }
    Some((centre, r))
}

/// Interior volume weights `A_i` with `k` neighbours; boundary samples also
/// take their boundary neighbours (see [`boundary_adjacency`]). On surfaces
/// uncertified stars may grow to `8k` neighbours.
pub fn volume_weights(cloud: &PointCloud, k: usize) -> Result<Vec<f64>> {
    let d = cloud.dim;
    let coords = &cloud.points;
    let off = cloud.boundary_offset();
    let adjacency = boundary_adjacency(cloud);
    let cap = if cloud.intrinsic_dim == 2 { STAR_GROWTH_2D * k } else { k };
    star_weights(
        coords,
        d,
        k,
        cap,
        2.0 * cloud.delta,
        cloud.seed,
        |i| {
            let x = &coords[i * d..(i + 1) * d];
            let normal = cloud.case.surface_normal(x);
            tangent_basis(&[&normal], d)
        },
        |i| {
            if i >= off {
                adjacency[i - off].iter().map(|&l| l + off).collect()
            } else {
                Vec::new()
            }
        },
    )
}

/// Neighbours of each boundary sample among the boundary samples: the two
/// angular neighbours on the circle, the 12 nearest on the 2-sphere.
pub fn boundary_adjacency(cloud: &PointCloud) -> Vec<Vec<usize>> {
    let m0 = cloud.boundary_len();
    let d = cloud.dim;
    let coords = cloud.boundary_coords();
    if m0 < 3 {
        return vec![Vec::new(); m0];
    }
    match cloud.case {
        ManifoldCase::Hemisphere2 => {
            let order = angular_order(coords, d);
            let mut adj = vec![Vec::new(); m0];
            for (pos, &k) in order.iter().enumerate() {
                adj[k] = vec![order[(pos + m0 - 1) % m0], order[(pos + 1) % m0]];
            }
            adj
        }
        ManifoldCase::Hemisphere3 => {
            let kb = 12.min(m0 - 1);
            let cell = spacing_cell(cloud.case.boundary_measure(), m0, 2, kb);
            let grid = SpatialGrid::new(coords, d, cell);
            (0..m0)
                .map(|k| grid.nearest(&coords[k * d..(k + 1) * d], kb, Some(k)))
                .collect()
        }
    }
}

/// Indices sorted by the angle of `(x0, x1)` about the origin.
fn angular_order(coords: &[f64], dim: usize) -> Vec<usize> {
    let n = coords.len() / dim;
    let angle = |k: usize| coords[k * dim + 1].atan2(coords[k * dim]);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)).then(a.cmp(&b)));
    order
}

/// Boundary weights `L_k`: half the chords to the two angular neighbours on
/// the circle, the 20-neighbour triangle rule on the boundary 2-sphere.
pub fn boundary_weights(cloud: &PointCloud) -> Result<Vec<f64>> {
    let m0 = cloud.boundary_len();
    if m0 < 3 {
        return Err(Error::Sampling(format!(
            "boundary weights need at least 3 boundary points, have {m0}"
        )));
    }
    let d = cloud.dim;
    let coords = cloud.boundary_coords();
    match cloud.case {
        ManifoldCase::Hemisphere2 => circle_arc_weights(coords, d),
        ManifoldCase::Hemisphere3 => {
            let k = cloud.case.boundary_weight_neighbors();
            let cell = spacing_cell(cloud.case.boundary_measure(), m0, 2, k);
            let e_w = [0.0, 0.0, 0.0, 1.0];
            star_weights(
                coords,
                d,
                k,
                STAR_GROWTH_2D * k,
                cell,
                cloud.seed.wrapping_add(1),
                |i| {
                    let q = &coords[i * d..(i + 1) * d];
                    tangent_basis(&[q, &e_w], d)
                },
                |_| Vec::new(),
            )
        }
    }
}

/// `L_k = ½(|q_prev - q_k| + |q_k - q_next|)` for points on a circle centred
/// on the `x0`–`x1` origin, neighbours taken in angular order.
pub fn circle_arc_weights(coords: &[f64], dim: usize) -> Result<Vec<f64>> {
    let n = coords.len() / dim;
    if n < 3 {
        return Err(Error::Sampling(format!(
            "arc weights need at least 3 points, have {n}"
        )));
    }
    let order = angular_order(coords, dim);
    let pt = |k: usize| &coords[k * dim..(k + 1) * dim];
    let mut out = vec![0.0; n];
    for (pos, &k) in order.iter().enumerate() {
        let prev = order[(pos + n - 1) % n];
        let next = order[(pos + 1) % n];
        out[k] = 0.5 * (dist_sq(pt(k), pt(prev)).sqrt() + dist_sq(pt(k), pt(next)).sqrt());
    }
    Ok(out)
}

fn spacing_cell(measure: f64, n: usize, m: usize, k: usize) -> f64 {
    (measure * k as f64 / n as f64).powf(1.0 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent() {
        let p = [0.3, -0.4, (1.0f64 - 0.25).sqrt()];
        let b = tangent_basis(&[&p], 3);
        assert_eq!(b.len(), 2);
        for (i, u) in b.iter().enumerate() {
            let dn: f64 = u.iter().zip(&p).map(|(a, c)| a * c).sum();
            assert!(dn.abs() < 1e-14);
            for (j, v) in b.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, c)| a * c).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let q = [0.0, 0.6, 0.8, 0.0];
        let e = [0.0, 0.0, 0.0, 1.0];
        assert_eq!(tangent_basis(&[&q, &e], 4).len(), 2);
    }

    #[test]
    fn equispaced_circle_arc_weights() {
        let r = 3f64.sqrt() / 2.0;
        let m0 = 24;
        let coords: Vec<f64> = (0..m0)
            .flat_map(|k| {
                let a = 2.0 * PI * k as f64 / m0 as f64;
                [r * a.cos(), r * a.sin(), 0.5]
            })
            .collect();
        let l = circle_arc_weights(&coords, 3).unwrap();
        let chord = 2.0 * r * (PI / m0 as f64).sin();
        for v in l {
            assert!((v - chord).abs() < 1e-14);
        }
        assert!(circle_arc_weights(&coords[..6], 3).is_err());
    }

    #[test]
    fn too_few_points_for_star() {
        let coords = vec![0.0; 3 * 5];
        let err = star_weights(&coords, 3, 20, 20, 1.0, 0, |_| tangent_basis(&[&[0.0, 0.0, 1.0]], 3), |_| Vec::new());
        assert!(matches!(err, Err(Error::Sampling(_))));
    }
}
