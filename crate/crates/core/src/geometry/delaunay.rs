//! Bowyer–Watson Delaunay triangulation (2-D) and tetrahedralization (3-D).
//!
//! Orientation and in-sphere tests use adaptive exact predicates. The
//! enclosing super-simplex is placed far enough away (relative to the input
//! extent) that it does not clip hull simplices of realistic inputs.

use std::collections::HashMap;

use robust::{Coord, Coord3D};

/// Scale of the super-simplex relative to the input extent.
const SUPER_SCALE: f64 = 1e18;

#[derive(Debug, Clone, PartialEq)]
pub enum DelaunayError {
    /// Fewer than `dim + 1` distinct points, nothing to triangulate.
    TooFewPoints,
    /// Insertion produced a flat simplex.
    FlatSimplex { point: usize },
    /// Non-finite coordinates.
    NonFinite,
}

/// Simplices (vertex index tuples, `dim + 1` used entries) of a triangulation.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub dim: usize,
    pub simplices: Vec<[usize; 4]>,
}

impl Triangulation {
    pub fn vertices<'a>(&'a self, s: &'a [usize; 4]) -> &'a [usize] {
        &s[..self.dim + 1]
    }

    /// Simplices having `v` as a vertex.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = &[usize; 4]> + '_ {
        self.simplices
            .iter()
            .filter(move |s| s[..self.dim + 1].contains(&v))
    }
}

/// Triangulates 2-D points given as `[x, y]` pairs.
pub fn triangulate(points: &[[f64; 2]]) -> Result<Triangulation, DelaunayError> {
    let coords: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], 0.0]).collect();
    bowyer_watson(&coords, 2)
}

/// Tetrahedralizes 3-D points.
pub fn tetrahedralize(points: &[[f64; 3]]) -> Result<Triangulation, DelaunayError> {
    bowyer_watson(points, 3)
}

/// Unsigned measure (area or volume) of a simplex.
pub fn simplex_measure(pts: &[[f64; 3]], s: &[usize], dim: usize) -> f64 {
    if dim == 2 {
        let (a, b, c) = (pts[s[0]], pts[s[1]], pts[s[2]]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
    } else {
        let (a, b, c, d) = (pts[s[0]], pts[s[1]], pts[s[2]], pts[s[3]]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
        let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]);
        det.abs() / 6.0
    }
}

fn orient(pts: &[[f64; 3]], s: &[usize], dim: usize) -> f64 {
    if dim == 2 {
        let c = |i: usize| Coord {
            x: pts[s[i]][0],
            y: pts[s[i]][1],
        };
        robust::orient2d(c(0), c(1), c(2))
    } else {
        let c = |i: usize| Coord3D {
            x: pts[s[i]][0],
            y: pts[s[i]][1],
            z: pts[s[i]][2],
        };
        robust::orient3d(c(0), c(1), c(2), c(3))
    }
}

/// Positive when `p` lies strictly inside the circumsphere of `s`.
fn in_sphere(pts: &[[f64; 3]], s: &[usize], dim: usize, p: usize, orientation: f64) -> bool {
    let raw = if dim == 2 {
        let c = |i: usize| Coord {
            x: pts[i][0],
            y: pts[i][1],
        };
        robust::incircle(c(s[0]), c(s[1]), c(s[2]), c(p))
    } else {
        let c = |i: usize| Coord3D {
            x: pts[i][0],
            y: pts[i][1],
            z: pts[i][2],
        };
        robust::insphere(c(s[0]), c(s[1]), c(s[2]), c(s[3]), c(p))
    };
    raw * orientation > 0.0
}

struct Cell {
    verts: [usize; 4],
    orientation: f64,
    alive: bool,
}

fn bowyer_watson(input: &[[f64; 3]], dim: usize) -> Result<Triangulation, DelaunayError> {
    let n = input.len();
    if input.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
        return Err(DelaunayError::NonFinite);
    }
    if n < dim + 1 {
        return Err(DelaunayError::TooFewPoints);
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in input {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let extent = (0..dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max).max(1e-300);
    let mut center = [0.0; 3];
    for a in 0..dim {
        center[a] = 0.5 * (lo[a] + hi[a]);
    }
    let big = SUPER_SCALE * extent;

    let mut pts: Vec<[f64; 3]> = input.to_vec();
    let super_start = n;
    if dim == 2 {
        pts.push([center[0] - 3.0 * big, center[1] - 3.0 * big, 0.0]);
        pts.push([center[0] + 3.0 * big, center[1] - 3.0 * big, 0.0]);
        pts.push([center[0], center[1] + 3.0 * big, 0.0]);
    } else {
        pts.push([center[0] - 3.0 * big, center[1] - 3.0 * big, center[2] - 3.0 * big]);
        pts.push([center[0] + 3.0 * big, center[1] - 3.0 * big, center[2] - 3.0 * big]);
        pts.push([center[0], center[1] + 3.0 * big, center[2] - 3.0 * big]);
        pts.push([center[0], center[1], center[2] + 3.0 * big]);
    }
    let mut first = [usize::MAX; 4];
    for (k, slot) in first.iter_mut().take(dim + 1).enumerate() {
        *slot = super_start + k;
    }
    let o = orient(&pts, &first[..dim + 1], dim);
    let mut cells = vec![Cell {
        verts: first,
        orientation: o,
        alive: true,
    }];

    let mut alive = 1usize;
    let mut inserted: Vec<[f64; 3]> = Vec::with_capacity(n);
    for p in 0..n {
        if inserted.contains(&input[p]) {
            continue;
        }
        inserted.push(input[p]);

        let bad: Vec<usize> = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.alive && in_sphere(&pts, &c.verts[..dim + 1], dim, p, c.orientation))
            .map(|(i, _)| i)
            .collect();

        let mut faces: HashMap<[usize; 3], usize> = HashMap::new();
        let mut order: Vec<[usize; 3]> = Vec::new();
        for &ci in &bad {
            cells[ci].alive = false;
            let v = cells[ci].verts;
            for skip in 0..=dim {
                let mut f = [usize::MAX; 3];
                let mut k = 0;
                for (j, &vj) in v[..dim + 1].iter().enumerate() {
                    if j != skip {
                        f[k] = vj;
                        k += 1;
                    }
                }
                f[..dim].sort_unstable();
                let e = faces.entry(f).or_insert(0);
                if *e == 0 {
                    order.push(f);
                }
                *e += 1;
            }
        }
        let before = cells.len();
        for f in order {
            if faces[&f] != 1 {
                continue;
            }
            let mut verts = [usize::MAX; 4];
            verts[..dim].copy_from_slice(&f[..dim]);
            verts[dim] = p;
            let o = orient(&pts, &verts[..dim + 1], dim);
            if o == 0.0 {
                return Err(DelaunayError::FlatSimplex { point: p });
            }
            cells.push(Cell {
                verts,
                orientation: o,
                alive: true,
            });
        }
        alive = alive + (cells.len() - before) - bad.len();
        if cells.len() > 2 * alive + 64 {
            cells.retain(|c| c.alive);
        }
    }

    let simplices = cells
        .into_iter()
        .filter(|c| c.alive && c.verts[..dim + 1].iter().all(|&v| v < super_start))
        .map(|c| c.verts)
        .collect::<Vec<_>>();
    Ok(Triangulation { dim, simplices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hull_area(points: &[[f64; 2]]) -> f64 {
        let mut p = points.to_vec();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let mut hull: Vec<[f64; 2]> = Vec::new();
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
                Box::new(p.iter())
            } else {
                Box::new(p.iter().rev())
            };
            for &q in iter {
                while hull.len() >= start + 2
                    && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0
                {
                    hull.pop();
                }
                hull.push(q);
            }
            hull.pop();
        }
        let mut a = 0.0;
        for i in 0..hull.len() {
            let (u, v) = (hull[i], hull[(i + 1) % hull.len()]);
            a += u[0] * v[1] - u[1] * v[0];
        }
        0.5 * a.abs()
    }

    #[test]
    fn random_2d_covers_hull_and_is_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let pts: Vec<[f64; 2]> = (0..21).map(|_| [rng.gen(), rng.gen()]).collect();
            let tri = triangulate(&pts).unwrap();
            let lifted: Vec<[f64; 3]> = pts.iter().map(|p| [p[0], p[1], 0.0]).collect();
            let area: f64 = tri
                .simplices
                .iter()
                .map(|s| simplex_measure(&lifted, s, 2))
                .sum();
            assert!((area - hull_area(&pts)).abs() < 1e-9 * hull_area(&pts));
            for s in &tri.simplices {
                let o = orient(&lifted, &s[..3], 2);
                for q in 0..pts.len() {
                    if !s[..3].contains(&q) {
                        assert!(!in_sphere(&lifted, &s[..3], 2, q, o));
                    }
                }
            }
        }
    }

    #[test]
    fn random_3d_is_delaunay_and_uses_every_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let pts: Vec<[f64; 3]> = (0..51).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
            let tet = tetrahedralize(&pts).unwrap();
            for v in 0..pts.len() {
                assert!(tet.incident(v).next().is_some(), "vertex {v} unused");
            }
            for s in &tet.simplices {
                let o = orient(&pts, &s[..4], 3);
                for q in 0..pts.len() {
                    if !s[..4].contains(&q) {
                        assert!(!in_sphere(&pts, &s[..4], 3, q, o));
                    }
                }
            }
            // cube corners are almost surely outside; volume within the unit cube
            let vol: f64 = tet.simplices.iter().map(|s| simplex_measure(&pts, s, 3)).sum();
            assert!(vol > 0.3 && vol < 1.0);
        }
    }

    #[test]
    fn square_with_cocircular_corners() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let tri = triangulate(&pts).unwrap();
        assert_eq!(tri.simplices.len(), 2);
    }

    #[test]
    fn collinear_points_have_no_triangles() {
        let pts: Vec<[f64; 2]> = (0..6).map(|i| [i as f64, 2.0 * i as f64]).collect();
        let tri = triangulate(&pts).unwrap();
        assert!(tri.simplices.is_empty());
        assert_eq!(triangulate(&pts[..2]).unwrap_err(), DelaunayError::TooFewPoints);
    }
}
