//! Uniform spatial hash grid over flat `d`-dimensional point storage.

use std::collections::HashMap;

use crate::kernels::dist_sq;

const MAX_DIM: usize = 4;

type CellKey = [i64; MAX_DIM];

/// Buckets point indices by cell; supports fixed-radius and k-nearest queries.
#[derive(Debug, Clone)]
pub struct SpatialGrid<'a> {
    coords: &'a [f64],
    dim: usize,
    cell: f64,
    cells: HashMap<CellKey, Vec<usize>>,
    min_key: CellKey,
    max_key: CellKey,
}

impl<'a> SpatialGrid<'a> {
    /// `coords` holds `len * dim` values, point-major.
    pub fn new(coords: &'a [f64], dim: usize, cell: f64) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "grid supports 1..=4 dimensions");
        assert!(cell > 0.0 && cell.is_finite());
        let n = coords.len() / dim;
        let mut cells: HashMap<CellKey, Vec<usize>> = HashMap::new();
        let mut min_key = [i64::MAX; MAX_DIM];
        let mut max_key = [i64::MIN; MAX_DIM];
        for i in 0..n {
            let key = key_of(&coords[i * dim..(i + 1) * dim], cell);
            for a in 0..MAX_DIM {
                min_key[a] = min_key[a].min(key[a]);
                max_key[a] = max_key[a].max(key[a]);
            }
            cells.entry(key).or_default().push(i);
        }
        Self {
            coords,
            dim,
            cell,
            cells,
            min_key,
            max_key,
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Indices within `radius` of `x` (inclusive), sorted ascending.
    pub fn within(&self, x: &[f64], radius: f64) -> Vec<usize> {
        let reach = (radius / self.cell).ceil().max(1.0) as i64;
        let center = key_of(x, self.cell);
        let r2 = radius * radius;
        let mut out = Vec::new();
        self.for_each_cell_in_box(center, reach, |bucket| {
            for &j in bucket {
                if dist_sq(x, self.point(j)) <= r2 {
                    out.push(j);
                }
            }
        });
        out.sort_unstable();
        out
    }

    /// The `k` nearest points to `x` (ties broken by index), excluding
    /// `exclude` if given. Sorted by distance.
    pub fn nearest(&self, x: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
        let center = key_of(x, self.cell);
        let max_ring = (0..self.dim)
            .map(|a| {
                (center[a] - self.min_key[a])
                    .abs()
                    .max((self.max_key[a] - center[a]).abs())
            })
            .max()
            .unwrap_or(0);
        let mut found: Vec<(f64, usize)> = Vec::new();
        let mut ring = 0i64;
        loop {
            self.for_each_cell_in_shell(center, ring, |bucket| {
                for &j in bucket {
                    if Some(j) != exclude {
                        found.push((dist_sq(x, self.point(j)), j));
                    }
                }
            });
            // Every point closer than ring * cell has been visited.
            let covered = ring as f64 * self.cell;
            if found.len() >= k {
                found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                if k == 0 || found[k - 1].0 < covered * covered {
                    break;
                }
            }
            if ring >= max_ring {
                found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                break;
            }
            ring += 1;
        }
        found.truncate(k);
        found.into_iter().map(|(_, j)| j).collect()
    }

    fn for_each_cell_in_box<F: FnMut(&[usize])>(&self, center: CellKey, reach: i64, mut f: F) {
        let mut offset = [0i64; MAX_DIM];
        for a in 0..self.dim {
            offset[a] = -reach;
        }
        loop {
            let mut key = center;
            for a in 0..self.dim {
                key[a] += offset[a];
            }
            if let Some(b) = self.cells.get(&key) {
                f(b);
            }
            if !advance(&mut offset, self.dim, reach) {
                break;
            }
        }
    }

    fn for_each_cell_in_shell<F: FnMut(&[usize])>(&self, center: CellKey, ring: i64, mut f: F) {
        let mut offset = [0i64; MAX_DIM];
        for a in 0..self.dim {
            offset[a] = -ring;
        }
        loop {
            let on_shell = (0..self.dim).any(|a| offset[a].abs() == ring);
            if on_shell || ring == 0 {
                let mut key = center;
                for a in 0..self.dim {
                    key[a] += offset[a];
                }
                if let Some(b) = self.cells.get(&key) {
                    f(b);
                }
            }
            if !advance(&mut offset, self.dim, ring) {
                break;
            }
        }
    }
}

fn advance(offset: &mut CellKey, dim: usize, reach: i64) -> bool {
    for a in 0..dim {
        if offset[a] < reach {
            offset[a] += 1;
            return true;
        }
        offset[a] = -reach;
    }
    false
}

fn key_of(x: &[f64], cell: f64) -> CellKey {
    let mut key = [0i64; MAX_DIM];
    for (a, v) in x.iter().enumerate() {
        key[a] = (v / cell).floor() as i64;
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(n: usize, dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n * dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect()
    }

    #[test]
    fn fixed_radius_matches_brute_force() {
        for dim in 1..=4 {
            let pts = random_cloud(400, dim, dim as u64);
            let grid = SpatialGrid::new(&pts, dim, 0.3);
            for i in (0..400).step_by(37) {
                let x = &pts[i * dim..(i + 1) * dim];
                let got = grid.within(x, 0.3);
                let want: Vec<usize> = (0..400)
                    .filter(|&j| dist_sq(x, &pts[j * dim..(j + 1) * dim]) <= 0.09)
                    .collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn nearest_matches_brute_force() {
        for dim in 2..=4 {
            let pts = random_cloud(300, dim, 11 + dim as u64);
            let grid = SpatialGrid::new(&pts, dim, 0.1);
            for i in (0..300).step_by(29) {
                let x = &pts[i * dim..(i + 1) * dim];
                let got = grid.nearest(x, 20, Some(i));
                let mut all: Vec<(f64, usize)> = (0..300)
                    .filter(|&j| j != i)
                    .map(|j| (dist_sq(x, &pts[j * dim..(j + 1) * dim]), j))
                    .collect();
                all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                let want: Vec<usize> = all[..20].iter().map(|p| p.1).collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn nearest_returns_everything_when_k_exceeds_population() {
        let pts = random_cloud(5, 3, 1);
        let grid = SpatialGrid::new(&pts, 3, 0.01);
        assert_eq!(grid.nearest(&pts[0..3], 10, Some(0)).len(), 4);
    }
}
