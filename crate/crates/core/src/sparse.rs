//! Minimal compressed-sparse-row storage with deterministic products.

use rayon::prelude::*;

/// Anything that can apply a square linear map.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Diagonal of the operator (used for Jacobi preconditioning).
    fn diagonal(&self) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from per-row entry lists; columns within a row must be
    /// strictly increasing.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n_rows = rows.len();
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (c, v) in row {
                debug_assert!(c < n_cols);
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        match c.binary_search(&j) {
            Ok(k) => v[k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`, rows in parallel.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        y.par_iter_mut().enumerate().with_min_len(256).for_each(|(i, yi)| {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, a)| a * x[j]).sum();
        });
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ x` (sequential, column order follows rows).
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows);
        let mut y = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            let (c, v) = self.row(i);
            for (&j, a) in c.iter().zip(v) {
                y[j] += a * x[i];
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n_cols];
        for i in 0..self.n_rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                rows[j].push((i, a));
            }
        }
        CsrMatrix::from_rows(self.n_rows, rows)
    }

    /// `A + s B` for matrices of equal shape.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let rows = (0..self.n_rows)
            .map(|i| {
                let (ca, va) = self.row(i);
                let (cb, vb) = other.row(i);
                let mut out = Vec::with_capacity(ca.len() + cb.len());
                let (mut p, mut q) = (0, 0);
                while p < ca.len() || q < cb.len() {
                    if q == cb.len() || (p < ca.len() && ca[p] < cb[q]) {
                        out.push((ca[p], va[p]));
                        p += 1;
                    } else if p == ca.len() || cb[q] < ca[p] {
                        out.push((cb[q], s * vb[q]));
                        q += 1;
                    } else {
                        out.push((ca[p], va[p] + s * vb[q]));
                        p += 1;
                        q += 1;
                    }
                }
                out
            })
            .collect();
        CsrMatrix::from_rows(self.n_cols, rows)
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// Sparse product `A B`.
    pub fn matmul(&self, b: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n_cols, b.n_rows);
        let rows = (0..self.n_rows)
            .into_par_iter()
            .map_init(
                || Accumulator::new(b.n_cols),
                |acc, i| {
                    let (ca, va) = self.row(i);
                    for (&k, &a) in ca.iter().zip(va) {
                        let (cb, vb) = b.row(k);
                        for (&j, &bv) in cb.iter().zip(vb) {
                            acc.add(j, a * bv);
                        }
                    }
                    acc.drain(|_| true)
                },
            )
            .collect();
        CsrMatrix::from_rows(b.n_cols, rows)
    }

    /// Exactly symmetric `Bᵀ K B` for a symmetric `K` (`self` is `B`).
    ///
    /// Entries with `j >= i` are accumulated once and mirrored.
    pub fn congruence(&self, core: &CsrMatrix) -> CsrMatrix {
        assert_eq!(core.n_rows, self.n_rows);
        assert_eq!(core.n_cols, self.n_rows);
        let kb = core.matmul(self);
        let bt = self.transpose();
        let n = self.n_cols;
        let upper: Vec<Vec<(usize, f64)>> = (0..n)
            .into_par_iter()
            .map_init(
                || Accumulator::new(n),
                |acc, i| {
                    let (ks, bs) = bt.row(i);
                    for (&k, &bki) in ks.iter().zip(bs) {
                        let (js, vs) = kb.row(k);
                        let start = js.partition_point(|&j| j < i);
                        for (&j, &v) in js[start..].iter().zip(&vs[start..]) {
                            acc.add(j, bki * v);
                        }
                    }
                    acc.drain(|_| true)
                },
            )
            .collect();
        mirror_upper(n, upper)
    }

    /// Dense row-major copy (tests and small oracles).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, row) in d.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                row[j] = a;
            }
        }
        d
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n_rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                worst = worst.max((a - self.get(j, i)).abs());
            }
        }
        worst
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n_rows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y);
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, i)).collect()
    }
}

/// Completes a symmetric matrix from rows holding only columns `j >= i`.
pub fn mirror_upper(n: usize, upper: Vec<Vec<(usize, f64)>>) -> CsrMatrix {
    let mut lower: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in upper.iter().enumerate() {
        for &(j, v) in row {
            if j > i {
                lower[j].push((i, v));
            }
        }
    }
    let rows = lower
        .into_iter()
        .zip(upper)
        .map(|(mut lo, up)| {
            lo.extend(up);
            lo
        })
        .collect();
    CsrMatrix::from_rows(n, rows)
}

/// Dense scatter accumulator with a touched list; drains in column order.
pub(crate) struct Accumulator {
    values: Vec<f64>,
    used: Vec<bool>,
    touched: Vec<usize>,
}

impl Accumulator {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            used: vec![false; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, j: usize, v: f64) {
        if !self.used[j] {
            self.used[j] = true;
            self.touched.push(j);
        }
        self.values[j] += v;
    }

    pub(crate) fn drain<F: Fn(usize) -> bool>(&mut self, keep: F) -> Vec<(usize, f64)> {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &j in &self.touched {
            if keep(j) {
                out.push((j, self.values[j]));
            }
            self.values[j] = 0.0;
            self.used[j] = false;
        }
        self.touched.clear();
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
