//! Conjugate gradients for the semi-definite base system (constants projected
//! out) and for the strictly positive definite variant systems.

use crate::assembly::{boundary_trace, weighted_mean, NonlocalSystem};
use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, LinearOperator};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target `‖b - Sx‖ / ‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `10 · n0`.
    pub max_iter: Option<usize>,
    /// Diagonal preconditioning.
    pub jacobi: bool,
    /// Starting vector (zero if absent).
    pub initial: Option<Vec<f64>>,
    /// Allowed `|Σ rhs| / ‖rhs‖₁` for the mean-zero solve.
    pub rhs_tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            jacobi: false,
            initial: None,
            rhs_tolerance: 1e-10,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_jacobi(mut self, on: bool) -> Self {
        self.jacobi = on;
        self
    }

    pub fn with_initial(mut self, x0: Vec<f64>) -> Self {
        self.initial = Some(x0);
        self
    }

    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = Some(n);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Values at the samples.
    pub u: Vec<f64>,
    /// Boundary trace `V = B U` (zero in reduced mode).
    pub v: Vec<f64>,
    /// Final relative residual, recomputed from scratch.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Constant removed to make `Σ u_i A_i = 0`.
    pub shift_applied: f64,
}

impl SolveResult {
    /// Turns a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence(format!(
                "relative residual {:.3e} after {} iterations",
                self.residual, self.iterations
            )))
        }
    }
}

/// Outcome of the raw iteration.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Removes the plain mean.
pub fn project_mean_free(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn true_residual(op: &dyn LinearOperator, b: &[f64], x: &[f64], project: bool) -> Vec<f64> {
    let mut r = vec![0.0; b.len()];
    op.apply(x, &mut r);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    if project {
        project_mean_free(&mut r);
    }
    r
}

/// (Preconditioned) conjugate gradients on `op x = b`.
///
/// With `project` set the iteration stays orthogonal to the constant vector.
/// `observer` sees each iterate.
pub fn conjugate_gradient(
    op: &dyn LinearOperator,
    b: &[f64],
    opts: &SolveOptions,
    project: bool,
    observer: &mut dyn FnMut(usize, &[f64]),
) -> Result<CgOutcome> {
    let n = op.dim();
    if b.len() != n {
        return Err(Error::Parameter(format!("rhs has length {}, operator {n}", b.len())));
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n.max(1));
    let mut x = match &opts.initial {
        Some(x0) if x0.len() == n => x0.clone(),
        Some(x0) => {
            return Err(Error::Parameter(format!(
                "initial guess has length {}, operator {n}",
                x0.len()
            )))
        }
        None => vec![0.0; n],
    };
    if project {
        project_mean_free(&mut x);
    }
    let mut b = b.to_vec();
    if project {
        project_mean_free(&mut b);
    }
    let bnorm = norm2(&b);
    if bnorm == 0.0 {
        observer(0, &vec![0.0; n]);
        return Ok(CgOutcome {
            x: vec![0.0; n],
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let inv_diag = if opts.jacobi {
        Some(
            op.diagonal()
                .into_iter()
                .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let precondition = |r: &[f64]| -> Vec<f64> {
        let mut z = match &inv_diag {
            Some(w) => r.iter().zip(w).map(|(a, b)| a * b).collect(),
            None => r.to_vec(),
        };
        if project {
            project_mean_free(&mut z);
        }
        z
    };

    let mut r = true_residual(op, &b, &x, project);
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut rel = norm2(&r) / bnorm;
    let mut best = (rel, x.clone());
    let mut iterations = 0;
    observer(0, &x);
    while rel > opts.tol && iterations < max_iter {
        op.apply(&p, &mut q);
        if project {
            project_mean_free(&mut q);
        }
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            log::warn!("conjugate gradients broke down at iteration {iterations} (pᵀSp = {pq:e})");
            break;
        }
        let alpha = rz / pq;
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);
        if project {
            project_mean_free(&mut x);
            project_mean_free(&mut r);
        }
        iterations += 1;
        if iterations % 50 == 0 {
            r = true_residual(op, &b, &x, project);
        }
        rel = norm2(&r) / bnorm;
        observer(iterations, &x);
        if rel < best.0 {
            best = (rel, x.clone());
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    let final_res = norm2(&true_residual(op, &b, &x, project)) / bnorm;
    let (x, residual) = if final_res <= opts.tol {
        (x, final_res)
    } else {
        let br = norm2(&true_residual(op, &b, &best.1, project)) / bnorm;
        if br < final_res {
            (best.1, br)
        } else {
            (x, final_res)
        }
    };
    Ok(CgOutcome {
        x,
        residual,
        iterations,
        converged: residual <= opts.tol,
    })
}

fn check_mean_free_rhs(system: &NonlocalSystem, tol: f64) -> Result<()> {
    let sum: f64 = system.rhs.iter().sum();
    let l1: f64 = system.rhs.iter().map(|v| v.abs()).sum();
    if sum.abs() > tol * l1 {
        return Err(Error::Precondition(format!(
            "rhs is not orthogonal to constants: |Σ rhs| = {:.3e}, ‖rhs‖₁ = {l1:.3e}",
            sum.abs()
        )));
    }
    Ok(())
}

/// Solves `S U = rhs` on the complement of the constants and fixes the
/// constant by `Σ u_i A_i = 0`.
pub fn solve_mean_zero(system: &NonlocalSystem, opts: &SolveOptions) -> Result<SolveResult> {
    solve_mean_zero_observed(system, opts, &mut |_, _| {})
}

pub fn solve_mean_zero_observed(
    system: &NonlocalSystem,
    opts: &SolveOptions,
    observer: &mut dyn FnMut(usize, &[f64]),
) -> Result<SolveResult> {
    check_mean_free_rhs(system, opts.rhs_tolerance)?;
    let out = conjugate_gradient(system, &system.rhs, opts, true, observer)?;
    let mut u = out.x;
    let shift = weighted_mean(&u, &system.volume_weights);
    u.iter_mut().for_each(|x| *x -= shift);
    let v = boundary_trace(&system.coupling, &u);
    if !out.converged {
        log::warn!(
            "mean-zero solve stopped at residual {:.3e} after {} iterations",
            out.residual,
            out.iterations
        );
    }
    Ok(SolveResult {
        u,
        v,
        residual: out.residual,
        iterations: out.iterations,
        converged: out.converged,
        shift_applied: shift,
    })
}

/// Plain conjugate gradients for a strictly positive definite system.
pub fn solve_spd(system: &NonlocalSystem, opts: &SolveOptions) -> Result<SolveResult> {
    solve_spd_observed(system, opts, &mut |_, _| {})
}

pub fn solve_spd_observed(
    system: &NonlocalSystem,
    opts: &SolveOptions,
    observer: &mut dyn FnMut(usize, &[f64]),
) -> Result<SolveResult> {
    let out = conjugate_gradient(system, &system.rhs, opts, false, observer)?;
    let v = boundary_trace(&system.coupling, &out.x);
    Ok(SolveResult {
        u: out.x,
        v,
        residual: out.residual,
        iterations: out.iterations,
        converged: out.converged,
        shift_applied: 0.0,
    })
}
