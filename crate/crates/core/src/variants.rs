//! Generalised models: λ-Poisson, nonhomogeneous Neumann data and the
//! nonlinear reaction term `λ u |u|^{2p-2}`.
//!
//! The reaction terms act through local averages `ū = P̄ U` with
//! `P̄_ji = R̄_δ(p_j,p_i) A_i / ω₂_j` and boundary averages `û = B U`, and are
//! discretised through the energy
//!
//! ```text
//! Σ_j ω₂_j A_j φ(ū_j) + Σ_k ω̂_k L_k φ(û_k),      φ(s) = λ |s|^{2p} / 2p,
//! ```
//!
//! so every linearisation is symmetric and, for `λ > 0`, positive definite.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::assembly::{
    assemble_from_source, source_raw, subtract_weighted_mean, NonlocalSystem, Stencil,
};
use crate::error::{Error, Result};
use crate::geometry::{ManifoldCase, Mode, PointCloud};
use crate::kernels::ScaledKernel;
use crate::solver::{conjugate_gradient, solve_mean_zero, solve_spd, SolveOptions, SolveResult};
use crate::sparse::{dot, norm2, CsrMatrix, LinearOperator};

/// Which model is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Base Poisson problem with homogeneous Neumann data.
    None,
    Lambda,
    Nonhomogeneous,
    Nonlinear,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::None => "none",
            Variant::Lambda => "lambda",
            Variant::Nonhomogeneous => "nonhomogeneous",
            Variant::Nonlinear => "nonlinear",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Variant::None),
            "lambda" | "lambda_poisson" => Ok(Variant::Lambda),
            "nonhomogeneous" => Ok(Variant::Nonhomogeneous),
            "nonlinear" => Ok(Variant::Nonlinear),
            other => Err(Error::Configuration(format!("unknown variant '{other}'"))),
        }
    }
}

/// A scalar field on the ambient space.
#[derive(Clone)]
pub enum Field {
    Constant(f64),
    Function(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl Field {
    pub fn function<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Field::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Field::Constant(c) => *c,
            Field::Function(f) => f(x),
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Constant(c) => write!(f, "Constant({c})"),
            Field::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Boundary data for the nonhomogeneous variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeumannData {
    /// `g = 0`: the base problem through the nonhomogeneous code path.
    Zero,
    /// Manufactured solution with nonzero normal derivative.
    Manufactured,
}

impl FromStr for NeumannData {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(NeumannData::Zero),
            "manufactured" => Ok(NeumannData::Manufactured),
            other => Err(Error::Configuration(format!(
                "unknown g-case '{other}' (expected zero or manufactured)"
            ))),
        }
    }
}

impl fmt::Display for NeumannData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NeumannData::Zero => "zero",
            NeumannData::Manufactured => "manufactured",
        })
    }
}

#[derive(Debug, Clone)]
pub struct VariantConfig {
    pub kind: Variant,
    /// Reaction coefficient (λ-Poisson: any positive field; nonlinear: constant).
    pub lambda: Field,
    pub g_case: NeumannData,
    /// Exponent of the nonlinear term.
    pub p: f64,
    /// Initial damping; `None` picks `1/(2p-1)`.
    pub theta: Option<f64>,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub solve: SolveOptions,
}

impl Default for VariantConfig {
    fn default() -> Self {
        Self {
            kind: Variant::None,
            lambda: Field::Constant(1.0),
            g_case: NeumannData::Manufactured,
            p: 1.5,
            theta: None,
            picard_tol: 1e-12,
            picard_max: 200,
            solve: SolveOptions::default().with_tol(1e-12),
        }
    }
}

impl VariantConfig {
    pub fn new(kind: Variant) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        match self.kind {
            Variant::Lambda => {
                if let Field::Constant(c) = self.lambda {
                    if !(c > 0.0) {
                        return Err(Error::Configuration(format!("lambda must be positive, got {c}")));
                    }
                }
            }
            Variant::Nonlinear => {
                if !(self.p > 1.0) || !self.p.is_finite() {
                    return Err(Error::Configuration(format!("p must exceed 1, got {}", self.p)));
                }
                match self.lambda {
                    Field::Constant(c) if c > 0.0 => {}
                    Field::Constant(c) => {
                        return Err(Error::Configuration(format!("lambda must be positive, got {c}")))
                    }
                    Field::Function(_) => {
                        return Err(Error::Configuration(
                            "the nonlinear model takes a constant lambda".into(),
                        ))
                    }
                }
                if m > 2 && self.p >= m as f64 / (m as f64 - 2.0) {
                    log::warn!(
                        "p = {} is not subcritical for m = {m} (p < {})",
                        self.p,
                        m as f64 / (m as f64 - 2.0)
                    );
                }
                if let Some(t) = self.theta {
                    if !(t > 0.0 && t <= 1.0) {
                        return Err(Error::Configuration(format!("damping must lie in (0, 1], got {t}")));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Averaging operators shared by the reaction terms.
#[derive(Debug, Clone)]
pub struct ReactionParts {
    /// `ω₂_j = Σ_i R̄_δ(p_j,p_i) A_i`.
    pub omega2: Vec<f64>,
    /// `P̄`, `n0 × n0`.
    pub pbar: CsrMatrix,
    pub pbar_t: CsrMatrix,
    /// `B` (`m0 × n0`) and its transpose.
    pub trace: CsrMatrix,
    pub trace_t: CsrMatrix,
    /// `ω₂_j A_j`.
    pub interior_mass: Vec<f64>,
    /// `ω̂_k L_k` (zero in reduced mode).
    pub boundary_mass: Vec<f64>,
}

impl ReactionParts {
    pub fn new(cloud: &PointCloud, stencil: &Stencil, system: &NonlocalSystem) -> Result<Self> {
        let a = &cloud.volume_weights;
        let omega2 = stencil.rbar.mul_vec(a);
        if let Some((j, &w)) = omega2.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
            return Err(Error::NonPositiveAverage { index: j, value: w });
        }
        let rows = (0..cloud.len())
            .map(|j| {
                let (c, v) = stencil.rbar.row(j);
                c.iter().zip(v).map(|(&i, &r)| (i, r * a[i] / omega2[j])).collect()
            })
            .collect();
        let pbar = CsrMatrix::from_rows(cloud.len(), rows);
        let trace = system.coupling.trace.clone();
        let boundary_mass = if system.coupling.is_reduced() {
            vec![0.0; cloud.boundary_len()]
        } else {
            system
                .coupling
                .omega_hat
                .iter()
                .zip(&system.coupling.boundary_weights)
                .map(|(w, l)| w * l)
                .collect()
        };
        Ok(Self {
            interior_mass: omega2.iter().zip(a).map(|(w, a)| w * a).collect(),
            omega2,
            pbar_t: pbar.transpose(),
            pbar,
            trace_t: trace.transpose(),
            trace,
            boundary_mass,
        })
    }

    /// `(ū, û) = (P̄ U, B U)`.
    pub fn averages(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.pbar.mul_vec(u), self.trace.mul_vec(u))
    }

    /// `P̄ᵀ diag(ci ∘ ω₂A) P̄ + Bᵀ diag(cb ∘ ω̂L) B`, exactly symmetric.
    pub fn quadratic_matrix(&self, ci: &[f64], cb: &[f64]) -> CsrMatrix {
        let n = self.pbar.n_rows;
        let m = self.trace.n_rows;
        let di = diagonal(&ci.iter().zip(&self.interior_mass).map(|(c, w)| c * w).collect::<Vec<_>>());
        let db = diagonal(&cb.iter().zip(&self.boundary_mass).map(|(c, w)| c * w).collect::<Vec<_>>());
        let mut out = self.pbar.congruence(&di);
        if m > 0 && self.boundary_mass.iter().any(|w| *w != 0.0) {
            out = out.add_scaled(1.0, &self.trace.congruence(&db));
        }
        debug_assert_eq!(out.n_rows, n);
        out
    }
}

fn diagonal(d: &[f64]) -> CsrMatrix {
    CsrMatrix::from_rows(d.len(), d.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect())
}

/// Exact solution and forcing of a manufactured problem.
#[derive(Clone)]
pub struct Manufactured {
    pub u: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    /// Neumann data `∂u/∂n` on the boundary.
    pub g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for Manufactured {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Manufactured { .. }")
    }
}

/// `-Δu + λ u = f` with the case's mean-free `u` and `∂u/∂n = 0`.
pub fn manufactured_lambda(case: ManifoldCase, lambda: Field) -> Manufactured {
    Manufactured {
        u: Arc::new(move |x| case.exact_u(x)),
        f: Arc::new(move |x| case.forcing(x) + lambda.eval(x) * case.exact_u(x)),
        g: Arc::new(|_| 0.0),
    }
}

/// `-Δu + λ u|u|^{2p-2} = f` with the case's `u`.
pub fn manufactured_nonlinear(case: ManifoldCase, lambda: f64, p: f64) -> Manufactured {
    Manufactured {
        u: Arc::new(move |x| case.exact_u(x)),
        f: Arc::new(move |x| {
            let u = case.exact_u(x);
            case.forcing(x) + lambda * u * u.abs().powf(2.0 * p - 2.0)
        }),
        g: Arc::new(|_| 0.0),
    }
}

/// Pure Neumann problem with nonzero boundary flux.
///
/// Hemisphere2: `u = z² - 7/12`, `f = 6z² - 2`, `g = -√3/2`.
/// Hemisphere3: `u = w - 4/(3π)`, `f = 3w`, `g = -1`.
pub fn manufactured_neumann(case: ManifoldCase) -> Manufactured {
    match case {
        ManifoldCase::Hemisphere2 => Manufactured {
            u: Arc::new(|x| x[2] * x[2] - 7.0 / 12.0),
            f: Arc::new(|x| 6.0 * x[2] * x[2] - 2.0),
            g: Arc::new(|_| -(3f64.sqrt()) / 2.0),
        },
        ManifoldCase::Hemisphere3 => Manufactured {
            u: Arc::new(|x| x[3] - 4.0 / (3.0 * std::f64::consts::PI)),
            f: Arc::new(|x| 3.0 * x[3]),
            g: Arc::new(|_| -1.0),
        },
    }
}

/// `F_i = f_δ^i + Σ_k (2R̄_δ(p_i,q_k) + ζ(p_i,q_k)) g(q_k) L_k`, made
/// `A`-mean-free.
pub fn source_nonhomogeneous<F, G>(cloud: &PointCloud, stencil: &Stencil, f: F, g: G) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    let mut out = source_raw(cloud, &stencil.rbar, &stencil.zeta_rows, &f);
    let m0 = cloud.boundary_len();
    let off = cloud.boundary_offset();
    let gl: Vec<f64> = (0..m0)
        .map(|k| g(cloud.boundary_point(k)) * cloud.boundary_weights[k])
        .collect();
    if gl.iter().any(|v| *v != 0.0) {
        let mut spread = vec![0.0; cloud.len()];
        spread[off..].copy_from_slice(&gl);
        let bar = stencil.rbar.mul_vec(&spread);
        let zeta = stencil.zeta_rows.tr_mul_vec(&gl);
        for ((o, b), z) in out.iter_mut().zip(bar).zip(zeta) {
            *o += 2.0 * b + z;
        }
        let fa: f64 = (0..cloud.len())
            .map(|j| f(cloud.point(j)) * cloud.volume_weights[j])
            .sum();
        let gs: f64 = gl.iter().sum();
        let scale = fa.abs().max(gs.abs()).max(f64::MIN_POSITIVE);
        if (fa + gs).abs() > 1e-3 * scale {
            log::warn!(
                "discrete compatibility violated: Σ f A + Σ g L = {:.3e} (relative {:.3e})",
                fa + gs,
                (fa + gs).abs() / scale
            );
        }
    }
    subtract_weighted_mean(&mut out, &cloud.volume_weights);
    out
}

/// `S_λ` and `rhs = A f_δ` with no mean subtraction.
pub fn assemble_lambda<F>(
    cloud: &PointCloud,
    kernel: &ScaledKernel<'_>,
    mode: Mode,
    lambda: &Field,
    f: F,
) -> Result<NonlocalSystem>
where
    F: Fn(&[f64]) -> f64,
{
    let cloud = cloud.with_mode(mode);
    let stencil = Stencil::new(&cloud, kernel);
    let source = source_raw(&cloud, &stencil.rbar, &stencil.zeta_rows, f);
    let mut system = assemble_from_source(&cloud, kernel, mode, &stencil, source)?;
    let parts = ReactionParts::new(&cloud, &stencil, &system)?;
    let li: Vec<f64> = (0..cloud.len()).map(|j| lambda.eval(cloud.point(j))).collect();
    let lb: Vec<f64> = (0..cloud.boundary_len())
        .map(|k| lambda.eval(cloud.boundary_point(k)))
        .collect();
    let extra = parts.quadratic_matrix(&li, &lb);
    system.s = system.s.add_scaled(1.0, &extra);
    Ok(system)
}

/// Linearised nonlinear operator applied without forming the matrix.
struct FrozenOperator<'a> {
    s: &'a CsrMatrix,
    parts: &'a ReactionParts,
    wi: Vec<f64>,
    wb: Vec<f64>,
}

impl<'a> FrozenOperator<'a> {
    fn new(s: &'a CsrMatrix, parts: &'a ReactionParts, ci: &[f64], cb: &[f64]) -> Self {
        Self {
            s,
            parts,
            wi: ci.iter().zip(&parts.interior_mass).map(|(c, w)| c * w).collect(),
            wb: cb.iter().zip(&parts.boundary_mass).map(|(c, w)| c * w).collect(),
        }
    }
}

impl LinearOperator for FrozenOperator<'_> {
    fn dim(&self) -> usize {
        self.s.n_rows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.s.mul_vec_into(x, y);
        let mut av = self.parts.pbar.mul_vec(x);
        av.iter_mut().zip(&self.wi).for_each(|(a, w)| *a *= w);
        let back = self.parts.pbar_t.mul_vec(&av);
        y.iter_mut().zip(back).for_each(|(yi, b)| *yi += b);
        if !self.wb.is_empty() {
            let mut bv = self.parts.trace.mul_vec(x);
            bv.iter_mut().zip(&self.wb).for_each(|(a, w)| *a *= w);
            let back = self.parts.trace_t.mul_vec(&bv);
            y.iter_mut().zip(back).for_each(|(yi, b)| *yi += b);
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = self.s.diagonal();
        for (i, di) in d.iter_mut().enumerate() {
            let (c, v) = self.parts.pbar_t.row(i);
            *di += c.iter().zip(v).map(|(&j, p)| self.wi[j] * p * p).sum::<f64>();
            let (c, v) = self.parts.trace_t.row(i);
            *di += c.iter().zip(v).map(|(&k, b)| self.wb[k] * b * b).sum::<f64>();
        }
        d
    }
}

/// Everything the nonlinear iteration needs.
#[derive(Debug, Clone)]
pub struct NonlinearProblem {
    /// Base operator `S` (no reaction term).
    pub base: NonlocalSystem,
    pub parts: ReactionParts,
    /// `A f_δ`.
    pub load: Vec<f64>,
    pub lambda: f64,
    pub p: f64,
}

impl NonlinearProblem {
    pub fn new<F>(
        cloud: &PointCloud,
        kernel: &ScaledKernel<'_>,
        mode: Mode,
        lambda: f64,
        p: f64,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let cloud = cloud.with_mode(mode);
        let stencil = Stencil::new(&cloud, kernel);
        let source = source_raw(&cloud, &stencil.rbar, &stencil.zeta_rows, f);
        let base = assemble_from_source(&cloud, kernel, mode, &stencil, source)?;
        let parts = ReactionParts::new(&cloud, &stencil, &base)?;
        let load = base.rhs.clone();
        Ok(Self {
            base,
            parts,
            load,
            lambda,
            p,
        })
    }

    fn frozen_coefficients(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (ub, uh) = self.parts.averages(u);
        let e = 2.0 * self.p - 2.0;
        let w = |s: &f64| {
            if e == 0.0 {
                self.lambda
            } else {
                self.lambda * s.abs().powf(e)
            }
        };
        (ub.iter().map(w).collect(), uh.iter().map(w).collect())
    }

    /// `J(U) = ½UᵀSU + λ/2p (Σ ω₂A|ū|^{2p} + Σ ω̂L|û|^{2p}) - Uᵀ A f_δ`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let su = self.base.s.mul_vec(u);
        let (ub, uh) = self.parts.averages(u);
        let q = 2.0 * self.p;
        let react: f64 = ub
            .iter()
            .zip(&self.parts.interior_mass)
            .map(|(s, w)| w * s.abs().powf(q))
            .sum::<f64>()
            + uh
                .iter()
                .zip(&self.parts.boundary_mass)
                .map(|(s, w)| w * s.abs().powf(q))
                .sum::<f64>();
        0.5 * dot(u, &su) + self.lambda / q * react - dot(u, &self.load)
    }

    /// Gradient of [`energy`](Self::energy): the discrete nonlinear residual.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let (ci, cb) = self.frozen_coefficients(u);
        let op = FrozenOperator::new(&self.base.s, &self.parts, &ci, &cb);
        let mut r = vec![0.0; u.len()];
        op.apply(u, &mut r);
        r.iter_mut().zip(&self.load).for_each(|(ri, l)| *ri -= l);
        r
    }

    /// `‖residual‖ / ‖A f_δ‖`.
    pub fn relative_residual(&self, u: &[f64]) -> f64 {
        let ln = norm2(&self.load);
        let rn = norm2(&self.residual(u));
        if ln == 0.0 {
            rn
        } else {
            rn / ln
        }
    }

    /// Solves the frozen-coefficient system at `u`.
    fn picard_target(&self, u: &[f64], opts: &SolveOptions) -> Result<Vec<f64>> {
        let (ci, cb) = self.frozen_coefficients(u);
        let op = FrozenOperator::new(&self.base.s, &self.parts, &ci, &cb);
        let opts = opts.clone().with_initial(u.to_vec());
        let out = conjugate_gradient(&op, &self.load, &opts, false, &mut |_, _| {})?;
        if !out.converged {
            log::warn!("inner solve stopped at residual {:.3e}", out.residual);
        }
        Ok(out.x)
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearResult {
    pub solve: SolveResult,
    /// `J` after the warm start and after every accepted step.
    pub energies: Vec<f64>,
    pub picard_iterations: usize,
    /// Relative nonlinear residual at the returned iterate.
    pub nonlinear_residual: f64,
    /// Set when a step raised `J` even at the smallest damping.
    pub damping_exhausted: bool,
}

/// Damped Picard iteration with frozen weights `λ|ū|^{2p-2}`, `λ|û|^{2p-2}`.
///
/// Starts from the linear (`p = 1`) solution. A step that raises `J` is
/// retried with half the damping, down to `1/16`.
pub fn nonlinear_solve(problem: &NonlinearProblem, config: &VariantConfig) -> Result<NonlinearResult> {
    let n = problem.base.len();
    let inner = &config.solve;
    if problem.load.iter().all(|v| *v == 0.0) {
        let zero = vec![0.0; n];
        return Ok(NonlinearResult {
            solve: SolveResult {
                v: vec![0.0; problem.base.boundary_len()],
                u: zero.clone(),
                residual: 0.0,
                iterations: 0,
                converged: true,
                shift_applied: 0.0,
            },
            energies: vec![problem.energy(&zero)],
            picard_iterations: 0,
            nonlinear_residual: 0.0,
            damping_exhausted: false,
        });
    }
    let ones_i = vec![problem.lambda; n];
    let ones_b = vec![problem.lambda; problem.base.boundary_len()];
    let linear = FrozenOperator::new(&problem.base.s, &problem.parts, &ones_i, &ones_b);
    let start = conjugate_gradient(&linear, &problem.load, inner, false, &mut |_, _| {})?;
    let mut u = start.x;
    let mut j = problem.energy(&u);
    let mut energies = vec![j];
    let theta0 = config.theta.unwrap_or(1.0 / (2.0 * problem.p - 1.0)).min(1.0);
    let mut exhausted = false;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.picard_max {
        let target = problem.picard_target(&u, inner)?;
        let mut theta = theta0;
        let (next, j_next) = loop {
            let cand: Vec<f64> = u.iter().zip(&target).map(|(a, b)| (1.0 - theta) * a + theta * b).collect();
            let jc = problem.energy(&cand);
            if jc <= j + 1e-14 * j.abs().max(1.0) {
                break (cand, jc);
            }
            if theta <= 1.0 / 16.0 {
                exhausted = true;
                log::warn!("energy increased at the smallest damping on step {iterations}");
                break (cand, jc);
            }
            theta *= 0.5;
        };
        iterations += 1;
        let step = u.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        u = next;
        j = j_next;
        energies.push(j);
        if step <= config.picard_tol {
            converged = true;
            break;
        }
    }
    let nonlinear_residual = problem.relative_residual(&u);
    let v = problem.parts.trace.mul_vec(&u);
    Ok(NonlinearResult {
        solve: SolveResult {
            u,
            v,
            residual: nonlinear_residual,
            iterations,
            converged,
            shift_applied: 0.0,
        },
        energies,
        picard_iterations: iterations,
        nonlinear_residual,
        damping_exhausted: exhausted,
    })
}

/// Discrete energy of the nonlinear model at `u`.
pub fn energy_j_delta(problem: &NonlinearProblem, u: &[f64]) -> f64 {
    problem.energy(u)
}

/// Solution of one variant together with the exact solution at the samples.
#[derive(Debug, Clone)]
pub struct VariantSolution {
    pub result: SolveResult,
    pub exact: Vec<f64>,
}

/// Assembles and solves the selected model on the manufactured problem of
/// `cloud.case`.
pub fn solve_variant(
    cloud: &PointCloud,
    kernel: &ScaledKernel<'_>,
    mode: Mode,
    config: &VariantConfig,
) -> Result<VariantSolution> {
    config.validate(cloud.intrinsic_dim)?;
    let case = cloud.case;
    let samples = |u: &dyn Fn(&[f64]) -> f64| (0..cloud.len()).map(|i| u(cloud.point(i))).collect::<Vec<_>>();
    match config.kind {
        Variant::None => {
            let system = crate::assembly::assemble(cloud, kernel, mode)?;
            let result = solve_mean_zero(&system, &config.solve)?;
            Ok(VariantSolution {
                result,
                exact: samples(&|x| case.exact_u(x)),
            })
        }
        Variant::Lambda => {
            let man = manufactured_lambda(case, config.lambda.clone());
            let system = assemble_lambda(cloud, kernel, mode, &config.lambda, &*man.f)?;
            let result = solve_spd(&system, &config.solve)?;
            Ok(VariantSolution {
                result,
                exact: samples(&*man.u),
            })
        }
        Variant::Nonhomogeneous => {
            let local = cloud.with_mode(mode);
            let stencil = Stencil::new(&local, kernel);
            let (exact, source) = match config.g_case {
                NeumannData::Zero => {
                    let mut src = source_raw(&local, &stencil.rbar, &stencil.zeta_rows, |x| case.forcing(x));
                    subtract_weighted_mean(&mut src, &local.volume_weights);
                    (samples(&|x| case.exact_u(x)), src)
                }
                NeumannData::Manufactured => {
                    let man = manufactured_neumann(case);
                    let src = source_nonhomogeneous(&local, &stencil, &*man.f, &*man.g);
                    (samples(&*man.u), src)
                }
            };
            let system = assemble_from_source(&local, kernel, mode, &stencil, source)?;
            let result = solve_mean_zero(&system, &config.solve)?;
            Ok(VariantSolution { result, exact })
        }
        Variant::Nonlinear => {
            let Field::Constant(lambda) = config.lambda else {
                return Err(Error::Configuration("the nonlinear model takes a constant lambda".into()));
            };
            let man = manufactured_nonlinear(case, lambda, config.p);
            let problem = NonlinearProblem::new(cloud, kernel, mode, lambda, config.p, &*man.f)?;
            let out = nonlinear_solve(&problem, config)?;
            Ok(VariantSolution {
                result: out.solve,
                exact: samples(&*man.u),
            })
        }
    }
}
