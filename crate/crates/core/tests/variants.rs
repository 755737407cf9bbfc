mod common;

use common::{dense, eigenvalues, random_vectors};
use nonlocal_neumann::assembly::assemble;
use nonlocal_neumann::geometry::{sample_case, ManifoldCase, Mode, PointCloud};
use nonlocal_neumann::harness::{e2_from_samples, run_single};
use nonlocal_neumann::kernels::{KernelProfile, ScaledKernel};
use nonlocal_neumann::sparse::dot;
use nonlocal_neumann::variants::{
    assemble_lambda, manufactured_neumann, nonlinear_solve, solve_variant, Field, NeumannData, NonlinearProblem,
    Variant, VariantConfig,
};
use nonlocal_neumann::Error;
use proptest::prelude::*;

const CASE: ManifoldCase = ManifoldCase::Hemisphere2;

fn hemi(t: usize, seed: u64) -> PointCloud {
    sample_case(CASE, t, seed).unwrap()
}

fn e2_of(t: usize, cfg: &VariantConfig) -> f64 {
    run_single(CASE, t, 1, Mode::Full, cfg, &KernelProfile::cosine()).unwrap().0.e2
}

#[test]
fn lambda_system_is_positive_definite() {
    let c = hemi(5, 1);
    assert_eq!(c.len(), 40);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    for mode in [Mode::Full, Mode::Reduced] {
        let sys = assemble_lambda(&c, &k, mode, &Field::Constant(1.0), |x| CASE.forcing(x)).unwrap();
        assert_eq!(sys.s.asymmetry(), 0.0);
        let eig = eigenvalues(&dense(&sys.s));
        assert!(eig[0] > 0.0, "{mode}: {:e}", eig[0]);
    }
}

#[test]
fn zero_lambda_recovers_base_operator() {
    let c = hemi(5, 2);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let base = assemble(&c, &k, Mode::Full).unwrap();
    let lam = assemble_lambda(&c, &k, Mode::Full, &Field::Constant(0.0), |x| CASE.forcing(x)).unwrap();
    let diff = (dense(&base.s) - dense(&lam.s)).abs().max();
    assert!(diff <= 1e-14 * base.s.norm_inf());
}

#[test]
fn reaction_term_is_linear_in_lambda() {
    let c = hemi(5, 3);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let f = |x: &[f64]| CASE.forcing(x);
    let s0 = dense(&assemble_lambda(&c, &k, Mode::Full, &Field::Constant(0.0), f).unwrap().s);
    let s1 = dense(&assemble_lambda(&c, &k, Mode::Full, &Field::Constant(1.0), f).unwrap().s);
    let s3 = dense(&assemble_lambda(&c, &k, Mode::Full, &Field::Constant(3.0), f).unwrap().s);
    let expect = &s0 + (&s1 - &s0) * 3.0;
    assert!((s3 - expect).abs().max() <= 1e-12 * s1.abs().max());
}

#[test]
fn lambda_error_decreases() {
    let cfg = VariantConfig::new(Variant::Lambda);
    let e: Vec<f64> = [5, 10, 20].iter().map(|&t| e2_of(t, &cfg)).collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
}

#[test]
fn variable_lambda_assembles_and_solves() {
    let c = hemi(10, 1);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let mut cfg = VariantConfig::new(Variant::Lambda);
    cfg.lambda = Field::function(|x| 1.0 + x[2]);
    let sol = solve_variant(&c, &k, Mode::Full, &cfg).unwrap();
    assert!(sol.result.converged);
}

#[test]
fn nonpositive_lambda_is_a_configuration_error() {
    let mut cfg = VariantConfig::new(Variant::Lambda);
    cfg.lambda = Field::Constant(-1.0);
    let err = cfg.validate(2).unwrap_err();
    assert!(matches!(err, Error::Configuration(_)));
    let mut nl = VariantConfig::new(Variant::Nonlinear);
    nl.p = 1.0;
    assert!(nl.validate(2).is_err());
    nl.p = 1.5;
    nl.theta = Some(0.0);
    assert!(nl.validate(2).is_err());
    assert!("neither".parse::<NeumannData>().is_err());
}

fn problem(t: usize, lambda: f64, p: f64) -> NonlinearProblem {
    let c = hemi(t, 1);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let man = nonlocal_neumann::variants::manufactured_nonlinear(CASE, lambda, p);
    NonlinearProblem::new(&c, &k, Mode::Full, lambda, p, &*man.f).unwrap()
}

#[test]
fn energy_gradient_is_the_residual() {
    let pr = problem(5, 1.0, 1.5);
    let h = 1e-6;
    for u in random_vectors(pr.base.len(), 3, 5) {
        let g = pr.residual(&u);
        for dir in random_vectors(pr.base.len(), 2, 9) {
            let up: Vec<f64> = u.iter().zip(&dir).map(|(a, d)| a + h * d).collect();
            let um: Vec<f64> = u.iter().zip(&dir).map(|(a, d)| a - h * d).collect();
            let fd = (pr.energy(&up) - pr.energy(&um)) / (2.0 * h);
            let exact = dot(&g, &dir);
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{fd} vs {exact}");
        }
    }
}

#[test]
fn energy_of_a_constant() {
    let pr = problem(5, 2.0, 1.5);
    let c = 0.7f64;
    let u = vec![c; pr.base.len()];
    let mass: f64 = pr.parts.interior_mass.iter().chain(&pr.parts.boundary_mass).sum();
    let load: f64 = pr.load.iter().sum();
    let expect = 2.0 / 3.0 * c.powi(3) * mass - c * load;
    assert!((pr.energy(&u) - expect).abs() <= 1e-10 * expect.abs().max(1.0));
}

#[test]
fn picard_converges_with_monotone_energy() {
    let pr = problem(10, 1.0, 1.5);
    let cfg = VariantConfig::new(Variant::Nonlinear);
    let out = nonlinear_solve(&pr, &cfg).unwrap();
    assert!(out.solve.converged);
    assert!(out.nonlinear_residual < 1e-8, "{:e}", out.nonlinear_residual);
    assert!(!out.damping_exhausted);
    for w in out.energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{w:?}");
    }
    assert_eq!(out.energies.len(), out.picard_iterations + 1);
}

#[test]
fn zero_forcing_is_a_fixed_point() {
    let c = hemi(5, 1);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let pr = NonlinearProblem::new(&c, &k, Mode::Full, 1.0, 2.0, |_| 0.0).unwrap();
    let out = nonlinear_solve(&pr, &VariantConfig::new(Variant::Nonlinear)).unwrap();
    assert!(out.solve.u.iter().all(|v| *v == 0.0));
    assert_eq!(out.picard_iterations, 0);
    assert_eq!(out.energies, vec![0.0]);
}

#[test]
fn quadratic_reaction_needs_one_step() {
    let pr = problem(5, 1.0, 1.0);
    let out = nonlinear_solve(&pr, &VariantConfig::new(Variant::Nonlinear)).unwrap();
    assert!(out.picard_iterations <= 2, "{}", out.picard_iterations);
    assert!(out.nonlinear_residual < 1e-9);
}

#[test]
fn nonlinear_error_decreases() {
    let cfg = VariantConfig::new(Variant::Nonlinear);
    let e: Vec<f64> = [5, 10, 20].iter().map(|&t| e2_of(t, &cfg)).collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
}

#[test]
fn nonhomogeneous_error_decreases() {
    let mut cfg = VariantConfig::new(Variant::Nonhomogeneous);
    cfg.g_case = NeumannData::Manufactured;
    let e: Vec<f64> = [5, 10, 20, 40].iter().map(|&t| e2_of(t, &cfg)).collect();
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
}

#[test]
fn zero_flux_path_matches_base_solver() {
    let c = hemi(10, 4);
    let prof = KernelProfile::cosine();
    let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
    let mut cfg = VariantConfig::new(Variant::Nonhomogeneous);
    cfg.g_case = NeumannData::Zero;
    let a = solve_variant(&c, &k, Mode::Full, &cfg).unwrap();
    let b = solve_variant(&c, &k, Mode::Full, &VariantConfig::new(Variant::None)).unwrap();
    let gap = e2_from_samples(&a.result.u, &b.result.u, &c.volume_weights).unwrap();
    assert!(gap < 1e-8, "{gap:e}");
}

#[test]
fn neumann_manufactured_solution_is_compatible() {
    let c = hemi(40, 1);
    let man = manufactured_neumann(CASE);
    let fa: f64 = (0..c.len()).map(|i| (man.f)(c.point(i)) * c.volume_weights[i]).sum();
    let gl: f64 = (0..c.boundary_len()).map(|k| (man.g)(c.boundary_point(k)) * c.boundary_weights[k]).sum();
    assert!((fa + gl).abs() < 0.05 * fa.abs().max(gl.abs()), "{fa} {gl}");
    let mean: f64 = (0..c.len()).map(|i| (man.u)(c.point(i)) * c.volume_weights[i]).sum();
    assert!(mean.abs() < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lambda_operator_is_spd_on_random_vectors(seed in 1u64..300, lambda in 0.01f64..10.0) {
        let c = hemi(8, seed);
        let prof = KernelProfile::cosine();
        let k = ScaledKernel::new(&prof, c.delta, 2).unwrap();
        let sys = assemble_lambda(&c, &k, Mode::Full, &Field::Constant(lambda), |x| CASE.forcing(x)).unwrap();
        prop_assert_eq!(sys.s.asymmetry(), 0.0);
        for x in random_vectors(c.len(), 8, seed) {
            prop_assert!(dot(&x, &sys.s.mul_vec(&x)) > 0.0);
        }
        let ones = vec![1.0; c.len()];
        prop_assert!(dot(&ones, &sys.s.mul_vec(&ones)) > 0.0);
    }

    #[test]
    fn energy_is_convex_along_lines(seed in 1u64..100, s in 0.0f64..1.0) {
        let pr = problem(5, 1.0, 1.5);
        let v = random_vectors(pr.base.len(), 2, seed);
        let mid: Vec<f64> = v[0].iter().zip(&v[1]).map(|(a, b)| (1.0 - s) * a + s * b).collect();
        let bound = (1.0 - s) * pr.energy(&v[0]) + s * pr.energy(&v[1]);
        prop_assert!(pr.energy(&mid) <= bound + 1e-10 * bound.abs().max(1.0));
    }
}
