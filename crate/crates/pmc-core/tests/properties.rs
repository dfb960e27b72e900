//! Property tests for the invariants that hold across whole input families.

use pmc_core::geometry::{integrate_jacobi, ModelGeometry, Radial, RadialFunction};
use pmc_core::grid::{DiscreteField, PolarGrid};
use pmc_core::radial::{flux_integral, solve_radial};
use pmc_core::solver::{solve_dirichlet, DirichletProblem, SolverConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Jacobi fields of nonnegative curvature are strictly increasing and
    /// convex, and grow monotonically with the curvature profile.
    #[test]
    fn jacobi_positivity_and_sturm(k1 in 0.0..1.5f64, dk in 0.0..1.5f64) {
        let f1 = integrate_jacobi(&RadialFunction::constant(k1), 6.0, 2e-3).unwrap();
        let f2 = integrate_jacobi(&RadialFunction::constant(k1 + dk), 6.0, 2e-3).unwrap();
        let mut prev = 0.0;
        for i in 1..=60 {
            let r = 0.1 * i as f64;
            let v1 = f1.value(r);
            prop_assert!(v1 > prev);
            prop_assert!(f1.d2(r) >= -1e-12);
            prop_assert!(v1 <= f2.value(r) * (1.0 + 1e-10));
            prev = v1;
        }
    }

    /// The flux integral is additive over subintervals.
    #[test]
    fn flux_additivity(h in -0.9..0.9f64, r1 in 0.3..2.0f64, dr in 0.3..2.0f64) {
        let geom = ModelGeometry::hyperbolic(2, 6.0);
        let hf = RadialFunction::constant(h);
        let whole = flux_integral(&geom, &hf, r1 + dr);
        let first = flux_integral(&geom, &hf, r1);
        // the second piece from the shifted integrand
        let tail = whole - first;
        let direct = pmc_core::quad::integrate(
            &|t| 2.0 * h * libm::cosh(t) * libm::sinh(t),
            r1,
            r1 + dr,
            1e-3,
        );
        prop_assert!((tail - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    /// Replacing the radial data by its negative flips the solution around
    /// the anchor, bit for bit.
    #[test]
    fn radial_odd_symmetry(h in 0.05..0.95f64, r_max in 2.0..5.0f64) {
        let geom = ModelGeometry::hyperbolic(2, 8.0);
        let up = solve_radial(&geom, &RadialFunction::constant(h), r_max, (0.0, 0.0)).unwrap();
        let dn = solve_radial(&geom, &RadialFunction::constant(-h), r_max, (0.0, 0.0)).unwrap();
        for k in 0..up.u.len() {
            prop_assert_eq!(up.u[k], -dn.u[k]);
        }
    }

    /// Quadrature identity at every node of a radial solve.
    #[test]
    fn radial_quadrature_identity(h in 0.05..0.9f64) {
        let geom = ModelGeometry::hyperbolic(2, 6.0);
        let sol = solve_radial(&geom, &RadialFunction::constant(h), 4.0, (0.0, 0.0)).unwrap();
        for k in 0..sol.r.len() {
            if sol.r[k] < sol.guard_radius() {
                continue;
            }
            let rho = libm::cosh(sol.r[k]);
            let lhs = sol.du[k] * sol.du[k] * sol.denom[k];
            let rhs = sol.flux[k] * sol.flux[k] / (rho * rho);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Maximum principle: minimal graphs stay between their boundary
    /// extrema for arbitrary smooth boundary data.
    #[test]
    fn maximum_principle_random_boundary(a in -1.0..1.0f64, b in -1.0..1.0f64, m in 1usize..4) {
        let geom = ModelGeometry::hyperbolic(2, 4.0);
        let grid = PolarGrid::new(2.0, 24, 16).unwrap();
        let phi: Vec<f64> = (0..16)
            .map(|j| a * libm::cos(m as f64 * grid.theta(j)) + b)
            .collect();
        let lo = phi.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let problem = DirichletProblem::new(geom, grid, |_, _| 0.0, phi).unwrap();
        let sol = solve_dirichlet(&problem, &SolverConfig::default()).unwrap();
        for v in &sol.u.values {
            prop_assert!(*v <= hi + 1e-9 && *v >= lo - 1e-9);
        }
    }

    /// The discrete operator kills constants exactly, whatever the grid.
    #[test]
    fn residual_annihilates_constants(c in -5.0..5.0f64, nr in 8usize..24, half_nt in 4usize..12) {
        let nt = 2 * half_nt;
        let geom = ModelGeometry::hyperbolic(2, 4.0);
        let grid = PolarGrid::new(2.5, nr, nt).unwrap();
        let problem = DirichletProblem::new(geom, grid, |_, _| 0.0, vec![c; nt]).unwrap();
        let u = DiscreteField::constant(grid, c);
        let res = pmc_core::solver::assemble_residual(&problem, &u).unwrap();
        for v in &res.values {
            prop_assert_eq!(*v, 0.0);
        }
    }
}
