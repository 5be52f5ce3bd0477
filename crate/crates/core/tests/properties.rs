use std::f64::consts::PI;

use proptest::prelude::*;

use spectra_core::bounds::{energy_bound_check, gap_bound_check, hersch_bound_check, minmax_upper_bound, test_function, Annulus, Pole};
use spectra_core::cartesian::{assemble_cartesian, PlanarDensity, PlanarDomain};
use spectra_core::radial::{assemble_radial, solve_radial, Measure};
use spectra_core::{make_density, make_profile, rayleigh_quotient, variational_mu_k, DensityFamily, Expr, Forms, Grid, ProfileChoice};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn quotient_is_scale_invariant(seed in prop::collection::vec(-1.0f64..1.0, 64), c in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
        let dom = PlanarDomain::interval(1.0, 64, PlanarDensity::Log(Expr::parse("x^2").unwrap()));
        let forms = Forms::from_sparse(&assemble_cartesian(&dom).unwrap());
        prop_assume!(seed.iter().any(|v| v.abs() > 1e-3));
        let scaled: Vec<f64> = seed.iter().map(|v| c * v).collect();
        let a = rayleigh_quotient(&seed, &forms).unwrap();
        let b = rayleigh_quotient(&scaled, &forms).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn restricted_pencil_bounds_eigenvalue(k in 1usize..6, seed in prop::collection::vec(-1.0f64..1.0, 6 * 200)) {
        let p = make_profile(ProfileChoice::FlatBall, 1.0, 2).unwrap();
        let d = make_density(DensityFamily::Gaussian { j: 1.5 }, &p).unwrap();
        let grid = Grid::uniform(1.0, 200).unwrap();
        let sys = assemble_radial(&p, &d, 0, &grid).unwrap();
        let exact = solve_radial(&sys, k).unwrap()[k - 1].lambda;
        let forms = Forms::from_radial(&sys).unwrap();
        let subspace: Vec<Vec<f64>> = seed.chunks(200).take(k).map(|c| c.to_vec()).collect();
        let bound = variational_mu_k(&forms, &subspace).unwrap();
        prop_assert!(bound >= exact - 1e-9, "{} < {}", bound, exact);
    }

    #[test]
    fn disjoint_test_functions_have_disjoint_support(a_out in 0.01f64..0.2, gap in 1.0f64..2.0, width in 1.05f64..1.5) {
        let grid = Grid::uniform(1.0, 500).unwrap();
        let a = Annulus::new(Pole::North, 0.0, a_out).unwrap();
        let inner = 4.0 * a_out * gap;
        prop_assume!(2.0 * inner * width <= 1.0);
        let b = Annulus::new(Pole::North, inner, inner * width).unwrap();
        let (u, v) = (test_function(&a, &grid), test_function(&b, &grid));
        prop_assert!(u.iter().zip(&v).all(|(x, y)| x * y == 0.0));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn energy_estimate_holds(outer in 0.02f64..0.5, frac in 0.0f64..0.95, sphere in any::<bool>(), south in any::<bool>()) {
        let (choice, r_max) = if sphere { (ProfileChoice::RoundSphere, PI) } else { (ProfileChoice::FlatBall, 1.0) };
        let p = make_profile(choice, r_max, 3).unwrap();
        let d = make_density(DensityFamily::Custom { sigma: Expr::parse("exp(-r^2/4)").unwrap() }, &p).unwrap();
        let pole = if sphere && south { Pole::South } else { Pole::North };
        let a = Annulus::new(pole, frac * outer * r_max, outer * r_max).unwrap();
        let r = energy_bound_check(&p, &d, &a, &Grid::uniform(r_max, 1000).unwrap()).unwrap();
        prop_assert!(r.satisfied, "{:?}", r);
    }

    #[test]
    fn minmax_holds_for_two_caps(first in 0.02f64..0.1, second in 1.05f64..2.0, riemannian in any::<bool>()) {
        let p = make_profile(ProfileChoice::FlatBall, 1.0, 2).unwrap();
        let d = make_density(DensityFamily::Gaussian { j: 3.0 }, &p).unwrap();
        let inner = 4.0 * first;
        let outer = (inner * second).min(0.5);
        prop_assume!(outer > inner);
        let fam = [Annulus::new(Pole::North, 0.0, first).unwrap(), Annulus::new(Pole::North, inner, outer).unwrap()];
        let nu = if riemannian { Measure::Riemannian } else { Measure::Sigma };
        let r = minmax_upper_bound(&p, &d, &fam, &Grid::uniform(1.0, 800).unwrap(), &nu).unwrap();
        prop_assert!(r.rhs >= r.lhs - 1e-9, "{:?}", r);
    }

    #[test]
    fn sphere_bound_holds(a in -2.0f64..2.0, b in -1.0f64..1.0, three in any::<bool>()) {
        prop_assume!(a.abs() + b.abs() >= 0.1);
        let n = if three { 3 } else { 2 };
        let p = make_profile(ProfileChoice::RoundSphere, PI, n).unwrap();
        let sigma = Expr::parse(&format!("exp({a}*cos(r) + {b}*cos(2*r))")).unwrap();
        let d = make_density(DensityFamily::Custom { sigma }, &p).unwrap();
        let r = hersch_bound_check(&p, &d, &Grid::uniform(PI, 1000).unwrap()).unwrap();
        prop_assert!(r.satisfied && r.margin > 1e-3 * r.rhs, "{:?}", r);
    }

    #[test]
    fn gap_ignores_potential_shift(amp in -4.0f64..4.0, shift in -10.0f64..10.0) {
        let a = gap_bound_check(&Expr::parse(&format!("{amp}*cos(t)")).unwrap(), 3, 400).unwrap();
        let b = gap_bound_check(&Expr::parse(&format!("{amp}*cos(t) + {shift}")).unwrap(), 3, 400).unwrap();
        prop_assert!((a.lhs - b.lhs).abs() < 1e-7 * (1.0 + a.lhs));
        prop_assert!((a.rhs - b.rhs).abs() < 1e-7 * (1.0 + a.rhs));
        prop_assert!(a.satisfied);
    }

    #[test]
    fn density_scaling_scales_mu(c in 0.01f64..100.0) {
        let p = make_profile(ProfileChoice::RoundSphere, PI, 2).unwrap();
        let d = make_density(DensityFamily::Gaussian { j: 1.0 }, &p).unwrap();
        let grid = Grid::uniform(PI, 300).unwrap();
        let mu = spectra_core::radial::spectrum_with_measure(&p, &d, 2, 3, &grid, &Measure::Riemannian).unwrap().expanded();
        let mu_c = spectra_core::radial::spectrum_with_measure(&p, &d.scaled(c), 2, 3, &grid, &Measure::Riemannian).unwrap().expanded();
        for (x, y) in mu.iter().zip(&mu_c).skip(1) {
            prop_assert!((y - c * x).abs() <= 1e-12 * c * x);
        }
    }
}
