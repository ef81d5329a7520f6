use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;
use wfrac::frac_calc::{frac_integral, FracOrder, TimeGrid, TimeSeries};
use wfrac::spaces::{apply_multiplier, bessel_potential, sobolev_norm, Field, SpaceGrid};
use wfrac::weights::{ap_constant, BallFamily, Domain, Weight};

fn series(values: Vec<f64>) -> TimeSeries<f64> {
    let grid = TimeGrid::uniform(1.0, values.len() - 1).unwrap();
    TimeSeries::new(grid, values).unwrap()
}

fn trig(coeffs: &[(f64, f64)]) -> Field<f64> {
    let g = SpaceGrid::new(1, PI, 64).unwrap();
    Field::from_fn(g, |x: &[f64]| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| a * (k as f64 * x[0]).cos() + b * (k as f64 * x[0]).sin())
            .sum()
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_is_linear(
        u in prop::collection::vec(-10.0..10.0f64, 33),
        v in prop::collection::vec(-10.0..10.0f64, 33),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        alpha in 0.05..1.95f64,
    ) {
        let order = FracOrder::new(alpha).unwrap();
        let combined: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = frac_integral(&series(combined), order).unwrap();
        let iu = frac_integral(&series(u), order).unwrap();
        let iv = frac_integral(&series(v), order).unwrap();
        let rhs: Vec<f64> = iu.values().iter().zip(iv.values()).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(close(lhs.values(), &rhs, 1e-12));
    }

    #[test]
    fn integral_preserves_positivity(
        u in prop::collection::vec(0.0..5.0f64, 33),
        alpha in 0.05..1.95f64,
    ) {
        let out = frac_integral(&series(u), FracOrder::new(alpha).unwrap()).unwrap();
        prop_assert!(out.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn multipliers_compose(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..20),
        s in -2.0..2.0f64,
        c in -1.0..1.0f64,
    ) {
        let u = trig(&coeffs);
        let m1 = |xi: &[f64]| Complex::new((1.0 + xi[0] * xi[0]).powf(s / 2.0), c * xi[0]);
        let m2 = |xi: &[f64]| Complex::new((xi[0] * c).cos(), (xi[0] * s).sin());
        let nested = apply_multiplier(m1, &apply_multiplier(m2, &u).unwrap()).unwrap();
        let product = apply_multiplier(|xi| m1(xi) * m2(xi), &u).unwrap();
        prop_assert!(close(nested.values(), product.values(), 1e-12));
    }

    #[test]
    fn bessel_potential_inverts(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..20),
        gamma in -3.0..3.0f64,
    ) {
        let u = trig(&coeffs);
        let back = bessel_potential(&bessel_potential(&u, gamma), -gamma);
        prop_assert!(close(back.values(), u.values(), 1e-12));
    }

    #[test]
    fn bessel_isometry(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..20),
        gamma in -2.0..2.0f64,
        nu in -2.0..2.0f64,
        p in 1.2..4.0f64,
    ) {
        let u = trig(&coeffs);
        let w = Weight::constant(u.grid().domain());
        let lhs = sobolev_norm(&bessel_potential(&u, nu), gamma - nu, p, &w).unwrap();
        let rhs = sobolev_norm(&u, gamma, p, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn ap_characteristic_is_at_least_one(
        lambda in -0.95..3.0f64,
        center in -0.9..0.9f64,
        p in 1.2..4.0f64,
    ) {
        let w = Weight::power(Domain::spatial(1, 1.0).unwrap(), lambda, &[center]).unwrap();
        let est = ap_constant(&w, p, &BallFamily::for_weight(&w, 5).unwrap()).unwrap();
        prop_assert!(est.value >= 1.0 - 1e-12);
    }
}
