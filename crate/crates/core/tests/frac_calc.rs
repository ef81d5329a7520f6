use statrs::function::gamma::gamma;
use wfrac::frac_calc::*;
use wfrac::Error;

fn order(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

/// `I^alpha f(t)` by the substitution `u = (t - s)^alpha`, which removes the
/// kernel singularity, and composite Simpson on the result.
fn oracle_integral(f: impl Fn(f64) -> f64, alpha: f64, t: f64) -> f64 {
    let top = t.powf(alpha);
    let n = 20_000;
    let h = top / n as f64;
    let g = |u: f64| f(t - u.powf(1.0 / alpha));
    let mut acc = g(0.0) + g(top);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    acc * h / 3.0 / gamma(alpha + 1.0)
}

fn max_rel(got: &[f64], want: &[f64]) -> f64 {
    let err = got.iter().zip(want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    err / want.iter().fold(0.0f64, |m, b| m.max(b.abs()))
}

#[test]
fn integral_of_constants_and_zero() {
    let g = TimeGrid::<f64>::uniform(1.0, 64).unwrap();
    let zero = frac_integral(&TimeSeries::from_fn(g.clone(), |_| 0.0), order(0.7)).unwrap();
    assert!(zero.values().iter().all(|&v| v == 0.0));

    let one = frac_integral(&TimeSeries::from_fn(g.clone(), |_| 1.0), order(0.5)).unwrap();
    assert_eq!(one.values()[0], 0.0);
    let oracle = oracle_integral(|_| 1.0, 0.5, 1.0);
    assert!((oracle - 1.12838).abs() < 1e-5);
    assert!((one.values()[64] - oracle).abs() < 1e-12);
}

#[test]
fn integral_matches_quadrature_oracle_on_smooth_data() {
    let f = |t: f64| (3.0 * t).cos() * (-t).exp();
    let g = TimeGrid::<f64>::uniform(2.0, 1024).unwrap();
    for a in [0.3, 0.8, 1.4] {
        let got = frac_integral(&TimeSeries::from_fn(g.clone(), f), order(a)).unwrap();
        for n in [128, 512, 1024] {
            let t = g.nodes()[n];
            let want = oracle_integral(f, a, t);
            assert!((got.values()[n] - want).abs() < 5e-6, "alpha {a} t {t}: {} vs {want}", got.values()[n]);
        }
    }
}

#[test]
fn exact_on_piecewise_linear_data() {
    let g = TimeGrid::<f64>::uniform(1.0, 32).unwrap();
    let phi = TimeSeries::from_fn(g.clone(), |t| 2.0 - 3.0 * t);
    let got = frac_integral(&phi, order(0.6)).unwrap();
    for (&v, &t) in got.values().iter().zip(g.nodes()) {
        let want = 2.0 * t.powf(0.6) / gamma(1.6) - 3.0 * t.powf(1.6) / gamma(2.6);
        assert!((v - want).abs() < 1e-13);
    }
}

#[test]
fn semigroup_on_linear_data() {
    let g = TimeGrid::<f64>::uniform(1.0, 256).unwrap();
    let phi = TimeSeries::from_fn(g.clone(), |t| t);
    let inner = frac_integral(&phi, order(0.4)).unwrap();
    let composed = frac_integral(&inner, order(0.3)).unwrap();
    let direct = frac_integral(&phi, order(0.7)).unwrap();
    assert!(max_rel(composed.values(), direct.values()) < 1e-4);
    let want: Vec<f64> = g.nodes().iter().map(|&t| oracle_integral(|s| s, 0.7, t)).collect();
    assert!(max_rel(direct.values(), &want) < 1e-10);
}

#[test]
fn semigroup_converges_at_second_order() {
    let mut errs = Vec::new();
    for n in [128, 256, 512] {
        let g = TimeGrid::<f64>::uniform(1.0, n).unwrap();
        let phi = TimeSeries::from_fn(g.clone(), |t| 1.0 + t - t * t);
        let inner = frac_integral(&phi, order(0.4)).unwrap();
        let got = frac_integral_corrected(&inner, order(0.5), &[0.4, 1.4, 2.4]).unwrap();
        let want: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&t| t.powf(0.9) / gamma(1.9) + t.powf(1.9) / gamma(2.9) - 2.0 * t.powf(2.9) / gamma(3.9))
            .collect();
        errs.push(max_rel(got.values(), &want));
    }
    for w in errs.windows(2) {
        assert!(w[1] < 0.3 * w[0], "{errs:?}");
    }
}

#[test]
fn starting_weights_integrate_singular_powers() {
    let g = TimeGrid::<f64>::uniform(1.0, 64).unwrap();
    for sigma in [0.3, 0.5, 1.5] {
        let phi = TimeSeries::from_fn(g.clone(), |t| t.powf(sigma));
        let plain = frac_integral(&phi, order(0.5)).unwrap();
        let fixed = frac_integral_corrected(&phi, order(0.5), &[0.3, 0.5, 1.5]).unwrap();
        let want: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&t| gamma(sigma + 1.0) / gamma(sigma + 1.5) * t.powf(sigma + 0.5))
            .collect();
        assert!(max_rel(fixed.values(), &want) < 1e-12);
        assert!(max_rel(plain.values(), &want) > 1e-6);
    }
    assert!(frac_integral_corrected(&TimeSeries::from_fn(g.clone(), |t| t), order(0.5), &[0.0]).is_err());
    let short = TimeGrid::<f64>::uniform(1.0, 2).unwrap();
    assert!(frac_integral_corrected(&TimeSeries::from_fn(short, |t| t), order(0.5), &[0.2, 0.4, 0.6]).is_err());
}

#[test]
fn closed_form_caputo_values() {
    let g = TimeGrid::<f64>::uniform(1.0, 1024).unwrap();
    let d = caputo_derivative(&TimeSeries::from_fn(g.clone(), |t| t), order(0.5)).unwrap();
    let d2 = caputo_derivative(&TimeSeries::from_fn(g.clone(), |t| t * t), order(1.5)).unwrap();
    for (i, &t) in g.nodes().iter().enumerate().skip(1).take(1022) {
        let a = 2.0 * (t / std::f64::consts::PI).sqrt();
        let b = 2.0 / gamma(1.5) * t.sqrt();
        assert!((d.values()[i] - a).abs() <= 1e-5 * a);
        assert!((d2.values()[i] - b).abs() <= 1e-5 * b);
    }
    assert!((gamma(2.0) / gamma(1.5) - 1.12838).abs() < 1e-5);
}

#[test]
fn caputo_of_constants_vanishes() {
    let g = TimeGrid::<f64>::graded(1.0, 40, 2.0).unwrap();
    for c in [-3.0, 0.0, 7.5] {
        for a in [0.2, 1.0, 1.7] {
            let d = caputo_derivative(&TimeSeries::from_fn(g.clone(), |_| c), order(a)).unwrap();
            assert!(d.values().iter().all(|&v| v == 0.0));
        }
    }
}

#[test]
fn riemann_liouville_examples() {
    let g = TimeGrid::<f64>::uniform(1.0, 256).unwrap();
    let d = rl_derivative(&TimeSeries::from_fn(g.clone(), |_| 1.0), order(0.5)).unwrap();
    let d15 = rl_derivative(&TimeSeries::from_fn(g.clone(), |t| t), order(1.5)).unwrap();
    for (i, &t) in g.nodes().iter().enumerate().skip(1) {
        let want = t.powf(-0.5) / gamma(0.5);
        assert!((d.values()[i] - want).abs() < 1e-12 * want);
        assert!((d15.values()[i] - want).abs() < 1e-11 * want);
    }
    assert!((1.0 / gamma(0.5) - 0.56419).abs() < 1e-5);
}

#[test]
fn derivative_inverts_integral_on_a_bump() {
    let bump = |t: f64| {
        let s = (t - 0.5) / 0.3;
        if s.abs() < 1.0 {
            (-1.0 / (1.0 - s * s)).exp()
        } else {
            0.0
        }
    };
    let mut errs = Vec::new();
    for n in [256, 512] {
        let g = TimeGrid::<f64>::uniform(1.0, n).unwrap();
        let f = TimeSeries::from_fn(g.clone(), bump);
        let back = rl_derivative(&frac_integral(&f, order(0.6)).unwrap(), order(0.6)).unwrap();
        errs.push(max_rel(back.values(), f.values()));
    }
    assert!(errs[1] < 1e-3 && errs[1] < errs[0], "{errs:?}");
}

#[test]
fn inversion_recovers_the_taylor_remainder() {
    let g = TimeGrid::<f64>::uniform(1.0, 1024).unwrap();
    for a in [0.4, 1.3] {
        let phi = TimeSeries::from_fn(g.clone(), |t| t * t);
        let d = caputo_derivative(&phi, order(a)).unwrap();
        let back = frac_integral(&d, order(a)).unwrap();
        assert!(max_rel(back.values(), phi.values()) < 1e-5, "alpha {a}");
    }
}

#[test]
fn positivity_and_monotone_bound() {
    let g = TimeGrid::<f64>::graded(1.0, 200, 3.0).unwrap();
    let phi = TimeSeries::from_fn(g.clone(), |t| (10.0 * t).sin().abs());
    let out = frac_integral(&phi, order(0.35)).unwrap();
    assert!(out.values().iter().all(|&v| v >= 0.0));

    // sup norm: |I^a f| <= T^a / Gamma(a+1) sup|f|
    for big_t in [0.25, 1.0, 4.0] {
        let g = TimeGrid::<f64>::uniform(big_t, 128).unwrap();
        let f = TimeSeries::from_fn(g.clone(), |t| (7.0 * t).cos());
        let out = frac_integral(&f, order(0.5)).unwrap();
        let bound = big_t.powf(0.5) / gamma(1.5);
        assert!(out.values().iter().all(|v| v.abs() <= bound * (1.0 + 1e-12)));
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(matches!(FracOrder::new(0.0), Err(Error::InvalidOrder { .. })));
    assert!(FracOrder::new(-1.0).is_err());
    assert!(FracOrder::for_equation(2.0).is_err());
    assert!(FracOrder::new(2.5).is_ok());
    let g = TimeGrid::<f64>::uniform(1.0, 8).unwrap();
    let mut v = vec![0.0; 9];
    v[3] = f64::NAN;
    let s = TimeSeries::new(g.clone(), v).unwrap();
    assert!(matches!(frac_integral(&s, order(0.5)), Err(Error::NonFinite { index: 3, .. })));
    assert!(matches!(caputo_derivative(&s, order(0.5)), Err(Error::NonFinite { .. })));
    assert!(caputo_derivative(&TimeSeries::from_fn(g, |t| t), FracOrder::new(2.5).unwrap()).is_err());
}

#[test]
fn mittag_leffler_examples() {
    assert!((mittag_leffler(1.0f64, 1.0, -2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
    assert!((mittag_leffler(0.5f64, 0.5, 0.0).unwrap() - 1.0 / gamma(0.5)).abs() < 1e-14);
    // E_{1/2,1}(-1) = e erfc(1)
    let want = std::f64::consts::E * statrs::function::erf::erfc(1.0);
    assert!((mittag_leffler(0.5f64, 1.0, -1.0).unwrap() - want).abs() < 1e-10 * want);
    assert!((want - 0.427584).abs() < 1e-6);
}

#[test]
fn second_difference_is_second_order_on_smooth_data() {
    let mut errs = Vec::new();
    for n in [32, 64, 128] {
        let g = TimeGrid::<f64>::uniform(1.0, n).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|&t| (2.0 * t).sin()).collect();
        let d = fd_second_derivative(g.nodes(), &v);
        let err = d
            .iter()
            .zip(g.nodes())
            .fold(0.0f64, |m, (x, &t)| m.max((x + 4.0 * (2.0 * t).sin()).abs()));
        errs.push(err);
    }
    assert!(errs[2] < 0.3 * errs[1] && errs[1] < 0.3 * errs[0], "{errs:?}");
}
