use wfrac::weights::*;
use wfrac::Error;

fn line(half_width: f64) -> Domain {
    Domain::spatial(1, half_width).unwrap()
}

fn estimate(w: &Weight, p: f64, levels: usize) -> ApEstimate {
    ap_constant(w, p, &BallFamily::for_weight(w, levels).unwrap()).unwrap()
}

/// `[|x|^l]_2` on intervals centered at the origin: `1 / (1 - l^2)`.
fn centered_a2(l: f64) -> f64 {
    1.0 / (1.0 - l * l)
}

/// Supremum of the `A_2` product of `|x|^l` over all intervals `[-e r, r]`,
/// `0 <= e <= 1`, scanned in `e`. Intervals away from the origin give less.
fn interval_sup_a2(l: f64) -> f64 {
    (0..=100_000)
        .map(|k| {
            let e = k as f64 / 100_000.0;
            (1.0 + e.powf(1.0 + l)) * (1.0 + e.powf(1.0 - l)) / ((1.0 + e).powi(2) * (1.0 - l * l))
        })
        .fold(0.0, f64::max)
}

#[test]
fn evaluation_examples() {
    let d = line(8.0);
    assert_eq!(weight_eval(&Weight::power_at_origin(d, 0.0).unwrap(), &[3.3]).unwrap(), 1.0);
    assert_eq!(weight_eval(&Weight::power_at_origin(d, 0.5).unwrap(), &[4.0]).unwrap(), 2.0);
    let table = Table::new(vec![-8.0, 0.0, 8.0], vec![1.0, 3.0, 2.0]).unwrap();
    let tab = Weight::tabulated(d, table).unwrap();
    assert_eq!(weight_eval(&tab, &[0.0]).unwrap(), 3.0);
    assert_eq!(weight_eval(&tab, &[8.0]).unwrap(), 2.0);
    assert!(weight_eval(&tab, &[9.0]).is_err());
    // the center reads the regularized value
    let w = Weight::power_at_origin(d, -0.5).unwrap();
    let at_center = weight_eval(&w, &[0.0]).unwrap();
    assert!(at_center.is_finite() && at_center > 1.0);
}

#[test]
fn unit_weight_has_characteristic_one() {
    for p in [1.5, 2.0, 4.0] {
        let e = estimate(&Weight::constant(line(1.0)), p, 6);
        assert_eq!(e.value, 1.0);
        assert!(!e.diverging);
    }
}

#[test]
fn power_weights_lie_between_closed_forms() {
    for l in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        let e = estimate(&Weight::power_at_origin(line(1.0), l).unwrap(), 2.0, 10);
        assert!(!e.diverging, "lambda {l}");
        // the family contains the centered balls but not every interval
        let (lo, hi) = (centered_a2(l), interval_sup_a2(l));
        assert!(e.value >= lo * (1.0 - 1e-12) && e.value <= hi * (1.0 + 1e-9), "lambda {l}: {} not in [{lo}, {hi}]", e.value);
        assert!(e.refinement_trend.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn membership_boundary() {
    for l in [-1.0, 1.0, 2.0] {
        let e = estimate(&Weight::power_at_origin(line(1.0), l).unwrap(), 2.0, 10);
        assert!(e.diverging, "lambda {l}: {:?}", e.refinement_trend);
    }
    // d (p - 1) = 2 for p = 3
    assert!(!estimate(&Weight::power_at_origin(line(1.0), 1.5).unwrap(), 3.0, 10).diverging);
    assert!(estimate(&Weight::power_at_origin(line(1.0), 2.0).unwrap(), 3.0, 10).diverging);
    // the time weight t^(1/2) on (0, T)
    let t = Weight::power_at_origin(Domain::temporal(2.0).unwrap(), 0.5).unwrap();
    assert!(!estimate(&t, 2.0, 10).diverging);
}

#[test]
fn estimates_are_at_least_one() {
    let table = Table::new((0..=64).map(|i| -1.0 + i as f64 / 32.0).collect(), (0..=64).map(|i| 1.0 + (i as f64 * 0.3).sin().powi(2)).collect()).unwrap();
    let weights = [
        Weight::power_at_origin(line(1.0), 0.3).unwrap(),
        Weight::power(line(1.0), -0.4, &[0.25]).unwrap(),
        Weight::tabulated(line(1.0), table).unwrap(),
        Weight::constant_value(line(1.0), 5.0).unwrap(),
    ];
    for w in &weights {
        for p in [1.5, 2.0, 3.0] {
            assert!(estimate(w, p, 6).value >= 1.0 - 1e-12, "{}", w.label());
        }
    }
}

#[test]
fn dilation_and_translation_invariance() {
    for l in [-0.5, 0.5] {
        let base = estimate(&Weight::power_at_origin(line(1.0), l).unwrap(), 2.0, 8).value;
        let dilated = estimate(&Weight::power_at_origin(line(4.0), l).unwrap(), 2.0, 8).value;
        assert!((base - dilated).abs() < 1e-9 * base);
        // the lattice does not move with the center, so only the bounds carry over
        let moved = estimate(&Weight::power(line(1.0), l, &[0.25]).unwrap(), 2.0, 8).value;
        assert!(moved >= centered_a2(l) * (1.0 - 1e-12) && moved <= interval_sup_a2(l) * (1.0 + 1e-9));
    }
}

#[test]
fn monotone_in_p() {
    let w = Weight::power_at_origin(line(1.0), 0.5).unwrap();
    let values: Vec<f64> = [2.0, 3.0, 5.0].iter().map(|&p| estimate(&w, p, 8).value).collect();
    assert!(values.windows(2).all(|v| v[1] <= v[0] * (1.0 + 1e-9)), "{values:?}");
}

#[test]
fn duality_relation() {
    let w = Weight::power_at_origin(line(1.0), 0.5).unwrap();
    let (dual, p_dual) = dual_weight(&w, 2.0).unwrap();
    assert_eq!(p_dual, 2.0);
    assert_eq!(dual.kind(), &WeightKind::Power { exponent: -0.5, center: vec![0.0] });
    let e = estimate(&dual, p_dual, 8);
    assert!(!e.diverging);

    for (l, p) in [(0.5, 2.0), (0.7, 3.0), (-0.3, 1.5)] {
        let w = Weight::power_at_origin(line(1.0), l).unwrap();
        let (dual, p_dual) = dual_weight(&w, p).unwrap();
        let lhs = estimate(&dual, p_dual, 8).value.powf(p - 1.0);
        let rhs = estimate(&w, p, 8).value;
        assert!((lhs - rhs).abs() < 1e-9 * rhs, "lambda {l} p {p}: {lhs} vs {rhs}");
    }

    let (one, q) = dual_weight(&Weight::constant(line(1.0)), 4.0).unwrap();
    assert!(one.is_constant());
    assert!((q - 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn bad_exponents_are_rejected() {
    let w = Weight::constant(line(1.0));
    for p in [1.0, 0.5, f64::INFINITY] {
        assert!(matches!(dual_weight(&w, p), Err(Error::InvalidExponent(_))));
        assert!(ap_constant(&w, p, &BallFamily::for_weight(&w, 5).unwrap()).is_err());
    }
    assert!(BallFamily::for_weight(&w, 3).is_err());
}

#[test]
fn tabulated_weights_from_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.txt");
    let coords: Vec<f64> = (0..=1000).map(|i| -1.0 + i as f64 / 500.0).collect();
    let values: Vec<f64> = coords.iter().map(|x| x.abs().max(1e-3).powf(0.5)).collect();
    Table::new(coords, values).unwrap().write_text(&path).unwrap();
    let spec = format!("table:{}", path.display());
    let w = Weight::parse_spec(&spec, line(1.0)).unwrap();
    let e = estimate(&w, 2.0, 6);
    // close to the exact power weight, which the table samples
    let exact = estimate(&Weight::power_at_origin(line(1.0), 0.5).unwrap(), 2.0, 6).value;
    assert!((e.value - exact).abs() < 0.05 * exact, "{} vs {exact}", e.value);
    assert!(e.warnings.is_empty());
    // coarse tables are flagged
    let coarse = Weight::tabulated(line(1.0), Table::new(vec![-1.0, 0.0, 1.0], vec![1.0, 0.5, 1.0]).unwrap()).unwrap();
    assert!(!estimate(&coarse, 2.0, 6).warnings.is_empty());
}

#[test]
fn quadrature_oracle_for_ball_averages() {
    // average of |x|^l over [a, b] with 0 < a < b, against Gauss-Legendre
    let w = Weight::power_at_origin(line(2.0), 0.7).unwrap();
    let (a, b) = (0.3, 1.7);
    let (nodes, weights) = gauss_legendre(40);
    let oracle: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &g)| g * (0.5 * (a + b) + 0.5 * (b - a) * x).powf(0.7))
        .sum::<f64>()
        * 0.5;
    assert!((w.average(&[a], &[b]) - oracle).abs() < 1e-12);
}
