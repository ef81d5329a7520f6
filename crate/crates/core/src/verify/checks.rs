//! Checks that need no solver: fractional calculus, `I^alpha` bounds, the
//! spatial inequalities and `A_p` membership.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::frac_calc::{caputo_derivative, frac_integral, frac_integral_corrected, FracOrder, ProductWeights, TimeGrid, TimeSeries};
use crate::spaces::{
    lattice_centers, lp_decompose, lp_square_function_norm_cells, partition_of_unity, slice_norms, smoothness_norm,
    time_lq, CellWeights, Field, SobolevNorm, SpaceGrid, SpaceTimeField,
};
use crate::special::gamma;
use crate::weights::{ap_constant, BallFamily, Domain, Weight, WeightKind};

use super::family::{forcing_family, spatial_family, time_family};
use super::{spread_aggregates, Aggregate, CheckId, CheckSpec, InstanceResult, Params, Sample, TolerancePolicy};

/// Half-width of the periodic box used by the spatial checks.
pub(crate) const BOX_HALF_WIDTH: f64 = 2.0 * PI;

pub(crate) fn box_grid(n: usize) -> Result<SpaceGrid> {
    SpaceGrid::new(1, BOX_HALF_WIDTH, n)
}

pub(crate) fn spatial_weight(spec: Option<&str>, grid: &SpaceGrid) -> Result<Weight> {
    Weight::parse_spec(spec.unwrap_or("1"), grid.domain())
}

pub(crate) fn time_weight(spec: Option<&str>, final_time: f64) -> Result<Weight> {
    Weight::parse_spec(spec.unwrap_or("1"), Domain::temporal(final_time)?)
}

pub(crate) fn evaluate(spec: &CheckSpec, params: &Params, level: usize) -> Result<Vec<Sample>> {
    match spec.check {
        CheckId::FracIdentities => frac_identities(params, level),
        CheckId::IalphaBound => ialpha_bound(spec, params, level),
        CheckId::SolutionNormBound => solution_norm_bound(spec, params, level),
        CheckId::LpEquivalence => lp_equivalence(spec, params, level),
        CheckId::Interpolation => interpolation(spec, params, level),
        CheckId::Multiplier => multiplier(spec, params, level),
        CheckId::Localization => localization(spec, params, level),
        CheckId::ApMembership => ap_membership(params, level),
        CheckId::MaximalRegularity | CheckId::ScalingInvariance => {
            Err(Error::InvalidArgument(format!("{} is evaluated by the solver harness", spec.check)))
        }
    }
}

/// Polynomial test functions, coefficients in increasing degree.
const POLYNOMIALS: [&[f64]; 5] = [&[0.0, 1.0], &[0.0, 0.0, 1.0], &[1.0, 1.0, -1.0], &[0.5, -1.0, 2.0], &[2.0, 0.0, -0.5]];

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// `I^g` of a polynomial in closed form.
fn poly_integral(c: &[f64], g: f64, t: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(k, &a)| {
            let k = k as f64;
            a * gamma(k + 1.0) / gamma(k + 1.0 + g) * t.powf(k + g)
        })
        .sum()
}

fn relative_error(name: String, got: &[f64], want: &[f64]) -> Sample {
    let err = got.iter().zip(want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let scale = want.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    Sample::new(name, err, scale)
}

/// Semigroup `I^alpha I^beta = I^(alpha+beta)` against the closed form, or
/// inversion `I^alpha d^alpha phi = phi - phi(0) - 1_{alpha>1} phi'(0) t`,
/// on `[0, 1]` with `level` uniform steps.
fn frac_identities(params: &Params, level: usize) -> Result<Vec<Sample>> {
    let alpha = params.need(params.alpha, "alpha")?;
    let order = FracOrder::new(alpha)?;
    let tg = TimeGrid::<f64>::uniform(1.0, level)?;
    let nodes = tg.nodes().to_vec();
    let mut out = Vec::new();
    for (i, c) in POLYNOMIALS.iter().enumerate() {
        let phi = TimeSeries::from_fn(tg.clone(), |t| horner(c, t));
        let name = format!("poly-{i}");
        match params.variant_or("semigroup") {
            "semigroup" => {
                let beta = params.beta.unwrap_or(0.4);
                let inner = frac_integral(&phi, FracOrder::new(beta)?)?;
                // I^beta of a polynomial carries t^(k+beta) terms
                let singular = [beta, 1.0 + beta, 2.0 + beta];
                let got = frac_integral_corrected(&inner, order, &singular)?;
                let want: Vec<f64> = nodes.iter().map(|&t| poly_integral(c, alpha + beta, t)).collect();
                out.push(relative_error(name, got.values(), &want));
            }
            "inversion" => {
                let d = caputo_derivative(&phi, order)?;
                let first = if alpha > 1.0 { 2.0 } else { 1.0 };
                let singular: Vec<f64> = (0..3).map(|k| first + k as f64 - alpha).collect();
                let got = frac_integral_corrected(&d, order, &singular)?;
                let slope = if alpha > 1.0 { c.get(1).copied().unwrap_or(0.0) } else { 0.0 };
                let want: Vec<f64> = nodes.iter().map(|&t| horner(c, t) - c[0] - slope * t).collect();
                out.push(relative_error(name, got.values(), &want));
            }
            other => return Err(Error::InvalidArgument(format!("unknown identity {other:?}"))),
        }
    }
    Ok(out)
}

/// `||I^alpha f||_{L_q((0,T), w_t)} <= T^alpha N ||f||_{L_q((0,T), w_t)}`;
/// the ratio recorded is the left side over `||f||` (no `T^alpha`).
fn ialpha_bound(spec: &CheckSpec, params: &Params, level: usize) -> Result<Vec<Sample>> {
    let alpha = FracOrder::new(params.need(params.alpha, "alpha")?)?;
    let q = params.q.unwrap_or(2.0);
    let big_t = params.final_time.unwrap_or(1.0);
    let tg = TimeGrid::<f64>::uniform(big_t, level)?;
    let w = time_weight(params.w_t.as_deref(), big_t)?;
    let norm = |v: &[f64]| -> Result<f64> {
        let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        time_lq(&tg, &w, q, &abs, level)
    };
    time_family(&tg, spec.seed)
        .into_iter()
        .map(|m| {
            let f = TimeSeries::new(tg.clone(), m.value)?;
            let i = frac_integral(&f, alpha)?;
            Ok(Sample::new(m.name, norm(i.values())?, norm(f.values())?))
        })
        .collect()
}

/// `T^alpha` flatness of the `I^alpha` constants across `T`.
pub(crate) fn ialpha_flatness(instances: &[InstanceResult], policy: &TolerancePolicy) -> Vec<Aggregate> {
    spread_aggregates(
        "t-flatness",
        instances,
        |p| {
            p.final_time?;
            let mut key = p.clone();
            key.final_time = None;
            Some(key.label())
        },
        |i| i.constant() / i.params.final_time.unwrap_or(1.0).powf(i.params.alpha.unwrap_or(0.0)),
        policy.spread,
    )
}

/// `||I^alpha f||_{H(0,t)} <= t^alpha N ||f||_{H(0,t)}` in the mixed norm,
/// for `t` in `{T/8, T/4, T/2, T}`, on an `n x n` space-time grid.
fn solution_norm_bound(spec: &CheckSpec, params: &Params, level: usize) -> Result<Vec<Sample>> {
    let alpha = params.need(params.alpha, "alpha")?;
    let p = params.p.unwrap_or(2.0);
    let q = params.q.unwrap_or(2.0);
    let g = params.gamma.unwrap_or(0.0);
    let big_t = params.final_time.unwrap_or(1.0);
    let sg = box_grid(level)?;
    let tg = TimeGrid::<f64>::uniform(big_t, level)?;
    let w_x = spatial_weight(params.w_x.as_deref(), &sg)?;
    let w_t = time_weight(params.w_t.as_deref(), big_t)?;
    let weights = ProductWeights::new(&tg, alpha);
    let mut out = Vec::new();
    for m in forcing_family(&tg, &sg, spec.seed) {
        let f = m.value;
        let u = integrate_nodes(&f, &weights)?;
        let nu = slice_norms(&u, g, p, &w_x, spec.bessel)?;
        let nf = slice_norms(&f, g, p, &w_x, spec.bessel)?;
        for k in [8, 4, 2, 1] {
            let steps = level / k;
            let t = tg.nodes()[steps];
            let lhs = time_lq(&tg, &w_t, q, &nu, steps)?;
            let rhs = t.powf(alpha) * time_lq(&tg, &w_t, q, &nf, steps)?;
            out.push(Sample::new(format!("{}@T/{k}", m.name), lhs, rhs));
        }
    }
    Ok(out)
}

/// `I^alpha` applied node by node.
fn integrate_nodes(f: &SpaceTimeField<f64>, weights: &ProductWeights<f64>) -> Result<SpaceTimeField<f64>> {
    let m = f.sgrid().len();
    let mut slices = vec![vec![0.0; m]; f.tgrid().len()];
    for i in 0..m {
        for (s, v) in slices.iter_mut().zip(weights.apply(&f.at_node(i))) {
            s[i] = v;
        }
    }
    let slices = slices
        .into_iter()
        .map(|v| Field::new(*f.sgrid(), v))
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(f.tgrid().clone(), slices)
}

/// Square-function norm against the Bessel-potential norm; `upper` bounds
/// the former by the latter, `lower` the reverse.
fn lp_equivalence(spec: &CheckSpec, params: &Params, level: usize) -> Result<Vec<Sample>> {
    let p = params.p.unwrap_or(2.0);
    let g = params.gamma.unwrap_or(0.0);
    let grid = box_grid(level)?;
    let w = spatial_weight(params.w_x.as_deref(), &grid)?;
    let cells = CellWeights::<f64>::new(&grid, &w)?;
    let norm = SobolevNorm::new(&grid, g, p, &cells, spec.bessel);
    let upper = match params.variant_or("upper") {
        "upper" => true,
        "lower" => false,
        other => return Err(Error::InvalidArgument(format!("unknown side {other:?}"))),
    };
    Ok(spatial_family(&grid, spec.seed)
        .into_iter()
        .map(|m| {
            let lp = lp_square_function_norm_cells(&lp_decompose(&m.value), g, p, &cells);
            let s = norm.eval(&m.value);
            if upper {
                Sample::new(m.name, lp, s)
            } else {
                Sample::new(m.name, s, lp)
            }
        })
        .collect())
}

/// `(coefficient, exponent)` of a constant or origin-centered power weight.
fn power_parts(w: &Weight) -> Result<(f64, f64)> {
    match w.kind() {
        WeightKind::Constant { value } => Ok((*value, 0.0)),
        WeightKind::Power { exponent, center } if center.iter().all(|&c| c == 0.0) => Ok((1.0, *exponent)),
        _ => Err(Error::InvalidArgument(format!(
            "interpolated weights need constant or origin-centered power endpoints, got {}",
            w.label()
        ))),
    }
}

/// Interpolation `||u||_{gamma,p,w} <= ||u||_0^(1-theta) ||u||_1^theta`
/// (variant `interpolation`) or the embedding `||u||_{nu} <= N ||u||_{gamma}`
/// for `nu = gamma <= gamma1` (variant `embedding`).
fn interpolation(spec: &CheckSpec, params: &Params, level: usize) -> Result<Vec<Sample>> {
    let grid = box_grid(level)?;
    let family = spatial_family(&grid, spec.seed);
    let g0 = params.gamma.unwrap_or(0.0);
    let g1 = params.need(params.gamma1, "gamma1")?;
    let p0 = params.p.unwrap_or(2.0);
    let w0 = spatial_weight(params.w_x.as_deref(), &grid)?;
    match params.variant_or("interpolation") {
        "interpolation" => {
            let theta = params.need(params.theta, "theta")?;
            if !(theta > 0.0 && theta < 1.0) {
                return Err(Error::InvalidArgument(format!("theta = {theta} outside (0, 1)")));
            }
            let p1 = params.p1.unwrap_or(p0);
            let w1 = spatial_weight(params.w_x1.as_deref(), &grid)?;
            let g = (1.0 - theta) * g0 + theta * g1;
            let p = 1.0 / ((1.0 - theta) / p0 + theta / p1);
            let (a0, a1) = (p * (1.0 - theta) / p0, p * theta / p1);
            let ((c0, l0), (c1, l1)) = (power_parts(&w0)?, power_parts(&w1)?);
            let coef = c0.powf(a0) * c1.powf(a1);
            let lambda = l0 * a0 + l1 * a1;
            let w = if lambda == 0.0 {
                Weight::constant_value(grid.domain(), coef)?
            } else if coef == 1.0 {
                Weight::power_at_origin(grid.domain(), lambda)?
            } else {
                return Err(Error::InvalidArgument("scaled power weights are not supported".into()));
            };
            let (cw, cw0, cw1) = (CellWeights::new(&grid, &w)?, CellWeights::new(&grid, &w0)?, CellWeights::new(&grid, &w1)?);
            let n = SobolevNorm::new(&grid, g, p, &cw, spec.bessel);
            let n0 = SobolevNorm::new(&grid, g0, p0, &cw0, spec.bessel);
            let n1 = SobolevNorm::new(&grid, g1, p1, &cw1, spec.bessel);
            Ok(family
                .into_iter()
                .map(|m| {
                    let rhs = n0.eval(&m.value).powf(1.0 - theta) * n1.eval(&m.value).powf(theta);
                    Sample::new(m.name, n.eval(&m.value), rhs)
                })
                .collect())
        }
        "embedding" => {
            if g0 > g1 {
                return Err(Error::InvalidArgument(format!("embedding needs gamma = {g0} <= gamma1 = {g1}")));
            }
            let cells = CellWeights::new(&grid, &w0)?;
            let low = SobolevNorm::new(&grid, g0, p0, &cells, spec.bessel);
            let high = SobolevNorm::new(&grid, g1, p0, &cells, spec.bessel);
            Ok(family
                .into_iter()
                .map(|m| Sample::new(m.name, low.eval(&m.value), high.eval(&m.value)))
                .collect())
        }
        other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
    }
}

/// Pointwise multipliers used by the multiplier check; all are smooth and
/// periodic on the box of half-width `2 pi`.
fn multipliers(grid: &SpaceGrid) -> Vec<(&'static str, Field<f64>)> {
    let big_l = grid.half_width();
    let bump = move |x: f64| {
        let s = (x - 1.0) / (0.25 * big_l);
        if s.abs() < 1.0 {
            (-1.0 / (1.0 - s * s)).exp()
        } else {
            0.0
        }
    };
    vec![
        ("1+sin(x)/2", Field::from_fn(*grid, |x: &[f64]| 1.0 + 0.5 * x[0].sin())),
        ("cos(x/2)", Field::from_fn(*grid, |x: &[f64]| (0.5 * x[0]).cos())),
        ("exp(-x^2)", Field::from_fn(*grid, |x: &[f64]| (-x[0] * x[0]).exp())),
        ("bump", Field::from_fn(*grid, |x: &[f64]| bump(x[0]))),
        ("2+cos(3x)sin(x/2)", Field::from_fn(*grid, |x: &[f64]| 2.0 + (3.0 * x[0]).cos() * (0.5 * x[0]).sin())),
    ]
}

/// `||a u||_{H^gamma_p(w)} <= N ||a||_{B^|gamma|} ||u||_{H^gamma_p(w)}`.
fn multiplier(spec: &CheckSpec, params: &Params, level: usize) -> Result<Vec<Sample>> {
    let p = params.p.unwrap_or(2.0);
    let g = params.gamma.unwrap_or(0.0);
    let grid = box_grid(level)?;
    let w = spatial_weight(params.w_x.as_deref(), &grid)?;
    let cells = CellWeights::new(&grid, &w)?;
    let norm = SobolevNorm::new(&grid, g, p, &cells, spec.bessel);
    let family = spatial_family(&grid, spec.seed);
    let norms: Vec<f64> = family.iter().map(|m| norm.eval(&m.value)).collect();
    let mut out = Vec::new();
    for (name, a) in multipliers(&grid) {
        let b = smoothness_norm(&a, g.abs())?;
        for (m, &nu) in family.iter().zip(&norms) {
            let au = a.mul(&m.value)?;
            out.push(Sample::new(format!("{name}*{}", m.name), norm.eval(&au), b * nu));
        }
    }
    Ok(out)
}

/// `(sum_k ||zeta_k u||^p)^(1/p)` against `||u||` for a partition of unity
/// of radius `3L/8` on centers spaced `L/4`; `upper` bounds the localized
/// sum, `lower` the reverse.
fn localization(spec: &CheckSpec, params: &Params, level: usize) -> Result<Vec<Sample>> {
    let p = params.p.unwrap_or(2.0);
    let g = params.gamma.unwrap_or(0.0);
    let grid = box_grid(level)?;
    let big_l = grid.half_width();
    let w = spatial_weight(params.w_x.as_deref(), &grid)?;
    let cells = CellWeights::new(&grid, &w)?;
    let norm = SobolevNorm::new(&grid, g, p, &cells, spec.bessel);
    let zeta = partition_of_unity::<f64>(&grid, 0.375 * big_l, &lattice_centers(&grid, 0.25 * big_l))?;
    let upper = match params.variant_or("upper") {
        "upper" => true,
        "lower" => false,
        other => return Err(Error::InvalidArgument(format!("unknown side {other:?}"))),
    };
    spatial_family(&grid, spec.seed)
        .into_iter()
        .map(|m| {
            let mut sum = 0.0;
            for z in zeta.bumps() {
                sum += norm.eval(&z.mul(&m.value)?).powf(p);
            }
            let local = sum.powf(1.0 / p);
            let whole = norm.eval(&m.value);
            Ok(if upper {
                Sample::new(m.name, local, whole)
            } else {
                Sample::new(m.name, whole, local)
            })
        })
        .collect()
}

/// `[w]_p` over dyadic balls down to level `level`; a spatial weight lives
/// on the box, a temporal one (`w_t`) on `(0, 1)`.
fn ap_membership(params: &Params, level: usize) -> Result<Vec<Sample>> {
    let p = params.p.unwrap_or(2.0);
    let w = match (&params.w_x, &params.w_t) {
        (Some(s), None) => spatial_weight(Some(s), &box_grid(16)?)?,
        (None, Some(s)) => time_weight(Some(s), params.final_time.unwrap_or(1.0))?,
        _ => return Err(Error::InvalidArgument("exactly one of w_x, w_t is required".into())),
    };
    let est = ap_constant(&w, p, &BallFamily::for_weight(&w, level)?)?;
    Ok(vec![Sample::new(w.label(), est.value, 1.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_helpers() {
        assert_eq!(horner(&[1.0, 2.0, 3.0], 2.0), 17.0);
        // I^1 t = t^2 / 2
        assert!((poly_integral(&[0.0, 1.0], 1.0, 3.0) - 4.5).abs() < 1e-12);
    }

    #[test]
    fn interpolation_weight_exponents() {
        let g = box_grid(16).unwrap();
        let w = Weight::parse_spec("power:0.5", g.domain()).unwrap();
        assert_eq!(power_parts(&w).unwrap(), (1.0, 0.5));
        let shifted = Weight::parse_spec("power:0.5@1", g.domain()).unwrap();
        assert!(power_parts(&shifted).is_err());
    }
}
