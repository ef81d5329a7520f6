//! Solver-based checks: maximal regularity and parabolic scaling.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frac_calc::{FracOrder, TimeGrid};
use crate::scalar::Real;
use crate::solver::{parabolic_rescale, solve, Coefficient, Coefficients, EquationSpec, SolveOptions};
use crate::spaces::{
    bessel_symbol, mixed_norm_with, time_lq, BesselSymbol, CellWeights, MixedNormSpec, SpaceTimeField, SpectralPlan,
};

use super::checks::{box_grid, spatial_weight, time_weight};
use super::family::forcing_family;
use super::{spread_aggregates, worst, wrap, Aggregate, CheckSpec, LevelResult, Params, Sample};

const ELLIPTICITY: f64 = 0.5;

/// `||(1 - Delta)^(gamma/2) D^2 u||` in the mixed norm, where `|D^2 u|` is
/// the pointwise Frobenius norm of the Hessian (just `|u_xx|` in 1-D).
pub fn second_derivative_norm<T: Real>(u: &SpaceTimeField<T>, norm: &MixedNormSpec, kind: BesselSymbol) -> Result<T> {
    let sgrid = *u.sgrid();
    let dim = sgrid.dim();
    let plan = SpectralPlan::<T>::new(&sgrid);
    let bessel = bessel_symbol(&plan, norm.gamma, kind);
    let symbols: Vec<_> = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .map(|(i, j)| {
            let mut beta = vec![0; dim];
            beta[i] += 1;
            beta[j] += 1;
            let weight = if i == j { T::one() } else { T::two() };
            let symbol: Vec<_> = plan
                .derivative_symbol(&beta)
                .into_iter()
                .zip(&bessel)
                .map(|(d, &b)| d * b)
                .collect();
            (weight, symbol)
        })
        .collect();
    let cells = CellWeights::<T>::new(&sgrid, &norm.w_x)?;
    let norms: Vec<T> = u
        .slices()
        .par_iter()
        .map(|s| {
            let mut frob = vec![T::zero(); sgrid.len()];
            for (weight, symbol) in &symbols {
                for (a, v) in frob.iter_mut().zip(plan.apply_sampled(symbol, s.values())) {
                    *a = *a + *weight * v * v;
                }
            }
            let frob: Vec<T> = frob.into_iter().map(|v| v.sqrt()).collect();
            cells.norm(&frob, norm.p)
        })
        .collect();
    let tgrid = u.tgrid();
    let w_t = norm.w_t.on_domain(crate::weights::Domain::temporal(tgrid.final_time().to_f64_lossy())?)?;
    time_lq(tgrid, &w_t, norm.q, &norms, tgrid.steps())
}

/// `||D^2 u|| / ||f||` for a computed solution `u` of forcing `f`.
pub fn regularity_ratio_of(
    u: &SpaceTimeField<f64>,
    f: &SpaceTimeField<f64>,
    norm: &MixedNormSpec,
    kind: BesselSymbol,
) -> Result<f64> {
    let denominator = mixed_norm_with(f, norm, kind)?;
    if !(denominator > 0.0) {
        return Err(Error::InvalidArgument("forcing has zero norm".into()));
    }
    Ok(second_derivative_norm(u, norm, kind)? / denominator)
}

/// Solves `spec` with the fast solver and returns
/// `||D^2 u|| / ||f||` in the mixed norm `norm`.
pub fn regularity_ratio(spec: &EquationSpec<f64>, norm: &MixedNormSpec) -> Result<f64> {
    if !(mixed_norm_with(spec.forcing(), norm, BesselSymbol::Standard)? > 0.0) {
        return Err(Error::InvalidArgument("forcing has zero norm".into()));
    }
    let sol = solve(spec, &SolveOptions::default())?;
    regularity_ratio_of(sol.u(), spec.forcing(), norm, BesselSymbol::Standard)
}

/// `a(t, x) = 1 + 0.4 sin(x) cos(t)` for the `variable` variant, `a = 1`
/// otherwise.
fn coefficients(variant: &str, tgrid: &TimeGrid<f64>, sgrid: crate::spaces::SpaceGrid) -> Result<Coefficients<f64>> {
    match variant {
        "constant" => Ok(Coefficients::laplacian(1)),
        "variable" => Ok(Coefficients::isotropic(
            1,
            Coefficient::from_fn(tgrid, sgrid, |t, x| 1.0 + 0.4 * x[0].sin() * t.cos()),
        )),
        other => Err(Error::InvalidArgument(format!("unknown coefficient family {other:?}"))),
    }
}

/// Problem data shared by several parameter tuples.
#[derive(Debug, Clone, PartialEq)]
struct SolveKey {
    alpha: f64,
    final_time: f64,
    variant: String,
}

impl SolveKey {
    fn of(params: &Params) -> Result<Self> {
        Ok(Self {
            alpha: params.need(params.alpha, "alpha")?,
            final_time: params.final_time.unwrap_or(1.0),
            variant: params.variant_or("constant").to_string(),
        })
    }
}

fn problems(key: &SolveKey, level: usize, seed: u64) -> Result<Vec<(String, EquationSpec<f64>)>> {
    let sg = box_grid(level)?;
    let tg = TimeGrid::<f64>::uniform(key.final_time, level)?;
    let alpha = FracOrder::for_equation(key.alpha)?;
    let coeffs = coefficients(&key.variant, &tg, sg)?;
    forcing_family(&tg, &sg, seed)
        .into_iter()
        .map(|m| Ok((m.name, EquationSpec::new(alpha, coeffs.clone(), m.value, ELLIPTICITY)?)))
        .collect()
}

/// Solves every forcing once per `(alpha, T, coefficients, level)` and
/// evaluates all norm tuples sharing that problem. Space and time are
/// refined together: `level` nodes and `level` uniform steps.
pub(crate) fn maximal_regularity(spec: &CheckSpec) -> Result<(Vec<Vec<LevelResult>>, Vec<Aggregate>)> {
    let keys: Vec<SolveKey> = spec.params.iter().map(SolveKey::of).collect::<Result<_>>()?;
    let mut unique: Vec<SolveKey> = Vec::new();
    for k in &keys {
        if !unique.contains(k) {
            unique.push(k.clone());
        }
    }
    let jobs: Vec<(usize, usize)> = (0..unique.len())
        .flat_map(|k| spec.levels.iter().map(move |&l| (k, l)))
        .collect();
    let evaluated: Vec<Vec<(usize, usize, Vec<Sample>)>> = jobs
        .par_iter()
        .map(|&(k, level)| {
            let key = &unique[k];
            let first = keys.iter().position(|x| x == key).expect("key present");
            let problems = problems(key, level, spec.seed).map_err(wrap(spec.check, &spec.params[first]))?;
            let solved: Vec<(String, SpaceTimeField<f64>, SpaceTimeField<f64>)> = problems
                .into_iter()
                .map(|(name, eq)| {
                    let u = solve(&eq, &SolveOptions::default())?.into_field();
                    Ok((name, u, eq.forcing().clone()))
                })
                .collect::<Result<_>>()
                .map_err(wrap(spec.check, &spec.params[first]))?;
            keys.iter()
                .enumerate()
                .filter(|(_, x)| *x == key)
                .map(|(i, _)| {
                    let params = &spec.params[i];
                    let samples = norm_samples(params, &solved, key.final_time, spec.bessel)
                        .map_err(wrap(spec.check, params))?;
                    Ok((i, level, samples))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut per_instance: Vec<Vec<LevelResult>> = vec![Vec::new(); spec.params.len()];
    for (i, level, samples) in evaluated.into_iter().flatten() {
        per_instance[i].push(worst(level, &samples));
    }
    for levels in &mut per_instance {
        levels.sort_by_key(|l| spec.levels.iter().position(|&x| x == l.level));
    }
    let instances: Vec<super::InstanceResult> = spec
        .params
        .iter()
        .zip(&per_instance)
        .map(|(p, l)| super::judge(p, l.clone(), &spec.policy))
        .collect();
    let mut aggregates = spread_aggregates(
        "t-independence",
        &instances,
        |p| {
            (p.variant_or("constant") == "constant").then(|| {
                let mut key = p.clone();
                key.final_time = None;
                key.label()
            })
        },
        |i| i.constant(),
        spec.policy.spread,
    );
    aggregates.extend(coefficient_robustness(&instances, spec.policy.coefficient_factor));
    Ok((per_instance, aggregates))
}

fn norm_samples(
    params: &Params,
    solved: &[(String, SpaceTimeField<f64>, SpaceTimeField<f64>)],
    final_time: f64,
    kind: BesselSymbol,
) -> Result<Vec<Sample>> {
    let sg = *solved[0].1.sgrid();
    let norm = MixedNormSpec::new(
        params.q.unwrap_or(2.0),
        params.p.unwrap_or(2.0),
        params.gamma.unwrap_or(0.0),
        time_weight(params.w_t.as_deref(), final_time)?,
        spatial_weight(params.w_x.as_deref(), &sg)?,
        final_time,
    )?;
    solved
        .iter()
        .map(|(name, u, f)| {
            Ok(Sample::new(
                name.clone(),
                second_derivative_norm(u, &norm, kind)?,
                mixed_norm_with(f, &norm, kind)?,
            ))
        })
        .collect()
}

/// Variable-coefficient constants against their constant-coefficient
/// counterparts with otherwise identical parameters.
fn coefficient_robustness(instances: &[super::InstanceResult], factor: f64) -> Vec<Aggregate> {
    instances
        .iter()
        .filter(|i| i.params.variant_or("constant") == "variable")
        .filter_map(|var| {
            let mut twin = var.params.clone();
            twin.variant = Some("constant".into());
            let plain = instances.iter().find(|i| {
                i.params == twin || (i.params.variant.is_none() && {
                    let mut t = twin.clone();
                    t.variant = None;
                    i.params == t
                })
            })?;
            let (a, b) = (var.constant(), plain.constant());
            let statistic = if a > 0.0 && b > 0.0 { (a / b).max(b / a) } else { f64::INFINITY };
            let mut group = var.params.clone();
            group.variant = None;
            Some(Aggregate {
                name: "coefficient-robustness".into(),
                group: group.label(),
                values: vec![a, b],
                statistic,
                limit: factor,
                pass: statistic <= factor,
            })
        })
        .collect()
}

/// Solve-then-rescale against rescale-then-solve; the sample is the max
/// difference over the max of the rescaled solution.
pub(crate) fn scaling_invariance(spec: &CheckSpec) -> Result<Vec<Vec<LevelResult>>> {
    spec.params
        .par_iter()
        .map(|params| {
            let run = || -> Result<Vec<LevelResult>> {
                let key = SolveKey::of(params)?;
                let r = params.need(params.ratio, "ratio")?;
                let alpha = FracOrder::for_equation(key.alpha)?;
                spec.levels
                    .iter()
                    .map(|&level| {
                        let samples = problems(&key, level, spec.seed)?
                            .into_iter()
                            .map(|(name, eq)| {
                                let opts = SolveOptions::default();
                                let u = solve(&eq, &opts)?.into_field();
                                let moved = parabolic_rescale(&u, r, alpha, 0.0)?;
                                let direct = solve(&eq.rescaled(r)?, &opts)?.into_field();
                                let diff = moved.sub(&direct)?.max_abs();
                                Ok(Sample::new(name, diff, direct.max_abs()))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(worst(level, &samples))
                    })
                    .collect()
            };
            run().map_err(wrap(spec.check, params))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceGrid;

    #[test]
    fn hessian_norm_of_a_mode() {
        // u = sin(x): u_xx = -sin(x), L2 norm over [-pi, pi) is sqrt(pi)
        let sg = SpaceGrid::new(1, std::f64::consts::PI, 32).unwrap();
        let tg = TimeGrid::<f64>::uniform(1.0, 2).unwrap();
        let u = SpaceTimeField::from_fn(tg, sg, |_, x| x[0].sin());
        let norm = MixedNormSpec::unweighted(2.0, 2.0, 0.0, 1, std::f64::consts::PI, 1.0).unwrap();
        let got = second_derivative_norm(&u, &norm, BesselSymbol::Standard).unwrap();
        assert!((got - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        // 2-D: u = sin(x) sin(y) has |D^2 u|^2 = 2 sin^2 sin^2 + 2 cos^2 cos^2
        let sg2 = SpaceGrid::new(2, std::f64::consts::PI, 16).unwrap();
        let tg2 = TimeGrid::<f64>::uniform(1.0, 2).unwrap();
        let v = SpaceTimeField::from_fn(tg2, sg2, |_, x| x[0].sin() * x[1].sin());
        let norm2 = MixedNormSpec::unweighted(2.0, 2.0, 0.0, 2, std::f64::consts::PI, 1.0).unwrap();
        let want = (2.0 * (std::f64::consts::PI.powi(2) / 4.0 * 4.0) * 2.0f64).sqrt();
        let got2 = second_derivative_norm(&v, &norm2, BesselSymbol::Standard).unwrap();
        assert!((got2 - want).abs() < 1e-10 * want, "{got2} vs {want}");
    }
}
