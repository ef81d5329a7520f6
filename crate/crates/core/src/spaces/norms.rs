//! Weighted Lebesgue, Bessel-potential and mixed space-time norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac_calc::TimeGrid;
use crate::scalar::Real;
use crate::weights::{ap_constant, check_exponent, BallFamily, Domain, Weight};

use super::grid::{Field, SpaceGrid, SpaceTimeField};
use super::spectral::{bessel_symbol, BesselSymbol, SpectralPlan};

/// `int_{cell_i} w` for every node of a periodic grid. The cell of node `i`
/// is `x_i + [-h/2, h/2]^d`, wrapped periodically at the box boundary.
#[derive(Debug, Clone)]
pub struct CellWeights<T> {
    grid: SpaceGrid,
    weights: Vec<T>,
}

impl<T: Real> CellWeights<T> {
    pub fn new(grid: &SpaceGrid, w: &Weight) -> Result<Self> {
        let w = w.on_domain(grid.domain())?;
        let n = grid.n();
        let h = grid.spacing();
        let big_l = grid.half_width();
        let pieces: Vec<Vec<(f64, f64)>> = grid
            .axis()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                if i == 0 {
                    vec![(-big_l, -big_l + 0.5 * h), (big_l - 0.5 * h, big_l)]
                } else {
                    vec![(x - 0.5 * h, x + 0.5 * h)]
                }
            })
            .collect();
        let weights: Vec<T> = if w.is_constant() {
            let v = w.average(&vec![0.0; grid.dim()], &vec![1.0; grid.dim()]);
            vec![T::lit(v * grid.cell_volume()); grid.len()]
        } else if grid.dim() == 1 {
            pieces
                .iter()
                .map(|ps| T::lit(ps.iter().map(|&(a, b)| w.integral(&[a], &[b])).sum()))
                .collect()
        } else {
            (0..n * n)
                .into_par_iter()
                .map(|flat| {
                    let (i, j) = (flat / n, flat % n);
                    let mut total = 0.0;
                    for &(xa, xb) in &pieces[i] {
                        for &(ya, yb) in &pieces[j] {
                            total += w.integral(&[xa, ya], &[xb, yb]);
                        }
                    }
                    T::lit(total)
                })
                .collect()
        };
        Ok(Self { grid: *grid, weights })
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `(sum_i |v_i|^p W_i)^(1/p)`.
    pub fn norm(&self, values: &[T], p: f64) -> T {
        let big = crate::scalar::max_abs(values);
        if big == T::zero() {
            return T::zero();
        }
        let pt = T::lit(p);
        let sum = values
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&v, &w)| {
                if v == T::zero() {
                    acc
                } else {
                    acc + (v.abs() / big).powf(pt) * w
                }
            });
        big * sum.powf(T::one() / pt)
    }
}

/// `||u||_{L_p(w)}` with exact cell integrals of the weight.
pub fn weighted_lp_norm<T: Real>(u: &Field<T>, p: f64, w: &Weight) -> Result<T> {
    check_exponent(p)?;
    Ok(CellWeights::new(u.grid(), w)?.norm(u.values(), p))
}

/// `||(1 - Delta)^(gamma/2) u||_{L_p(w)}`.
pub fn sobolev_norm<T: Real>(u: &Field<T>, gamma: f64, p: f64, w: &Weight) -> Result<T> {
    sobolev_norm_with(u, gamma, p, w, BesselSymbol::Standard)
}

pub fn sobolev_norm_with<T: Real>(
    u: &Field<T>,
    gamma: f64,
    p: f64,
    w: &Weight,
    kind: BesselSymbol,
) -> Result<T> {
    check_exponent(p)?;
    let cells = CellWeights::new(u.grid(), w)?;
    Ok(SobolevNorm::new(u.grid(), gamma, p, &cells, kind).eval(u))
}

/// A fixed `H^gamma_p(w)` norm on one grid, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct SobolevNorm<'a, T: Real> {
    plan: SpectralPlan<T>,
    symbol: Option<Vec<T>>,
    p: f64,
    cells: &'a CellWeights<T>,
}

impl<'a, T: Real> SobolevNorm<'a, T> {
    pub fn new(grid: &SpaceGrid, gamma: f64, p: f64, cells: &'a CellWeights<T>, kind: BesselSymbol) -> Self {
        let plan = SpectralPlan::new(grid);
        let symbol = (gamma != 0.0).then(|| bessel_symbol(&plan, gamma, kind));
        Self {
            plan,
            symbol,
            p,
            cells,
        }
    }

    pub fn eval(&self, u: &Field<T>) -> T {
        match &self.symbol {
            None => self.cells.norm(u.values(), self.p),
            Some(s) => self.cells.norm(&self.plan.apply_real_sampled(s, u.values()), self.p),
        }
    }
}

/// The tuple `(q, p, gamma, w_t, w_x, T)` of a mixed norm
/// `(int_0^T ||f(t)||^q_{H^gamma_p(w_x)} w_t(t) dt)^(1/q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub q: f64,
    pub p: f64,
    pub gamma: f64,
    pub w_t: Weight,
    pub w_x: Weight,
    pub final_time: f64,
    /// Estimated `[w_x]_p` and `[w_t]_q`, kept for reports.
    pub ap_x: f64,
    pub ap_t: f64,
}

impl MixedNormSpec {
    /// Validates exponents and runs the `A_p` proxy on both weights.
    pub fn new(q: f64, p: f64, gamma: f64, w_t: Weight, w_x: Weight, final_time: f64) -> Result<Self> {
        check_exponent(q)?;
        check_exponent(p)?;
        if !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("smoothness {gamma} is not finite")));
        }
        let w_t = w_t.on_domain(Domain::temporal(final_time)?)?;
        if !matches!(w_x.domain(), Domain::Box { .. }) {
            return Err(Error::InvalidArgument("spatial weight must live on a box".into()));
        }
        let ap = |w: &Weight, e: f64| -> Result<f64> {
            let levels = if w.dim() == 1 { 8 } else { 4 };
            let est = ap_constant(w, e, &BallFamily::for_weight(w, levels)?)?;
            if est.diverging {
                return Err(Error::InvalidArgument(format!(
                    "weight {} fails the A_{e} boundedness proxy",
                    w.label()
                )));
            }
            Ok(est.value)
        };
        let ap_x = ap(&w_x, p)?;
        let ap_t = ap(&w_t, q)?;
        Ok(Self {
            q,
            p,
            gamma,
            w_t,
            w_x,
            final_time,
            ap_x,
            ap_t,
        })
    }

    /// Unit weights.
    pub fn unweighted(q: f64, p: f64, gamma: f64, dim: usize, half_width: f64, final_time: f64) -> Result<Self> {
        Self::new(
            q,
            p,
            gamma,
            Weight::constant(Domain::temporal(final_time)?),
            Weight::constant(Domain::spatial(dim, half_width)?),
            final_time,
        )
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }

    /// Same weights over a different horizon (the proxy values carry over:
    /// the characteristics are dilation invariant).
    pub fn with_final_time(&self, final_time: f64) -> Result<Self> {
        Ok(Self {
            w_t: self.w_t.on_domain(Domain::temporal(final_time)?)?,
            final_time,
            ..self.clone()
        })
    }
}

/// Hat-function quadrature weights `int phi_n w_t dt` on a time grid.
pub fn time_weights<T: Real>(tgrid: &TimeGrid<T>, w_t: &Weight) -> Vec<T> {
    let nodes = tgrid.nodes();
    let mut out = vec![0.0; nodes.len()];
    for k in 0..nodes.len() - 1 {
        let (left, right) = w_t.hat_moments(nodes[k].to_f64_lossy(), nodes[k + 1].to_f64_lossy());
        out[k] += left;
        out[k + 1] += right;
    }
    out.into_iter().map(T::lit).collect()
}

/// Per-slice `H^gamma_p(w_x)` norms, computed in parallel and returned in
/// slice order.
pub fn slice_norms<T: Real>(
    f: &SpaceTimeField<T>,
    gamma: f64,
    p: f64,
    w_x: &Weight,
    kind: BesselSymbol,
) -> Result<Vec<T>> {
    check_exponent(p)?;
    let cells = CellWeights::new(f.sgrid(), w_x)?;
    let norm = SobolevNorm::new(f.sgrid(), gamma, p, &cells, kind);
    Ok(f.slices().par_iter().map(|s| norm.eval(s)).collect())
}

/// `(sum_n omega_n s_n^q)^(1/q)` with hat weights `omega_n` on the first
/// `steps + 1` nodes.
pub fn time_lq<T: Real>(tgrid: &TimeGrid<T>, w_t: &Weight, q: f64, norms: &[T], steps: usize) -> Result<T> {
    let grid = if steps == tgrid.steps() {
        tgrid.clone()
    } else {
        tgrid.truncated(steps)?
    };
    let omega = time_weights(&grid, w_t);
    let big = crate::scalar::max_abs(&norms[..=steps]);
    if big == T::zero() {
        return Ok(T::zero());
    }
    if omega.iter().any(|w| w.is_infinite()) {
        return Ok(T::infinity());
    }
    let qt = T::lit(q);
    let sum = norms[..=steps]
        .iter()
        .zip(&omega)
        .fold(T::zero(), |acc, (&s, &w)| acc + (s / big).powf(qt) * w);
    Ok(big * sum.powf(T::one() / qt))
}

/// `||F||` in the mixed norm described by `spec`.
pub fn mixed_norm<T: Real>(f: &SpaceTimeField<T>, spec: &MixedNormSpec) -> Result<T> {
    mixed_norm_with(f, spec, BesselSymbol::Standard)
}

pub fn mixed_norm_with<T: Real>(f: &SpaceTimeField<T>, spec: &MixedNormSpec, kind: BesselSymbol) -> Result<T> {
    let steps = f.tgrid().steps();
    mixed_norm_until(f, spec, steps, kind)
}

/// Mixed norm over `(0, t_steps)`.
pub fn mixed_norm_until<T: Real>(
    f: &SpaceTimeField<T>,
    spec: &MixedNormSpec,
    steps: usize,
    kind: BesselSymbol,
) -> Result<T> {
    check_grids(f, spec)?;
    let norms = slice_norms(f, spec.gamma, spec.p, &spec.w_x, kind)?;
    time_lq(f.tgrid(), &spec.w_t, spec.q, &norms, steps)
}

fn check_grids<T: Real>(f: &SpaceTimeField<T>, spec: &MixedNormSpec) -> Result<()> {
    let horizon = f.tgrid().final_time().to_f64_lossy();
    if horizon > spec.final_time * (1.0 + 1e-12) {
        return Err(Error::GridMismatch(format!(
            "field extends to t = {horizon} beyond the norm horizon {}",
            spec.final_time
        )));
    }
    if f.sgrid().dim() != spec.w_x.dim() {
        return Err(Error::GridMismatch(format!(
            "{}-dimensional field with a {}-dimensional weight",
            f.sgrid().dim(),
            spec.w_x.dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn lebesgue_norm_examples() {
        let g = SpaceGrid::new(1, PI, 64).unwrap();
        let one = Field::from_fn(g, |_| 1.0);
        let unit = Weight::constant(g.domain());
        assert_relative_eq!(weighted_lp_norm(&one, 2.0, &unit).unwrap(), (2.0 * PI).sqrt(), max_relative = 1e-14);
        assert_eq!(weighted_lp_norm(&Field::<f64>::zeros(g), 2.0, &unit).unwrap(), 0.0);
        let g1 = SpaceGrid::new(1, 1.0, 64).unwrap();
        let w = Weight::power_at_origin(g1.domain(), 0.5).unwrap();
        let one = Field::from_fn(g1, |_| 1.0);
        assert_relative_eq!(weighted_lp_norm(&one, 2.0, &w).unwrap(), (4.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        assert!(weighted_lp_norm(&one, 1.0, &w).is_err());
    }

    #[test]
    fn two_dimensional_cells_sum_to_the_box_integral() {
        let g = SpaceGrid::new(2, 1.0, 16).unwrap();
        let w = Weight::power_at_origin(g.domain(), -0.5).unwrap();
        let cells = CellWeights::<f64>::new(&g, &w).unwrap();
        let total: f64 = cells.weights().iter().sum();
        assert_relative_eq!(total, w.integral(&[-1.0, -1.0], &[1.0, 1.0]), max_relative = 1e-12);
    }

    #[test]
    fn sobolev_norm_of_eigenfunction() {
        let g = SpaceGrid::new(1, PI, 64).unwrap();
        let u = Field::from_fn(g, |x: &[f64]| (4.0 * x[0]).sin());
        let w = Weight::constant(g.domain());
        let base = weighted_lp_norm(&u, 3.0, &w).unwrap();
        let s = sobolev_norm(&u, 1.5, 3.0, &w).unwrap();
        assert_relative_eq!(s, 17f64.powf(0.75) * base, max_relative = 1e-13);
    }

    #[test]
    fn mixed_norm_examples() {
        let g = SpaceGrid::new(1, PI, 32).unwrap();
        let tg = TimeGrid::<f64>::uniform(1.0, 512).unwrap();
        let spec = MixedNormSpec::unweighted(2.0, 2.0, 0.0, 1, PI, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(tg.clone(), g, |t: f64, x: &[f64]| t * x[0].sin());
        let v = mixed_norm(&f, &spec).unwrap();
        assert_relative_eq!(v, (PI / 3.0).sqrt(), max_relative = 1e-5);
        let ones = SpaceTimeField::from_fn(tg.clone(), g, |_, _| 1.0);
        let spec3 = MixedNormSpec::unweighted(3.0, 1.5, 0.0, 1, PI, 1.0).unwrap();
        assert_relative_eq!(mixed_norm(&ones, &spec3).unwrap(), (2.0 * PI).powf(1.0 / 1.5), max_relative = 1e-13);
        assert_eq!(mixed_norm(&SpaceTimeField::zeros(tg, g), &spec).unwrap(), 0.0);
    }

    #[test]
    fn mixed_norm_rejects_long_fields() {
        let g = SpaceGrid::new(1, PI, 16).unwrap();
        let tg = TimeGrid::uniform(2.0, 8).unwrap();
        let spec = MixedNormSpec::unweighted(2.0, 2.0, 0.0, 1, PI, 1.0).unwrap();
        assert!(mixed_norm(&SpaceTimeField::zeros(tg, g), &spec).is_err());
    }

    #[test]
    fn spec_rejects_weights_outside_ap() {
        let d = Domain::spatial(1, PI).unwrap();
        let bad = Weight::power_at_origin(d, 2.0).unwrap();
        let t = Weight::constant(Domain::temporal(1.0).unwrap());
        assert!(MixedNormSpec::new(2.0, 2.0, 0.0, t.clone(), bad, 1.0).is_err());
        let good = Weight::power_at_origin(d, 0.5).unwrap();
        let spec = MixedNormSpec::new(2.0, 2.0, 0.0, t, good, 1.0).unwrap();
        assert!(spec.ap_x > 1.0);
        assert_eq!(spec.ap_t, 1.0);
    }
}
