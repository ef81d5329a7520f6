//! Forcings for prescribed exact solutions, and the single-mode
//! Mittag-Leffler solution.

use crate::error::{Error, Result};
use crate::frac_calc::{caputo_derivative, mittag_leffler, FracOrder, TimeGrid, TimeSeries};
use crate::scalar::Real;
use crate::spaces::{Field, SpaceGrid, SpaceTimeField};
use crate::special::gamma;

use super::equation::Coefficients;
use super::operator::SpatialOperator;

/// An exact solution used to manufacture a forcing.
#[derive(Debug, Clone)]
pub enum ExactSolution<T> {
    /// `u(t, x) = sum_j t^(beta_j) phi_j(x)`; the Caputo derivative is taken
    /// in closed form.
    Separable {
        tgrid: TimeGrid<T>,
        terms: Vec<(f64, Field<T>)>,
    },
    /// Nodal samples; the Caputo derivative is taken numerically on the
    /// sampling grid, which should therefore be fine.
    Sampled(SpaceTimeField<T>),
}

impl<T: Real> ExactSolution<T> {
    /// `t^beta phi(x)`.
    pub fn power(tgrid: TimeGrid<T>, beta: f64, phi: Field<T>) -> Self {
        ExactSolution::Separable {
            tgrid,
            terms: vec![(beta, phi)],
        }
    }

    pub fn tgrid(&self) -> &TimeGrid<T> {
        match self {
            ExactSolution::Separable { tgrid, .. } => tgrid,
            ExactSolution::Sampled(u) => u.tgrid(),
        }
    }

    pub fn sgrid(&self) -> Result<SpaceGrid> {
        match self {
            ExactSolution::Separable { terms, .. } => terms
                .first()
                .map(|(_, phi)| *phi.grid())
                .ok_or_else(|| Error::InvalidArgument("no terms".into())),
            ExactSolution::Sampled(u) => Ok(*u.sgrid()),
        }
    }

    /// Values at every space-time node.
    pub fn sample(&self) -> Result<SpaceTimeField<T>> {
        match self {
            ExactSolution::Sampled(u) => Ok(u.clone()),
            ExactSolution::Separable { tgrid, terms } => {
                let sgrid = self.sgrid()?;
                let slices = tgrid
                    .nodes()
                    .iter()
                    .map(|&t| {
                        let mut acc = vec![T::zero(); sgrid.len()];
                        for (beta, phi) in terms {
                            let s = t.powf(T::lit(*beta));
                            for (a, &v) in acc.iter_mut().zip(phi.values()) {
                                *a = *a + s * v;
                            }
                        }
                        Field::new(sgrid, acc)
                    })
                    .collect::<Result<Vec<_>>>()?;
                SpaceTimeField::new(tgrid.clone(), slices)
            }
        }
    }
}

/// `f = d^alpha u - (a^ij D_ij + b^i D_i + c) u`.
///
/// Separable terms need `beta >= alpha` (finite forcing at `t = 0`) and
/// `beta > 1` when `alpha > 1` (zero initial slope). Sampled data must vanish
/// at `t = 0`.
pub fn manufactured_rhs<T: Real>(
    exact: &ExactSolution<T>,
    alpha: FracOrder,
    coefficients: &Coefficients<T>,
) -> Result<SpaceTimeField<T>> {
    let alpha = FracOrder::for_equation(alpha.value())?;
    let sgrid = exact.sgrid()?;
    let tgrid = exact.tgrid();
    let u = exact.sample()?;
    let mut d_alpha: Vec<Vec<T>> = vec![vec![T::zero(); sgrid.len()]; tgrid.len()];
    match exact {
        ExactSolution::Separable { terms, .. } => {
            let a = alpha.value();
            for (beta, phi) in terms {
                let beta = *beta;
                if !(beta > 0.0) {
                    return Err(Error::NonzeroInitialData(format!("t^{beta} does not vanish at t = 0")));
                }
                if a > 1.0 && beta <= 1.0 {
                    return Err(Error::NonzeroInitialData(format!("t^{beta} has a nonzero initial slope")));
                }
                if beta < a {
                    return Err(Error::InvalidArgument(format!(
                        "t^{beta} with alpha = {a} gives a forcing singular at t = 0"
                    )));
                }
                let ratio = gamma(beta + 1.0) / gamma(beta + 1.0 - a);
                for (slice, &t) in d_alpha.iter_mut().zip(tgrid.nodes()) {
                    let s = T::lit(ratio) * t.powf(T::lit(beta - a));
                    for (d, &v) in slice.iter_mut().zip(phi.values()) {
                        *d = *d + s * v;
                    }
                }
            }
        }
        ExactSolution::Sampled(field) => {
            let scale = field.max_abs();
            let head = field.slice(0).max_abs();
            if head > T::lit(1e-12) * scale {
                return Err(Error::NonzeroInitialData(format!("|u(0)| = {head}")));
            }
            for i in 0..sgrid.len() {
                let series = TimeSeries::new(tgrid.clone(), field.at_node(i))?;
                let d = caputo_derivative(&series, alpha)?;
                for (slice, &v) in d_alpha.iter_mut().zip(d.values()) {
                    slice[i] = v;
                }
            }
        }
    }
    let op = SpatialOperator::new(coefficients, &sgrid);
    let slices = d_alpha
        .into_iter()
        .zip(u.slices())
        .enumerate()
        .map(|(n, (d, s))| {
            let lu = op.apply(n, s.values());
            Field::new(sgrid, d.into_iter().zip(lu).map(|(a, b)| a - b).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(tgrid.clone(), slices)
}

/// `v(t) = t^alpha E_{alpha, alpha+1}(lambda t^alpha)`, the solution of
/// `d^alpha v = lambda v + 1` with zero initial data.
pub fn single_mode_solution(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let ta = t.powf(alpha);
    Ok(ta * mittag_leffler(alpha, alpha + 1.0, lambda * ta)?)
}
