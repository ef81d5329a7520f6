//! Time marching of the Volterra form `u(t_n) = [I^alpha (L u + f)](t_n)`.
//!
//! The fractional integral uses the product-integration weights `W[n][k]`;
//! the newest slice is implicit:
//!
//! ```text
//! (I - W[n][n] L(t_n)) u_n = W[n][n] f_n + sum_{k<n} W[n][k] (L u_k + f_k)
//! ```
//!
//! Constant coefficients are inverted mode by mode. Variable coefficients
//! use a fixed-point iteration preconditioned by a frozen constant-coefficient
//! operator.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac_calc::{caputo_derivative, FracOrder, ProductWeights, TimeSeries};
use crate::scalar::{max_abs, Real};
use crate::spaces::{Field, SpaceTimeField};

use super::equation::EquationSpec;
use super::operator::SpatialOperator;

const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative residual per slice for the iterative scheme.
    pub tol: f64,
    pub max_iterations: usize,
    /// Recompute the residual a posteriori after marching.
    pub certify: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 500,
            certify: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SpectralDirect,
    PreconditionedFixedPoint,
    DenseOracle,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::SpectralDirect => "spectral-direct",
            Scheme::PreconditionedFixedPoint => "preconditioned-fixed-point",
            Scheme::DenseOracle => "dense-oracle",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Solution<T: Real> {
    alpha: FracOrder,
    u: SpaceTimeField<T>,
    scheme: Scheme,
    residual: f64,
    iterations: Vec<usize>,
}

impl<T: Real> Solution<T> {
    pub(crate) fn new(
        alpha: FracOrder,
        u: SpaceTimeField<T>,
        scheme: Scheme,
        residual: f64,
        iterations: Vec<usize>,
    ) -> Self {
        Self {
            alpha,
            u,
            scheme,
            residual,
            iterations,
        }
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn u(&self) -> &SpaceTimeField<T> {
        &self.u
    }

    pub fn into_field(self) -> SpaceTimeField<T> {
        self.u
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// `max |u - I^alpha (L u + f)| / max |u|` over all nodes.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Iterations used per slice (1 for the direct scheme, 0 at `t = 0`).
    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }
}

/// Solves the problem with zero initial data.
pub fn solve<T: Real>(spec: &EquationSpec<T>, options: &SolveOptions) -> Result<Solution<T>> {
    if !(options.tol > 0.0) || options.max_iterations == 0 {
        return Err(Error::InvalidArgument("tolerance and iteration cap must be positive".into()));
    }
    let tgrid = spec.tgrid();
    let sgrid = *spec.sgrid();
    let m = sgrid.len();
    let weights = ProductWeights::new(tgrid, spec.alpha().value());
    let op = SpatialOperator::new(spec.coefficients(), &sgrid);
    let constant = op.constant();
    let scheme = if constant.is_some() {
        Scheme::SpectralDirect
    } else {
        Scheme::PreconditionedFixedPoint
    };
    let const_symbol = constant.as_ref().map(|c| op.symbol(c));
    let f = spec.forcing();

    let mut u: Vec<Vec<T>> = vec![vec![T::zero(); m]];
    let mut g: Vec<Vec<T>> = vec![f.slice(0).values().to_vec()];
    let mut iterations = vec![0];
    let mut slice_residual = 0.0f64;
    let tol = T::lit(options.tol);

    for n in 1..tgrid.len() {
        let row = weights.row(n);
        let wnn = row[n];
        let factor = wnn * op.max_potential(n);
        if factor >= T::one() {
            return Err(Error::StepContraction {
                slice: n,
                factor: factor.to_f64_lossy(),
            });
        }
        let fnv = f.slice(n).values();
        let mut rhs = history(&row[..n], &g, m);
        for (r, &v) in rhs.iter_mut().zip(fnv) {
            *r = *r + wnn * v;
        }

        let (un, lu, its) = match &const_symbol {
            Some(symbol) => {
                let plan = op.plan();
                let mut spec_hat = plan.forward(&rhs);
                for (s, &l) in spec_hat.iter_mut().zip(symbol) {
                    *s = *s / (Complex::new(T::one(), T::zero()) - l * wnn);
                }
                let lu_hat = spec_hat.iter().zip(symbol).map(|(&s, &l)| s * l).collect();
                (plan.inverse_real(spec_hat), plan.inverse_real(lu_hat), 1)
            }
            None => {
                let frozen = op.frozen(n);
                let one = Complex::new(T::one(), T::zero());
                let precond: Vec<Complex<T>> = op.symbol(&frozen).iter().map(|&l| one / (one - l * wnn)).collect();
                let plan = op.plan();
                let mut un = plan.apply_sampled(&precond, &rhs);
                let mut its = 0;
                loop {
                    let lu = op.apply(n, &un);
                    let r: Vec<T> = rhs.iter().zip(&un).zip(&lu).map(|((&b, &x), &l)| b - x + wnn * l).collect();
                    let rn = max_abs(&r);
                    let scale = max_abs(&un);
                    its += 1;
                    if rn <= tol * scale || rn.is_zero() {
                        slice_residual = slice_residual.max(if scale.is_zero() { 0.0 } else { (rn / scale).to_f64_lossy() });
                        break (un, lu, its);
                    }
                    if its >= options.max_iterations || !rn.is_finite() {
                        return Err(Error::NonConvergence {
                            slice: n,
                            iterations: its,
                            increment: (rn / scale).to_f64_lossy(),
                        });
                    }
                    let corr = plan.apply_sampled(&precond, &r);
                    for (x, c) in un.iter_mut().zip(corr) {
                        *x = *x + c;
                    }
                }
            }
        };
        g.push(lu.iter().zip(fnv).map(|(&l, &v)| l + v).collect());
        u.push(un);
        iterations.push(its);
        log::trace!("slice {n}: {its} iterations");
    }

    let slices = u.into_iter().map(|v| Field::new(sgrid, v)).collect::<Result<Vec<_>>>()?;
    let field = SpaceTimeField::new(tgrid.clone(), slices)?;
    let residual = if options.certify {
        volterra_residual(spec, &field)?
    } else {
        slice_residual
    };
    Ok(Solution::new(spec.alpha(), field, scheme, residual, iterations))
}

/// `sum_k w[k] g[k]`, parallel over blocks of nodes.
fn history<T: Real>(w: &[T], g: &[Vec<T>], m: usize) -> Vec<T> {
    let mut h = vec![T::zero(); m];
    h.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let off = ci * CHUNK;
        let end = off + chunk.len();
        for (&wk, gk) in w.iter().zip(g) {
            for (a, &b) in chunk.iter_mut().zip(&gk[off..end]) {
                *a = *a + wk * b;
            }
        }
    });
    h
}

/// `L u + f` at every slice.
pub(crate) fn operator_plus_forcing<T: Real>(spec: &EquationSpec<T>, u: &SpaceTimeField<T>) -> Vec<Vec<T>> {
    let op = SpatialOperator::new(spec.coefficients(), spec.sgrid());
    u.slices()
        .par_iter()
        .enumerate()
        .map(|(n, s)| {
            op.apply(n, s.values())
                .into_iter()
                .zip(spec.forcing().slice(n).values())
                .map(|(l, &f)| l + f)
                .collect()
        })
        .collect()
}

fn check_grids<T: Real>(spec: &EquationSpec<T>, u: &SpaceTimeField<T>) -> Result<()> {
    if u.tgrid() != spec.tgrid() || u.sgrid() != spec.sgrid() {
        return Err(Error::GridMismatch("solution and problem grids differ".into()));
    }
    Ok(())
}

/// `max |u - I^alpha (L u + f)| / max |u|`, evaluated node by node along
/// time series (absolute when `u` vanishes).
pub fn volterra_residual<T: Real>(spec: &EquationSpec<T>, u: &SpaceTimeField<T>) -> Result<f64> {
    check_grids(spec, u)?;
    let g = operator_plus_forcing(spec, u);
    let weights = ProductWeights::new(spec.tgrid(), spec.alpha().value());
    let m = spec.sgrid().len();
    let worst = (0..m)
        .into_par_iter()
        .map(|i| {
            let series: Vec<T> = g.iter().map(|s| s[i]).collect();
            let integral = weights.apply(&series);
            integral
                .iter()
                .zip(u.slices())
                .fold(0.0f64, |acc, (&v, s)| acc.max((s.values()[i] - v).abs().to_f64_lossy()))
        })
        .reduce(|| 0.0, f64::max);
    let scale = u.max_abs().to_f64_lossy();
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// `max |d^alpha u - (L u + f)| / max |f|` with the Caputo derivative taken
/// by finite differences. Measures discretization error, not solver error.
pub fn caputo_residual<T: Real>(spec: &EquationSpec<T>, u: &SpaceTimeField<T>) -> Result<f64> {
    check_grids(spec, u)?;
    let g = operator_plus_forcing(spec, u);
    let m = spec.sgrid().len();
    let mut worst = 0.0f64;
    for i in 0..m {
        let series = TimeSeries::new(spec.tgrid().clone(), u.at_node(i))?;
        let d = caputo_derivative(&series, spec.alpha())?;
        for (&a, s) in d.values().iter().zip(&g).skip(1) {
            worst = worst.max((a - s[i]).abs().to_f64_lossy());
        }
    }
    let scale = spec.forcing().max_abs().to_f64_lossy();
    Ok(if scale > 0.0 { worst / scale } else { worst })
}
