//! Parabolic rescaling `u_r(t, x) = u(r^(2/alpha) t, r x)`.
//!
//! With `r = 2^-m` the rescaled field lives on the box of half-width `L / r`
//! and the time interval `[0, T r^(-2/alpha)]`, with the same number of nodes;
//! node values are carried over unchanged apart from the factor `r^power`.

use crate::error::{Error, Result};
use crate::frac_calc::{FracOrder, TimeGrid};
use crate::scalar::Real;
use crate::spaces::{Field, SpaceTimeField};

use super::equation::EquationSpec;

/// `m` with `r = 2^-m`, `m >= 0`.
pub fn dyadic_level(r: f64) -> Result<u32> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::NonDyadicRatio(r));
    }
    let m = -r.log2();
    let k = m.round();
    if k > 60.0 || (-k).exp2() != r {
        return Err(Error::NonDyadicRatio(r));
    }
    Ok(k as u32)
}

fn stretched_time<T: Real>(tgrid: &TimeGrid<T>, r: f64, alpha: FracOrder) -> Result<TimeGrid<T>> {
    let s = T::lit(r.powf(-2.0 / alpha.value()));
    tgrid.with_final_time(tgrid.final_time() * s)
}

/// `r^power F(r^(2/alpha) t, r x)`; use `power = 0` for solutions and
/// `power = 2` for forcings.
pub fn parabolic_rescale<T: Real>(
    field: &SpaceTimeField<T>,
    r: f64,
    alpha: FracOrder,
    power: f64,
) -> Result<SpaceTimeField<T>> {
    dyadic_level(r)?;
    if r == 1.0 {
        return Ok(field.clone());
    }
    let tgrid = stretched_time(field.tgrid(), r, alpha)?;
    let sgrid = field.sgrid().scaled(1.0 / r)?;
    let factor = T::lit(r.powf(power));
    let slices = field
        .slices()
        .iter()
        .map(|s| Field::new(sgrid, s.values().iter().map(|&v| v * factor).collect()))
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(tgrid, slices)
}

impl<T: Real> EquationSpec<T> {
    /// The problem solved by `u_r`: forcing `r^2 f(r^(2/alpha) t, r x)`,
    /// `a` unchanged, `b` scaled by `r`, `c` by `r^2`.
    pub fn rescaled(&self, r: f64) -> Result<Self> {
        dyadic_level(r)?;
        if r == 1.0 {
            return Ok(self.clone());
        }
        let forcing = parabolic_rescale(self.forcing(), r, self.alpha(), 2.0)?;
        let coefficients = self.coefficients().relabeled(forcing.tgrid(), *forcing.sgrid(), T::lit(r))?;
        EquationSpec::new(self.alpha(), coefficients, forcing, self.delta())
    }
}
