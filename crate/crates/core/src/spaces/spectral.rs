//! Discrete Fourier multipliers on periodic grids.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::grid::{Field, SpaceGrid};

/// Forward and inverse transforms for one grid, reusable across calls.
#[derive(Clone)]
pub struct SpectralPlan<T: Real> {
    grid: SpaceGrid,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    freqs: Vec<T>,
}

impl<T: Real> std::fmt::Debug for SpectralPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("grid", &self.grid).finish()
    }
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(grid: &SpaceGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid: *grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
            freqs: grid.frequencies().into_iter().map(T::lit).collect(),
        }
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// Angular frequencies along one axis in FFT order.
    pub fn frequencies(&self) -> &[T] {
        &self.freqs
    }

    /// Unnormalized DFT of real data (row-major, last axis fastest).
    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut data: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Inverse DFT, normalized, real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex<T>>) -> Vec<T> {
        self.transform(&mut spectrum, &self.inverse);
        let scale = T::one() / T::from_usize_lossy(self.grid.len());
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let n = self.grid.n();
        fft.process(data);
        if self.grid.dim() == 2 {
            // columns: transpose, transform rows, transpose back
            let mut t = transpose(data, n);
            fft.process(&mut t);
            data.copy_from_slice(&transpose(&t, n));
        }
    }

    /// Calls `f(flat_index, xi)` for every bin.
    pub fn for_each_frequency(&self, mut f: impl FnMut(usize, &[T])) {
        let n = self.grid.n();
        if self.grid.dim() == 1 {
            for (k, &xi) in self.freqs.iter().enumerate() {
                f(k, &[xi]);
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    f(i * n + j, &[self.freqs[i], self.freqs[j]]);
                }
            }
        }
    }

    /// Samples a symbol on the grid frequencies, checking finiteness.
    pub fn sample_symbol(
        &self,
        m: impl Fn(&[T]) -> Complex<T>,
        at_origin: Option<Complex<T>>,
    ) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.grid.len()];
        let mut bad = None;
        self.for_each_frequency(|k, xi| {
            let v = match at_origin {
                Some(v) if k == 0 => v,
                _ => m(xi),
            };
            if !(v.re.is_finite() && v.im.is_finite()) && bad.is_none() {
                bad = Some(xi.iter().map(|x| x.to_f64_lossy()).collect());
            }
            out[k] = v;
        });
        match bad {
            Some(frequency) => Err(Error::NonFiniteMultiplier { frequency }),
            None => Ok(out),
        }
    }

    /// Multiplies by a sampled symbol.
    pub fn apply_sampled(&self, symbol: &[Complex<T>], values: &[T]) -> Vec<T> {
        let mut spec = self.forward(values);
        for (s, m) in spec.iter_mut().zip(symbol) {
            *s = *s * m;
        }
        self.inverse_real(spec)
    }

    /// Multiplies by a real sampled symbol.
    pub fn apply_real_sampled(&self, symbol: &[T], values: &[T]) -> Vec<T> {
        let mut spec = self.forward(values);
        for (s, &m) in spec.iter_mut().zip(symbol) {
            *s = *s * m;
        }
        self.inverse_real(spec)
    }

    /// Symbol of `D^beta`, `prod_k (i xi_k)^beta_k`, with the Nyquist
    /// frequency zeroed along axes differentiated an odd number of times.
    pub fn derivative_symbol(&self, beta: &[usize]) -> Vec<Complex<T>> {
        let nyq = self.freqs[self.grid.nyquist_index()];
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.grid.len()];
        self.for_each_frequency(|k, xi| {
            let mut v = Complex::new(T::one(), T::zero());
            for (axis, &order) in beta.iter().enumerate() {
                if order == 0 {
                    continue;
                }
                let x = xi[axis];
                if order % 2 == 1 && x == nyq {
                    v = Complex::new(T::zero(), T::zero());
                    break;
                }
                v = v * Complex::new(T::zero(), x).powu(order as u32);
            }
            out[k] = v;
        });
        out
    }
}

fn transpose<T: Copy>(data: &[T], n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(data.len());
    for j in 0..n {
        for i in 0..n {
            out.push(data[i * n + j]);
        }
    }
    out
}

/// Applies the Fourier multiplier `m` to `u`.
pub fn apply_multiplier<T: Real>(m: impl Fn(&[T]) -> Complex<T>, u: &Field<T>) -> Result<Field<T>> {
    apply_multiplier_with_origin(m, None, u)
}

/// As [`apply_multiplier`], with the value at `xi = 0` supplied explicitly
/// (for symbols singular at the origin).
pub fn apply_multiplier_with_origin<T: Real>(
    m: impl Fn(&[T]) -> Complex<T>,
    at_origin: Option<Complex<T>>,
    u: &Field<T>,
) -> Result<Field<T>> {
    let plan = SpectralPlan::new(u.grid());
    let symbol = plan.sample_symbol(m, at_origin)?;
    Ok(Field::from_values_unchecked(
        *u.grid(),
        plan.apply_sampled(&symbol, u.values()),
    ))
}

/// Convention for the Bessel symbol. `SignFlipped` applies
/// `(1 + |xi|^2)^(-gamma/2)` and exists only to check that the verification
/// harness notices a wrong multiplier.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselSymbol {
    #[default]
    Standard,
    SignFlipped,
}

impl BesselSymbol {
    pub fn exponent(self, gamma: f64) -> f64 {
        match self {
            BesselSymbol::Standard => gamma,
            BesselSymbol::SignFlipped => -gamma,
        }
    }
}

/// Real symbol `(1 + |xi|^2)^(gamma/2)` sampled on the grid.
pub fn bessel_symbol<T: Real>(plan: &SpectralPlan<T>, gamma: f64, kind: BesselSymbol) -> Vec<T> {
    let g = T::lit(kind.exponent(gamma)) * T::half();
    let mut out = vec![T::zero(); plan.grid().len()];
    plan.for_each_frequency(|k, xi| {
        let r2 = xi.iter().fold(T::zero(), |a, &x| a + x * x);
        out[k] = (T::one() + r2).powf(g);
    });
    out
}

/// `(1 - Delta)^(gamma/2) u`.
pub fn bessel_potential<T: Real>(u: &Field<T>, gamma: f64) -> Field<T> {
    bessel_potential_with(u, gamma, BesselSymbol::Standard)
}

pub fn bessel_potential_with<T: Real>(u: &Field<T>, gamma: f64, kind: BesselSymbol) -> Field<T> {
    if gamma == 0.0 {
        return u.clone();
    }
    let plan = SpectralPlan::new(u.grid());
    let symbol = bessel_symbol(&plan, gamma, kind);
    Field::from_values_unchecked(*u.grid(), plan.apply_real_sampled(&symbol, u.values()))
}

/// Spectral partial derivative `D^beta u`.
pub fn spectral_derivative<T: Real>(u: &Field<T>, beta: &[usize]) -> Field<T> {
    let plan = SpectralPlan::new(u.grid());
    let symbol = plan.derivative_symbol(beta);
    Field::from_values_unchecked(*u.grid(), plan.apply_sampled(&symbol, u.values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> SpaceGrid {
        SpaceGrid::new(1, PI, n).unwrap()
    }

    #[test]
    fn identity_multiplier() {
        let u = Field::from_fn(grid1(64), |x: &[f64]| (-x[0] * x[0]).exp());
        let v = apply_multiplier(|_| Complex::new(1.0, 0.0), &u).unwrap();
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let u = Field::from_fn(grid1(32), |x: &[f64]| x[0].sin());
        let v = apply_multiplier(|xi| Complex::new(0.0, xi[0]), &u).unwrap();
        for (i, &y) in v.values().iter().enumerate() {
            let x = u.grid().node(i)[0];
            assert!((y - x.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn bessel_eigenfunction_and_inverse() {
        let u = Field::from_fn(grid1(64), |x: &[f64]| (3.0 * x[0]).sin());
        let v = bessel_potential(&u, 2.0);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((10.0 * a - b).abs() < 1e-12);
        }
        let w = bessel_potential(&bessel_potential(&u, 1.3), -1.3);
        for (a, b) in u.values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        let flipped = bessel_potential_with(&u, 2.0, BesselSymbol::SignFlipped);
        assert!((flipped.max_abs() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn non_finite_symbol_is_reported() {
        let u = Field::from_fn(grid1(16), |x: &[f64]| x[0].cos());
        let err = apply_multiplier(|xi| Complex::new(1.0 / xi[0], 0.0), &u).unwrap_err();
        assert!(matches!(err, Error::NonFiniteMultiplier { ref frequency } if frequency == &vec![0.0]));
        let ok = apply_multiplier_with_origin(|xi| Complex::new(1.0 / xi[0], 0.0), Some(Complex::new(0.0, 0.0)), &u);
        assert!(ok.is_ok());
    }

    #[test]
    fn two_dimensional_derivatives() {
        let g = SpaceGrid::new(2, PI, 32).unwrap();
        let u = Field::from_fn(g, |x: &[f64]| (2.0 * x[0]).sin() * x[1].cos());
        let d = spectral_derivative(&u, &[1, 1]);
        for i in 0..g.len() {
            let x = g.node(i);
            let exact = -2.0 * (2.0 * x[0]).cos() * x[1].sin();
            assert!((d.values()[i] - exact).abs() < 1e-12);
        }
    }
}
