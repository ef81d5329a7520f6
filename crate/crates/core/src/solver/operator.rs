//! The spatial operator `L = a^ij D_ij + b^i D_i + c`, derivatives spectral,
//! coefficients applied at the nodes.

use num_complex::Complex;

use crate::scalar::Real;
use crate::spaces::{SpaceGrid, SpectralPlan};

use super::equation::{Coefficient, Coefficients};

pub(crate) struct SpatialOperator<'a, T: Real> {
    coeffs: &'a Coefficients<T>,
    plan: SpectralPlan<T>,
    d1: Vec<Vec<Complex<T>>>,
    d2: Vec<Vec<Complex<T>>>,
}

/// Constant coefficients `(a, b, c)` with `a` row-major.
#[derive(Debug, Clone)]
pub(crate) struct Frozen<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub c: T,
}

impl<'a, T: Real> SpatialOperator<'a, T> {
    pub fn new(coeffs: &'a Coefficients<T>, grid: &SpaceGrid) -> Self {
        let plan = SpectralPlan::new(grid);
        let d = grid.dim();
        let unit = |i: usize| (0..d).map(|k| usize::from(k == i)).collect::<Vec<_>>();
        let d1 = (0..d).map(|i| plan.derivative_symbol(&unit(i))).collect();
        let d2 = (0..d * d)
            .map(|k| {
                let mut beta = unit(k / d);
                beta[k % d] += 1;
                plan.derivative_symbol(&beta)
            })
            .collect();
        Self { coeffs, plan, d1, d2 }
    }

    pub fn plan(&self) -> &SpectralPlan<T> {
        &self.plan
    }

    /// Symbol of the constant-coefficient operator.
    pub fn symbol(&self, frozen: &Frozen<T>) -> Vec<Complex<T>> {
        let len = self.plan.grid().len();
        (0..len)
            .map(|k| {
                let mut s = Complex::new(frozen.c, T::zero());
                for (a, d) in frozen.a.iter().zip(&self.d2) {
                    s = s + d[k] * *a;
                }
                for (b, d) in frozen.b.iter().zip(&self.d1) {
                    s = s + d[k] * *b;
                }
                s
            })
            .collect()
    }

    /// The coefficients at slice `n` when they are all constant.
    pub fn constant(&self) -> Option<Frozen<T>> {
        let value = |c: &Coefficient<T>| match c {
            Coefficient::Constant(v) => Some(*v),
            Coefficient::Variable(_) => None,
        };
        let d = self.coeffs.dim();
        Some(Frozen {
            a: (0..d * d).map(|k| value(self.coeffs.a(k / d, k % d))).collect::<Option<_>>()?,
            b: (0..d).map(|i| value(self.coeffs.b(i))).collect::<Option<_>>()?,
            c: value(self.coeffs.c())?,
        })
    }

    /// Isotropic principal part at the midpoint of the eigenvalue range of
    /// `a(t_n, .)`, midrange drift and potential.
    pub fn frozen(&self, n: usize) -> Frozen<T> {
        let d = self.coeffs.dim();
        let len = self.plan.grid().len();
        let (lo, hi) = (0..len).fold((T::infinity(), T::neg_infinity()), |(lo, hi), i| {
            let (a, b) = self.coeffs.eigen_range(n, i);
            (lo.min(a), hi.max(b))
        });
        let a0 = (lo + hi) * T::half();
        Frozen {
            a: (0..d * d).map(|k| if k / d == k % d { a0 } else { T::zero() }).collect(),
            b: (0..d).map(|i| self.coeffs.b(i).midrange(n)).collect(),
            c: self.coeffs.c().midrange(n),
        }
    }

    /// `L(t_n) u`.
    pub fn apply(&self, n: usize, u: &[T]) -> Vec<T> {
        let spec = self.plan.forward(u);
        let mut out: Vec<T> = match self.coeffs.c() {
            Coefficient::Constant(c) if c.is_zero() => vec![T::zero(); u.len()],
            c => u.iter().enumerate().map(|(i, &v)| c.at(n, i) * v).collect(),
        };
        let d = self.coeffs.dim();
        let terms = (0..d * d)
            .map(|k| (self.coeffs.a(k / d, k % d), &self.d2[k]))
            .chain((0..d).map(|i| (self.coeffs.b(i), &self.d1[i])));
        for (coeff, symbol) in terms {
            if coeff.is_zero() {
                continue;
            }
            let deriv = self.plan.inverse_real(spec.iter().zip(symbol).map(|(&s, &m)| s * m).collect());
            for (i, (o, v)) in out.iter_mut().zip(deriv).enumerate() {
                *o = *o + coeff.at(n, i) * v;
            }
        }
        out
    }

    /// Largest value of `c` on slice `n`.
    pub fn max_potential(&self, n: usize) -> T {
        self.coeffs.c().range(n).1
    }
}
