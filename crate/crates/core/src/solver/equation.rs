//! Coefficients and problem data of `d^alpha u = a^ij u_ij + b^i u_i + c u + f`.

use crate::error::{Error, Result};
use crate::frac_calc::{FracOrder, TimeGrid};
use crate::scalar::Real;
use crate::spaces::{Field, SpaceGrid, SpaceTimeField};

/// A coefficient that is either constant or sampled at every space-time node.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient<T> {
    Constant(T),
    Variable(SpaceTimeField<T>),
}

impl<T: Real> Coefficient<T> {
    pub fn zero() -> Self {
        Coefficient::Constant(T::zero())
    }

    pub fn from_fn(tgrid: &TimeGrid<T>, sgrid: SpaceGrid, f: impl Fn(T, &[T]) -> T) -> Self {
        Coefficient::Variable(SpaceTimeField::from_fn(tgrid.clone(), sgrid, f))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Constant(c) if c.is_zero())
    }

    /// Value at time index `n` and flat node `i`.
    #[inline]
    pub fn at(&self, n: usize, i: usize) -> T {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Variable(f) => f.slice(n).values()[i],
        }
    }

    /// `(min, max)` over the nodes of time slice `n`.
    pub fn range(&self, n: usize) -> (T, T) {
        match self {
            Coefficient::Constant(c) => (*c, *c),
            Coefficient::Variable(f) => f
                .slice(n)
                .values()
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        }
    }

    /// `(min + max) / 2` over slice `n`.
    pub fn midrange(&self, n: usize) -> T {
        let (lo, hi) = self.range(n);
        (lo + hi) * T::half()
    }

    fn check_grids(&self, tgrid: &TimeGrid<T>, sgrid: &SpaceGrid, name: &str) -> Result<()> {
        if let Coefficient::Variable(f) = self {
            if f.tgrid() != tgrid || f.sgrid() != sgrid {
                return Err(Error::GridMismatch(format!("coefficient {name} is sampled on different grids")));
            }
            if let Some(v) = f.slices().iter().flat_map(|s| s.values()).find(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("coefficient {name} has non-finite value {v}")));
            }
        } else if let Coefficient::Constant(c) = self {
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient {name} = {c} is not finite")));
            }
        }
        Ok(())
    }

    /// `r^power * coeff(r^(2/alpha) t, r x)` on the stretched grids.
    pub(crate) fn relabeled(&self, tgrid: &TimeGrid<T>, sgrid: SpaceGrid, factor: T) -> Result<Self> {
        Ok(match self {
            Coefficient::Constant(c) => Coefficient::Constant(*c * factor),
            Coefficient::Variable(f) => {
                let slices = f
                    .slices()
                    .iter()
                    .map(|s| Field::new(sgrid, s.values().iter().map(|&v| v * factor).collect()))
                    .collect::<Result<Vec<_>>>()?;
                Coefficient::Variable(SpaceTimeField::new(tgrid.clone(), slices)?)
            }
        })
    }
}

/// `a^ij` (row-major, `d x d`), `b^i` and `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    dim: usize,
    a: Vec<Coefficient<T>>,
    b: Vec<Coefficient<T>>,
    c: Coefficient<T>,
}

impl<T: Real> Coefficients<T> {
    pub fn new(dim: usize, a: Vec<Coefficient<T>>, b: Vec<Coefficient<T>>, c: Coefficient<T>) -> Result<Self> {
        if !(dim == 1 || dim == 2) || a.len() != dim * dim || b.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} needs {} entries of a and {dim} of b, got {} and {}",
                dim * dim,
                a.len(),
                b.len()
            )));
        }
        if dim == 2 && a[1] != a[2] {
            return Err(Error::InvalidArgument("a^12 and a^21 differ".into()));
        }
        Ok(Self { dim, a, b, c })
    }

    /// `a^ij = delta^ij`, `b = c = 0`.
    pub fn laplacian(dim: usize) -> Self {
        Self::isotropic(dim, Coefficient::Constant(T::one()))
    }

    /// `a^ij = a delta^ij`, `b = c = 0`.
    pub fn isotropic(dim: usize, a: Coefficient<T>) -> Self {
        let entries = if dim == 1 {
            vec![a]
        } else {
            vec![a.clone(), Coefficient::zero(), Coefficient::zero(), a]
        };
        Self {
            dim,
            a: entries,
            b: vec![Coefficient::zero(); dim],
            c: Coefficient::zero(),
        }
    }

    pub fn with_drift(mut self, b: Vec<Coefficient<T>>) -> Result<Self> {
        if b.len() != self.dim {
            return Err(Error::InvalidArgument(format!("drift needs {} entries", self.dim)));
        }
        self.b = b;
        Ok(self)
    }

    pub fn with_potential(mut self, c: Coefficient<T>) -> Self {
        self.c = c;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self, i: usize, j: usize) -> &Coefficient<T> {
        &self.a[i * self.dim + j]
    }

    pub fn b(&self, i: usize) -> &Coefficient<T> {
        &self.b[i]
    }

    pub fn c(&self) -> &Coefficient<T> {
        &self.c
    }

    pub fn is_constant(&self) -> bool {
        self.a.iter().chain(&self.b).all(Coefficient::is_constant) && self.c.is_constant()
    }

    /// Extreme eigenvalues of `a(t_n, x_i)`.
    pub fn eigen_range(&self, n: usize, i: usize) -> (T, T) {
        if self.dim == 1 {
            let v = self.a[0].at(n, i);
            return (v, v);
        }
        let (p, q, r) = (self.a[0].at(n, i), self.a[1].at(n, i), self.a[3].at(n, i));
        let mean = (p + r) * T::half();
        let rad = (((p - r) * T::half()).powi(2) + q * q).sqrt();
        (mean - rad, mean + rad)
    }

    fn all(&self) -> impl Iterator<Item = (String, &Coefficient<T>)> {
        let d = self.dim;
        let a = self.a.iter().enumerate().map(move |(k, c)| (format!("a{}{}", k / d + 1, k % d + 1), c));
        let b = self.b.iter().enumerate().map(|(k, c)| (format!("b{}", k + 1), c));
        a.chain(b).chain(std::iter::once(("c".to_string(), &self.c)))
    }

    pub(crate) fn relabeled(&self, tgrid: &TimeGrid<T>, sgrid: SpaceGrid, r: T) -> Result<Self> {
        let map = |v: &[Coefficient<T>], f: T| v.iter().map(|c| c.relabeled(tgrid, sgrid, f)).collect::<Result<Vec<_>>>();
        Ok(Self {
            dim: self.dim,
            a: map(&self.a, T::one())?,
            b: map(&self.b, r)?,
            c: self.c.relabeled(tgrid, sgrid, r * r)?,
        })
    }
}

/// A complete problem with zero initial data.
#[derive(Debug, Clone)]
pub struct EquationSpec<T: Real> {
    alpha: FracOrder,
    coefficients: Coefficients<T>,
    forcing: SpaceTimeField<T>,
    delta: f64,
}

impl<T: Real> EquationSpec<T> {
    /// Validates grids, symmetry and `delta |xi|^2 <= a xi xi <= |xi|^2 / delta`
    /// at every node.
    pub fn new(alpha: FracOrder, coefficients: Coefficients<T>, forcing: SpaceTimeField<T>, delta: f64) -> Result<Self> {
        let alpha = FracOrder::for_equation(alpha.value())?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("ellipticity constant {delta} not in (0, 1)")));
        }
        if coefficients.dim() != forcing.sgrid().dim() {
            return Err(Error::GridMismatch("coefficient and forcing dimensions differ".into()));
        }
        for (name, c) in coefficients.all() {
            c.check_grids(forcing.tgrid(), forcing.sgrid(), &name)?;
        }
        if let Some(v) = forcing.slices().iter().flat_map(|s| s.values()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("forcing has non-finite value {v}")));
        }
        let lo = T::lit(delta);
        let hi = T::lit(1.0 / delta);
        let slices = if coefficients.a.iter().all(Coefficient::is_constant) { 1 } else { forcing.tgrid().len() };
        let nodes = if coefficients.a.iter().all(Coefficient::is_constant) { 1 } else { forcing.sgrid().len() };
        for n in 0..slices {
            for i in 0..nodes {
                let (min_eig, max_eig) = coefficients.eigen_range(n, i);
                if !(min_eig >= lo && max_eig <= hi) {
                    return Err(Error::Ellipticity {
                        time_index: n,
                        node: i,
                        min_eig: min_eig.to_f64_lossy(),
                        max_eig: max_eig.to_f64_lossy(),
                        delta,
                    });
                }
            }
        }
        Ok(Self {
            alpha,
            coefficients,
            forcing,
            delta,
        })
    }

    /// Constant-coefficient heat-type problem `d^alpha u = Laplace u + f`.
    pub fn laplacian(alpha: FracOrder, forcing: SpaceTimeField<T>) -> Result<Self> {
        let dim = forcing.sgrid().dim();
        Self::new(alpha, Coefficients::laplacian(dim), forcing, 0.5)
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn coefficients(&self) -> &Coefficients<T> {
        &self.coefficients
    }

    pub fn forcing(&self) -> &SpaceTimeField<T> {
        &self.forcing
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn tgrid(&self) -> &TimeGrid<T> {
        self.forcing.tgrid()
    }

    pub fn sgrid(&self) -> &SpaceGrid {
        self.forcing.sgrid()
    }

    /// Same coefficients with a different forcing on the same grids.
    pub fn with_forcing(&self, forcing: SpaceTimeField<T>) -> Result<Self> {
        Self::new(self.alpha, self.coefficients.clone(), forcing, self.delta)
    }
}
