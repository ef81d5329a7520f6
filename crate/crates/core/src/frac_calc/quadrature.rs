//! Product-integration weights for the Riemann–Liouville kernel.
//!
//! On each cell the density is replaced by its linear interpolant, which is
//! integrated exactly against `(t_n - s)^(alpha-1) / Gamma(alpha)`. The
//! weights are nonnegative, so positivity is preserved.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::gamma;

use super::grid::TimeGrid;

/// Lower-triangular table `W[n][k]` with `(I^alpha phi)(t_n) = sum_k W[n][k] phi_k`.
#[derive(Debug, Clone)]
pub struct ProductWeights<T> {
    alpha: f64,
    rows: Vec<Vec<T>>,
}

impl<T: Real> ProductWeights<T> {
    pub fn new(grid: &TimeGrid<T>, alpha: f64) -> Self {
        let a = T::lit(alpha);
        let scale = T::one() / gamma(a);
        let t = grid.nodes();
        let steps = grid.steps();
        let mut rows = Vec::with_capacity(steps + 1);
        rows.push(vec![T::zero()]);

        if grid.is_uniform() {
            // cell pattern depends only on the distance to the target node
            let h = t[1] - t[0];
            let cells: Vec<(T, T)> = (0..steps)
                .map(|m| {
                    let (l, r) = cell_weights(T::from_usize_lossy(m + 1) * h, h, a);
                    (l * scale, r * scale)
                })
                .collect();
            for n in 1..=steps {
                let mut row = vec![T::zero(); n + 1];
                for k in 0..n {
                    let (l, r) = cells[n - k - 1];
                    row[k] = row[k] + l;
                    row[k + 1] = row[k + 1] + r;
                }
                rows.push(row);
            }
        } else {
            for n in 1..=steps {
                let mut row = vec![T::zero(); n + 1];
                for k in 0..n {
                    let (l, r) = cell_weights(t[n] - t[k], t[k + 1] - t[k], a);
                    row[k] = row[k] + l * scale;
                    row[k + 1] = row[k + 1] + r * scale;
                }
                rows.push(row);
            }
        }
        Self { alpha, rows }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn row(&self, n: usize) -> &[T] {
        &self.rows[n]
    }

    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    /// Starting weights that make the rule exact on `t^sigma` for each
    /// `sigma` in `exponents` (all positive and distinct).
    ///
    /// Entry `[n][j]` multiplies the value at node `j + 1`; add
    /// `sum_j S[n][j] phi_(j+1)` to row `n` of [`apply`](Self::apply).
    pub fn starting_weights(&self, grid: &TimeGrid<T>, exponents: &[f64]) -> Result<Vec<Vec<T>>> {
        let m = exponents.len();
        let steps = self.steps();
        if m == 0 {
            return Ok(vec![Vec::new(); steps + 1]);
        }
        if m > steps {
            return Err(Error::InvalidGrid(format!("{m} starting weights need at least {m} steps")));
        }
        if exponents.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("starting exponents must be positive: {exponents:?}")));
        }
        let nodes: Vec<f64> = grid.nodes().iter().map(|t| t.to_f64_lossy()).collect();
        let scale = nodes[1];
        // V[i][j] = (t_(j+1) / t_1)^sigma_i
        let v = DMatrix::from_fn(m, m, |i, j| (nodes[j + 1] / scale).powf(exponents[i]));
        let lu = v.lu();
        let mut defects = DMatrix::zeros(m, steps + 1);
        for (i, &sigma) in exponents.iter().enumerate() {
            let probe: Vec<T> = nodes.iter().map(|&t| T::lit((t / scale).powf(sigma))).collect();
            let approx = self.apply(&probe);
            let c = gamma(sigma + 1.0) / gamma(sigma + 1.0 + self.alpha);
            for n in 1..=steps {
                let exact = c * (nodes[n] / scale).powf(sigma) * nodes[n].powf(self.alpha);
                defects[(i, n)] = exact - approx[n].to_f64_lossy();
            }
        }
        let solved = lu
            .solve(&defects)
            .ok_or_else(|| Error::InvalidArgument(format!("singular starting system for {exponents:?}")))?;
        if solved.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("singular starting system for {exponents:?}")));
        }
        Ok((0..=steps)
            .map(|n| {
                if n == 0 {
                    vec![T::zero(); m]
                } else {
                    (0..m).map(|j| T::lit(solved[(j, n)])).collect()
                }
            })
            .collect())
    }

    /// Applies the discrete integral to nodal values.
    pub fn apply(&self, values: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(values)
                    .fold(T::zero(), |acc, (&w, &v)| acc + w * v)
            })
            .collect()
    }
}

/// Unscaled weights `(left, right)` of the cell `[t_k, t_{k+1}]` seen from a
/// target node at distance `far` from `t_k`; `width = t_{k+1} - t_k`.
///
/// With `sigma = t_n - s` ranging over `[far - width, far]`:
///   right = int sigma^(a-1) (far - sigma) / width
///   left  = int sigma^(a-1) - right
pub(crate) fn cell_weights<T: Real>(far: T, width: T, a: T) -> (T, T) {
    let rho = (width / far).min(T::one());
    let far_pow = far.powf(a);
    // int_{far-width}^{far} sigma^(a-1) d sigma
    let total = if rho >= T::one() {
        far_pow / a
    } else {
        -far_pow * (a * (-rho).ln_1p()).exp_m1() / a
    };
    let g = shape_g(rho, a);
    let right = far_pow * g / (a * (a + T::one()) * rho);
    let left = total - right;
    (left.max(T::zero()), right.max(T::zero()))
}

/// `g(rho) = 1 - (a+1)(1-rho)^a + a(1-rho)^(a+1)`, which is O(rho^2) and
/// therefore evaluated by its binomial series for small rho.
fn shape_g<T: Real>(rho: T, a: T) -> T {
    if rho > T::lit(0.25) {
        let q = T::one() - rho;
        return T::one() - (a + T::one()) * q.powf(a) + a * q.powf(a + T::one());
    }
    // g = sum_{j>=2} (-rho)^j [a C(a, j-1) - C(a, j)]
    let mut binom_prev = a; // C(a, 1)
    let mut pow = -rho; // (-rho)^1
    let mut sum = T::zero();
    let eps = T::epsilon() * T::lit(0.1);
    for j in 2..200 {
        let jf = T::from_usize_lossy(j);
        let binom = binom_prev * (a - jf + T::one()) / jf;
        pow = -pow * rho;
        let term = pow * (a * binom_prev - binom);
        sum = sum + term;
        if term.abs() <= eps * sum.abs() {
            break;
        }
        binom_prev = binom;
    }
    sum
}
