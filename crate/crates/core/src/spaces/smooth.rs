//! Hölder and Zygmund norms of grid functions.
//!
//! Derivatives are spectral; difference quotients use the periodic distance
//! between nodes. In 1-D with `n <= 512` every node pair is visited; above
//! that, and always in 2-D, pairs are stratified over dyadic offsets along
//! the axes and both diagonals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::grid::{Field, SpaceGrid};
use super::spectral::spectral_derivative;

const EXHAUSTIVE_LIMIT: usize = 512;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothnessVariant {
    /// `C^(r-1,1)` at integer `r`, `C^(r + kappa')` otherwise.
    #[default]
    Holder,
    /// Second-difference (Zygmund) seminorm of order `r`.
    Zygmund,
}

/// Shift `kappa' = min(0.1, dist(r + 0.1, Z)) / 2` used for non-integer `r`.
pub fn holder_shift(r: f64) -> f64 {
    let s = r + 0.1;
    let dist = (s - s.round()).abs();
    0.1f64.min(dist) / 2.0
}

/// The `B^r` norm used for pointwise multipliers.
pub fn smoothness_norm<T: Real>(a: &Field<T>, r: f64) -> Result<T> {
    smoothness_norm_with(a, r, SmoothnessVariant::Holder)
}

pub fn smoothness_norm_with<T: Real>(a: &Field<T>, r: f64, variant: SmoothnessVariant) -> Result<T> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("smoothness order {r} must be >= 0")));
    }
    if r == 0.0 {
        return Ok(a.max_abs());
    }
    let (m, theta, second) = match variant {
        SmoothnessVariant::Holder if r.fract() == 0.0 => (r as usize - 1, 1.0, false),
        SmoothnessVariant::Holder => {
            let e = r + holder_shift(r);
            (e.floor() as usize, e.fract(), false)
        }
        SmoothnessVariant::Zygmund => {
            let m = r.ceil() as usize - 1;
            (m, r - m as f64, true)
        }
    };
    let dim = a.grid().dim();
    let mut total = T::zero();
    for order in 0..=m {
        for beta in multi_indices(dim, order) {
            let d = derivative(a, &beta);
            total = total + d.max_abs();
            if order == m {
                total = total
                    + if second {
                        zygmund_quotient(&d, theta)
                    } else {
                        holder_quotient(&d, theta)
                    };
            }
        }
    }
    Ok(total)
}

fn derivative<T: Real>(a: &Field<T>, beta: &[usize]) -> Field<T> {
    if beta.iter().all(|&b| b == 0) {
        a.clone()
    } else {
        spectral_derivative(a, beta)
    }
}

fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    if dim == 1 {
        vec![vec![order]]
    } else {
        (0..=order).map(|i| vec![i, order - i]).collect()
    }
}

/// Node offsets `(step along axis 0, step along axis 1)` to compare.
fn offsets(grid: &SpaceGrid) -> Vec<(i64, i64)> {
    let n = grid.n() as i64;
    if grid.dim() == 1 {
        if grid.n() <= EXHAUSTIVE_LIMIT {
            (1..=n / 2).map(|s| (s, 0)).collect()
        } else {
            dyadic(n).map(|s| (s, 0)).collect()
        }
    } else {
        dyadic(n)
            .flat_map(|s| [(s, 0), (0, s), (s, s), (s, -s)])
            .collect()
    }
}

fn dyadic(n: i64) -> impl Iterator<Item = i64> {
    (0..).map(|k| 1i64 << k).take_while(move |&s| s <= n / 2)
}

fn shifted(grid: &SpaceGrid, flat: usize, off: (i64, i64), times: i64) -> usize {
    let n = grid.n() as i64;
    let [i, j] = grid.multi_index(flat);
    let a = (i as i64 + times * off.0).rem_euclid(n) as usize;
    if grid.dim() == 1 {
        a
    } else {
        let b = (j as i64 + times * off.1).rem_euclid(n) as usize;
        a * grid.n() + b
    }
}

fn offset_length(grid: &SpaceGrid, off: (i64, i64)) -> f64 {
    let n = grid.n() as i64;
    let wrap = |s: i64| {
        let s = s.rem_euclid(n);
        s.min(n - s) as f64
    };
    let h = grid.spacing();
    if grid.dim() == 1 {
        wrap(off.0) * h
    } else {
        (wrap(off.0).powi(2) + wrap(off.1).powi(2)).sqrt() * h
    }
}

/// `sup |f(x) - f(y)| / |x - y|^theta`.
pub fn holder_quotient<T: Real>(f: &Field<T>, theta: f64) -> T {
    let grid = *f.grid();
    let v = f.values();
    let mut best = T::zero();
    for off in offsets(&grid) {
        let scale = T::lit(offset_length(&grid, off).powf(theta)).recip();
        for i in 0..v.len() {
            let q = (v[shifted(&grid, i, off, 1)] - v[i]).abs() * scale;
            best = best.max(q);
        }
    }
    best
}

/// `sup |f(x + 2y) - 2 f(x + y) + f(x)| / |y|^theta`.
pub fn zygmund_quotient<T: Real>(f: &Field<T>, theta: f64) -> T {
    let grid = *f.grid();
    let v = f.values();
    let mut best = T::zero();
    for off in offsets(&grid) {
        let scale = T::lit(offset_length(&grid, off).powf(theta)).recip();
        for i in 0..v.len() {
            let d2 = v[shifted(&grid, i, off, 2)] - T::two() * v[shifted(&grid, i, off, 1)] + v[i];
            best = best.max(d2.abs() * scale);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> SpaceGrid {
        SpaceGrid::new(1, PI, n).unwrap()
    }

    #[test]
    fn constants_have_no_seminorm() {
        let a = Field::from_fn(grid(64), |_| -2.5f64);
        for r in [0.0, 0.5, 1.0, 1.7, 2.0] {
            let v = smoothness_norm(&a, r).unwrap();
            assert!((v - 2.5).abs() < 1e-12, "r = {r}: {v}");
        }
        let z = smoothness_norm_with(&a, 1.0, SmoothnessVariant::Zygmund).unwrap();
        assert!((z - 2.5).abs() < 1e-12);
    }

    #[test]
    fn sine_lipschitz_norm() {
        let a = Field::from_fn(grid(256), |x: &[f64]| x[0].sin());
        let v = smoothness_norm(&a, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-3, "{v}");
        let z = smoothness_norm_with(&a, 1.0, SmoothnessVariant::Zygmund).unwrap();
        // sup_y 4 sin^2(y/2) / y is about 1.449
        assert!(z > 2.0 && z < 2.5, "{z}");
    }

    #[test]
    fn holder_shift_rule() {
        assert!((holder_shift(0.5) - 0.05).abs() < 1e-15);
        assert!((holder_shift(0.85) - 0.025).abs() < 1e-12);
        for r in [0.3, 0.5, 0.95, 1.25, 2.6] {
            let e = r + holder_shift(r);
            assert!(e.fract() != 0.0);
        }
    }

    #[test]
    fn rejects_negative_order() {
        let a = Field::from_fn(grid(16), |_| 1.0);
        assert!(smoothness_norm(&a, -0.5).is_err());
    }

    #[test]
    fn stratified_pairs_on_large_and_2d_grids() {
        let a = Field::from_fn(grid(1024), |x: &[f64]| x[0].sin());
        let v = smoothness_norm(&a, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-3);
        let g2 = SpaceGrid::new(2, PI, 32).unwrap();
        let b = Field::from_fn(g2, |x: &[f64]| x[0].sin() * x[1].cos());
        let v = smoothness_norm(&b, 0.5).unwrap();
        assert!(v.is_finite() && v > 1.0);
    }
}
