//! Smooth partitions of unity subordinate to balls of a fixed radius.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::grid::{Field, SpaceGrid};
use super::spectral::spectral_derivative;

/// Bumps `zeta_k` with `supp zeta_k` inside the ball of radius `delta`
/// around `centers[k]` (periodic distance) and `sum_k zeta_k = 1` at every
/// node.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity<T> {
    delta: f64,
    centers: Vec<Vec<f64>>,
    bumps: Vec<Field<T>>,
}

/// `exp(-1 / (1 - s^2))` on `|s| < 1`, zero outside.
fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

pub fn partition_of_unity<T: Real>(grid: &SpaceGrid, delta: f64, centers: &[Vec<f64>]) -> Result<PartitionOfUnity<T>> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("radius {delta} must be positive")));
    }
    if centers.is_empty() {
        return Err(Error::InvalidArgument("no centers".into()));
    }
    if let Some(c) = centers.iter().find(|c| c.len() != grid.dim()) {
        return Err(Error::InvalidArgument(format!("center {c:?} has the wrong dimension")));
    }
    let raw: Vec<Vec<f64>> = centers
        .iter()
        .map(|c| {
            (0..grid.len())
                .map(|i| bump(grid.periodic_distance(&grid.node(i), c) / delta))
                .collect()
        })
        .collect();
    let mut total = vec![0.0; grid.len()];
    for r in &raw {
        for (t, v) in total.iter_mut().zip(r) {
            *t += v;
        }
    }
    if let Some(node) = total.iter().position(|&t| !(t > 0.0)) {
        return Err(Error::CoverageGap { node });
    }
    let bumps = raw
        .into_iter()
        .map(|r| {
            let vals = r.iter().zip(&total).map(|(v, t)| T::lit(v / t)).collect();
            Field::from_values_unchecked(*grid, vals)
        })
        .collect();
    Ok(PartitionOfUnity {
        delta,
        centers: centers.to_vec(),
        bumps,
    })
}

/// Centers on the lattice of spacing `spacing` covering `[-L, L)^d`.
pub fn lattice_centers(grid: &SpaceGrid, spacing: f64) -> Vec<Vec<f64>> {
    let l = grid.half_width();
    let count = ((2.0 * l / spacing).ceil() as usize).max(1);
    let axis: Vec<f64> = (0..count).map(|i| -l + (i as f64 + 0.5) * 2.0 * l / count as f64).collect();
    if grid.dim() == 1 {
        axis.iter().map(|&x| vec![x]).collect()
    } else {
        axis.iter()
            .flat_map(|&x| axis.iter().map(move |&y| vec![x, y]))
            .collect()
    }
}

impl<T: Real> PartitionOfUnity<T> {
    pub fn radius(&self) -> f64 {
        self.delta
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn bumps(&self) -> &[Field<T>] {
        &self.bumps
    }

    pub fn len(&self) -> usize {
        self.bumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bumps.is_empty()
    }

    /// `max_x sum_k |D^sigma zeta_k(x)|`, derivatives taken spectrally.
    pub fn derivative_bound(&self, sigma: &[usize]) -> T {
        let grid = *self.bumps[0].grid();
        let mut acc = vec![T::zero(); grid.len()];
        for b in &self.bumps {
            let d = if sigma.iter().all(|&s| s == 0) {
                b.clone()
            } else {
                spectral_derivative(b, sigma)
            };
            for (a, &v) in acc.iter_mut().zip(d.values()) {
                *a = *a + v.abs();
            }
        }
        acc.into_iter().fold(T::zero(), T::max)
    }

    /// `M(sigma)` for every multi-index with `|sigma| <= 2`.
    pub fn derivative_bounds(&self) -> Vec<(Vec<usize>, T)> {
        let dim = self.bumps[0].grid().dim();
        let sigmas: Vec<Vec<usize>> = if dim == 1 {
            vec![vec![0], vec![1], vec![2]]
        } else {
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        };
        sigmas
            .into_iter()
            .map(|s| {
                let m = self.derivative_bound(&s);
                (s, m)
            })
            .collect()
    }

    /// `min_x sum_k |zeta_k(x)|^p`.
    pub fn lower_bound(&self, p: f64) -> T {
        let len = self.bumps[0].values().len();
        let pp = T::lit(p);
        (0..len)
            .map(|i| self.bumps.iter().fold(T::zero(), |s, b| s + b.values()[i].abs().powf(pp)))
            .fold(T::infinity(), T::min)
    }

    /// `sum_k zeta_k` at every node.
    pub fn sum(&self) -> Vec<T> {
        let len = self.bumps[0].values().len();
        (0..len)
            .map(|i| self.bumps.iter().fold(T::zero(), |s, b| s + b.values()[i]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_center_is_identity() {
        let g = SpaceGrid::new(1, PI, 64).unwrap();
        let pu = partition_of_unity::<f64>(&g, 10.0, &[vec![0.0]]).unwrap();
        assert_eq!(pu.len(), 1);
        assert!(pu.bumps()[0].values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn sums_to_one_with_positive_lower_bound() {
        for dim in [1, 2] {
            let g = SpaceGrid::new(dim, PI, 64).unwrap();
            let centers = lattice_centers(&g, 1.0);
            let pu = partition_of_unity::<f64>(&g, 1.2, &centers).unwrap();
            for s in pu.sum() {
                assert!((s - 1.0).abs() < 1e-14);
            }
            let lb = pu.lower_bound(2.0);
            assert!(lb > 0.0 && lb <= 1.0);
            let bounds = pu.derivative_bounds();
            assert!((bounds[0].1 - 1.0).abs() < 1e-14);
            assert!(bounds.iter().all(|(_, m)| m.is_finite()));
        }
    }

    #[test]
    fn support_inside_ball() {
        let g = SpaceGrid::new(1, PI, 128).unwrap();
        let centers = lattice_centers(&g, 0.8);
        let pu = partition_of_unity::<f64>(&g, 1.0, &centers).unwrap();
        for (c, b) in pu.centers().iter().zip(pu.bumps()) {
            for (i, &v) in b.values().iter().enumerate() {
                if g.periodic_distance(&g.node(i), c) >= 1.0 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn coverage_gap_is_rejected() {
        let g = SpaceGrid::new(1, PI, 64).unwrap();
        let err = partition_of_unity::<f64>(&g, 0.5, &[vec![0.0], vec![2.0]]).unwrap_err();
        assert!(matches!(err, Error::CoverageGap { .. }));
    }
}
