use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Node distribution of a [`TimeGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grading {
    Uniform,
    /// Nodes `t_n = T (n/N)^r` with `r >= 1`.
    Graded { exponent: f64 },
}

/// Time nodes `0 = t_0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    final_time: T,
    steps: usize,
    grading: Grading,
    nodes: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub fn uniform(final_time: T, steps: usize) -> Result<Self> {
        Self::new(final_time, steps, Grading::Uniform)
    }

    pub fn graded(final_time: T, steps: usize, exponent: f64) -> Result<Self> {
        Self::new(final_time, steps, Grading::Graded { exponent })
    }

    /// Graded mesh with exponent `max(1, 2/alpha)` capped at 4, which
    /// resolves the `t^alpha` startup layer of fractional problems.
    pub fn graded_for_order(final_time: T, steps: usize, alpha: f64) -> Result<Self> {
        Self::graded(final_time, steps, default_grading_exponent(alpha))
    }

    pub fn new(final_time: T, steps: usize, grading: Grading) -> Result<Self> {
        if !(final_time > T::zero()) || !final_time.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "final time must be positive and finite, got {final_time}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 time steps, got {steps}"
            )));
        }
        let n_f = T::from_usize_lossy(steps);
        let nodes: Vec<T> = match grading {
            Grading::Uniform => (0..=steps)
                .map(|n| final_time * T::from_usize_lossy(n) / n_f)
                .collect(),
            Grading::Graded { exponent } => {
                if !(exponent >= 1.0) || !exponent.is_finite() {
                    return Err(Error::InvalidGrid(format!(
                        "grading exponent must be >= 1, got {exponent}"
                    )));
                }
                let r = T::lit(exponent);
                (0..=steps)
                    .map(|n| final_time * (T::from_usize_lossy(n) / n_f).powf(r))
                    .collect()
            }
        };
        let mut nodes = nodes;
        nodes[steps] = final_time;
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(
                "time nodes are not strictly increasing (grading too strong for the precision)"
                    .into(),
            ));
        }
        Ok(Self {
            final_time,
            steps,
            grading,
            nodes,
        })
    }

    pub fn final_time(&self) -> T {
        self.final_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.grading, Grading::Uniform)
            || matches!(self.grading, Grading::Graded { exponent } if exponent == 1.0)
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same node pattern stretched to a new final time.
    pub fn with_final_time(&self, final_time: T) -> Result<Self> {
        Self::new(final_time, self.steps, self.grading)
    }

    /// The first `steps + 1` nodes as a grid ending at `t_steps`.
    pub fn truncated(&self, steps: usize) -> Result<Self> {
        if steps < 2 || steps > self.steps {
            return Err(Error::InvalidGrid(format!(
                "cannot truncate {} steps to {steps}",
                self.steps
            )));
        }
        Ok(Self {
            final_time: self.nodes[steps],
            steps,
            grading: self.grading,
            nodes: self.nodes[..=steps].to_vec(),
        })
    }

    /// Index of the node equal to `t` (relative tolerance 1e-12).
    pub fn node_index(&self, t: T) -> Option<usize> {
        let tol = T::lit(1e-12) * self.final_time;
        self.nodes.iter().position(|&s| (s - t).abs() <= tol)
    }
}

pub fn default_grading_exponent(alpha: f64) -> f64 {
    (2.0 / alpha).clamp(1.0, 4.0)
}

/// Values sampled at the nodes of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    grid: TimeGrid<T>,
    values: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(grid: TimeGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "series has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        ensure_finite(&self.values)
    }
}

pub(crate) fn ensure_finite<T: Real>(values: &[T]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index].to_f64_lossy(),
        }),
        None => Ok(()),
    }
}

/// Order of a fractional operator.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FracOrder(f64);

impl FracOrder {
    /// Any positive order, as used by fractional integrals.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder {
                order: alpha,
                range: "(0, inf)",
            })
        }
    }

    /// Orders admissible for derivatives and the evolution equation.
    pub fn for_equation(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 2.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder {
                order: alpha,
                range: "(0, 2)",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Number of classical derivatives, `ceil(alpha)`.
    pub fn ceil(self) -> usize {
        self.0.ceil() as usize
    }

    pub fn has_initial_slope(self) -> bool {
        self.0 > 1.0
    }

    pub fn as_real<T: Real>(self) -> T {
        T::lit(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nodes_hit_the_endpoints() {
        let g = TimeGrid::graded(2.0_f64, 16, 3.0).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[16], 2.0);
        assert!((g.nodes()[8] - 2.0 * 0.125).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::uniform(0.0_f64, 8).is_err());
        assert!(TimeGrid::uniform(1.0_f64, 1).is_err());
        assert!(TimeGrid::graded(1.0_f64, 8, 0.5).is_err());
    }

    #[test]
    fn default_grading() {
        assert_eq!(default_grading_exponent(0.5), 4.0);
        assert_eq!(default_grading_exponent(0.8), 2.5);
        assert_eq!(default_grading_exponent(1.5), 2.0 / 1.5);
        assert_eq!(default_grading_exponent(0.1), 4.0);
    }

    #[test]
    fn order_ranges() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(3.5).is_ok());
        assert!(FracOrder::for_equation(2.0).is_err());
        assert_eq!(FracOrder::for_equation(1.5).unwrap().ceil(), 2);
        assert_eq!(FracOrder::for_equation(1.0).unwrap().ceil(), 1);
    }
}
