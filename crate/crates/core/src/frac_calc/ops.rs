use crate::error::Result;
use crate::scalar::Real;
use crate::special::recip_gamma;

use super::grid::{default_grading_exponent, FracOrder, Grading, TimeGrid, TimeSeries};
use super::quadrature::ProductWeights;

/// Riemann–Liouville integral `I^alpha phi` at every grid node.
///
/// Exact whenever `phi` is piecewise linear on the grid; `(I^alpha phi)(0) = 0`.
pub fn frac_integral<T: Real>(phi: &TimeSeries<T>, alpha: FracOrder) -> Result<TimeSeries<T>> {
    phi.ensure_finite()?;
    let weights = ProductWeights::new(phi.grid(), alpha.value());
    TimeSeries::new(phi.grid().clone(), weights.apply(phi.values()))
}

/// `I^alpha phi` with starting weights that integrate the singular terms
/// `t^sigma`, `sigma` in `exponents`, exactly.
///
/// Use when `phi` is known to behave like a combination of these powers
/// plus a smooth part near `t = 0`; the plain rule loses accuracy there.
pub fn frac_integral_corrected<T: Real>(phi: &TimeSeries<T>, alpha: FracOrder, exponents: &[f64]) -> Result<TimeSeries<T>> {
    phi.ensure_finite()?;
    let weights = ProductWeights::new(phi.grid(), alpha.value());
    let start = weights.starting_weights(phi.grid(), exponents)?;
    let values = phi.values();
    let mut out = weights.apply(values);
    for (o, s) in out.iter_mut().zip(&start) {
        for (j, &w) in s.iter().enumerate() {
            *o = *o + w * values[j + 1];
        }
    }
    TimeSeries::new(phi.grid().clone(), out)
}

/// Riemann–Liouville derivative `D^alpha phi` for `0 < alpha < 2`.
///
/// Evaluated as `I^(n-alpha)(phi^(n)) + sum_{k<n} phi^(k)(0) t^(k-alpha) / Gamma(k+1-alpha)`
/// with `n = ceil(alpha)` and second-order finite differences for `phi^(k)`.
/// The head terms are singular at `t = 0`, so node 0 carries `±inf` whenever
/// `phi(0)` (or `phi'(0)` for `alpha > 1`) is nonzero.
pub fn rl_derivative<T: Real>(phi: &TimeSeries<T>, alpha: FracOrder) -> Result<TimeSeries<T>> {
    let alpha = FracOrder::for_equation(alpha.value())?;
    phi.ensure_finite()?;
    warn_on_grading_mismatch(phi.grid(), alpha);
    let grid = phi.grid();
    let values = phi.values();
    let mut out = caputo_core(grid, values, alpha);

    let a = alpha.as_real::<T>();
    let mut head = vec![(values[0], T::one() - a)];
    if alpha.has_initial_slope() {
        let slope0 = fd_derivative(grid.nodes(), values)[0];
        head.push((slope0, T::two() - a));
    }
    for (coef, shifted) in head {
        let scale = coef * recip_gamma(shifted);
        if scale == T::zero() {
            continue;
        }
        let power = shifted - T::one();
        for (o, &t) in out.iter_mut().zip(grid.nodes()) {
            *o = *o + scale * t.powf(power);
        }
    }
    TimeSeries::new(grid.clone(), out)
}

/// Caputo derivative: removes the Taylor head `phi(0) + 1_{alpha>1} phi'(0) t`
/// and differentiates the remainder in the Riemann–Liouville sense.
///
/// Constant inputs map to exact zeros.
pub fn caputo_derivative<T: Real>(phi: &TimeSeries<T>, alpha: FracOrder) -> Result<TimeSeries<T>> {
    let alpha = FracOrder::for_equation(alpha.value())?;
    phi.ensure_finite()?;
    warn_on_grading_mismatch(phi.grid(), alpha);
    let grid = phi.grid();
    let remainder = remove_taylor_head(grid, phi.values(), alpha);
    // the remainder has vanishing head, so the Riemann–Liouville head terms drop out
    TimeSeries::new(grid.clone(), caputo_core(grid, &remainder, alpha))
}

/// `phi - phi(0) - 1_{alpha>1} phi'(0) t` with the discrete one-sided slope.
pub fn remove_taylor_head<T: Real>(grid: &TimeGrid<T>, values: &[T], alpha: FracOrder) -> Vec<T> {
    let phi0 = values[0];
    let slope0 = if alpha.has_initial_slope() {
        fd_derivative(grid.nodes(), values)[0]
    } else {
        T::zero()
    };
    values
        .iter()
        .zip(grid.nodes())
        .map(|(&v, &t)| v - phi0 - slope0 * t)
        .collect()
}

/// `I^(n-alpha)` applied to the n-th discrete derivative.
fn caputo_core<T: Real>(grid: &TimeGrid<T>, values: &[T], alpha: FracOrder) -> Vec<T> {
    let nodes = grid.nodes();
    let n = alpha.ceil();
    let deriv = if n == 2 && nodes.len() >= 4 {
        fd_second_derivative(nodes, values)
    } else if n == 2 {
        fd_derivative(nodes, &fd_derivative(nodes, values))
    } else {
        fd_derivative(nodes, values)
    };
    let rest = n as f64 - alpha.value();
    if rest == 0.0 {
        return deriv;
    }
    ProductWeights::new(grid, rest).apply(&deriv)
}

/// Second-order three-point derivative on a possibly nonuniform grid;
/// one-sided at both ends. Exact for quadratics.
pub fn fd_derivative<T: Real>(nodes: &[T], values: &[T]) -> Vec<T> {
    let len = nodes.len();
    assert!(len >= 3 && values.len() == len, "need at least 3 nodes");
    let quad = |i0: usize, x: T| -> T {
        let (x0, x1, x2) = (nodes[i0], nodes[i0 + 1], nodes[i0 + 2]);
        let (f0, f1, f2) = (values[i0], values[i0 + 1], values[i0 + 2]);
        // coefficients sum to zero; differencing against f0 keeps constants exact
        (f1 - f0) * (T::two() * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + (f2 - f0) * (T::two() * x - x0 - x1) / ((x2 - x0) * (x2 - x1))
    };
    let mut out = Vec::with_capacity(len);
    out.push(quad(0, nodes[0]));
    for i in 1..len - 1 {
        out.push(quad(i - 1, nodes[i]));
    }
    out.push(quad(len - 3, nodes[len - 1]));
    out
}

/// Second derivative of the local cubic interpolant on four consecutive
/// nodes (shifted inward at the ends); exact on cubics, any grid.
pub fn fd_second_derivative<T: Real>(nodes: &[T], values: &[T]) -> Vec<T> {
    let len = nodes.len();
    assert!(len >= 4 && values.len() == len, "need at least 4 nodes");
    (0..len)
        .map(|i| {
            let start = i.saturating_sub(1).min(len - 4);
            let x = nodes[i];
            let stencil = &nodes[start..start + 4];
            // l_j''(x) for the Lagrange basis on the stencil
            (0..4)
                .map(|j| {
                    let xj = stencil[j];
                    let others: Vec<T> = (0..4).filter(|&k| k != j).map(|k| stencil[k]).collect();
                    let denom = others.iter().fold(T::one(), |acc, &xk| acc * (xj - xk));
                    let (a, b, c) = (x - others[0], x - others[1], x - others[2]);
                    T::two() * (a + b + c) / denom * (values[start + j] - values[start])
                })
                .fold(T::zero(), |acc, v| acc + v)
        })
        .collect()
}

fn warn_on_grading_mismatch<T: Real>(grid: &TimeGrid<T>, alpha: FracOrder) {
    if let Grading::Graded { exponent } = grid.grading() {
        let recommended = default_grading_exponent(alpha.value());
        if exponent > recommended + 1e-12 {
            log::warn!(
                "grading exponent {exponent} exceeds {recommended} for alpha = {}; finite differences near t = 0 lose accuracy",
                alpha.value()
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn zero_input_gives_zero() {
        let g = TimeGrid::uniform(1.0_f64, 32).unwrap();
        let phi = TimeSeries::from_fn(g, |_| 0.0);
        let out = frac_integral(&phi, order(0.7)).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn integral_of_one_is_exact() {
        let g = TimeGrid::uniform(1.0_f64, 10).unwrap();
        let phi = TimeSeries::from_fn(g, |_| 1.0);
        let out = frac_integral(&phi, order(0.5)).unwrap();
        assert!((out.values()[10] - 1.0 / gamma(1.5)).abs() < 1e-14);
        assert_eq!(out.values()[0], 0.0);
    }

    #[test]
    fn rejects_non_finite_input() {
        let g = TimeGrid::uniform(1.0_f64, 8).unwrap();
        let mut v = vec![0.0; 9];
        v[3] = f64::NAN;
        let phi = TimeSeries::new(g, v).unwrap();
        assert!(frac_integral(&phi, order(0.5)).is_err());
        assert!(caputo_derivative(&phi, order(0.5)).is_err());
    }

    #[test]
    fn derivative_orders_are_restricted() {
        let g = TimeGrid::uniform(1.0_f64, 8).unwrap();
        let phi = TimeSeries::from_fn(g, |t| t);
        assert!(rl_derivative(&phi, order(2.0)).is_err());
        assert!(caputo_derivative(&phi, order(2.5)).is_err());
        assert!(FracOrder::new(0.0).is_err());
    }

    #[test]
    fn caputo_of_constant_is_exactly_zero() {
        let g = TimeGrid::graded(1.0_f64, 50, 2.0).unwrap();
        for &a in &[0.3, 1.0, 1.5] {
            let phi = TimeSeries::from_fn(g.clone(), |_| -3.25);
            let out = caputo_derivative(&phi, order(a)).unwrap();
            assert!(out.values().iter().all(|&v| v == 0.0), "alpha = {a}");
        }
    }

    #[test]
    fn rl_derivative_of_constant_is_the_power_law() {
        let g = TimeGrid::uniform(1.0_f64, 64).unwrap();
        let phi = TimeSeries::from_fn(g.clone(), |_| 1.0);
        let out = rl_derivative(&phi, order(0.5)).unwrap();
        for (i, &t) in g.nodes().iter().enumerate().skip(1) {
            let exact = t.powf(-0.5) / std::f64::consts::PI.sqrt();
            assert!((out.values()[i] - exact).abs() < 1e-13 * exact);
        }
        assert!(out.values()[0].is_infinite());
    }

    #[test]
    fn rl_three_halves_of_linear() {
        let g = TimeGrid::uniform(1.0_f64, 64).unwrap();
        let phi = TimeSeries::from_fn(g.clone(), |t| t);
        let out = rl_derivative(&phi, order(1.5)).unwrap();
        for (i, &t) in g.nodes().iter().enumerate().skip(1) {
            let exact = t.powf(-0.5) / gamma(0.5);
            assert!((out.values()[i] - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn fd_second_derivative_is_exact_on_cubics() {
        let g = TimeGrid::graded(1.0_f64, 20, 2.0).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|&t| t * t * t - 3.0 * t * t + t + 5.0).collect();
        let d = fd_second_derivative(g.nodes(), &v);
        for (x, &t) in d.iter().zip(g.nodes()) {
            assert!((x - (6.0 * t - 6.0)).abs() < 1e-8, "{x} at {t}");
        }
    }

    #[test]
    fn fd_derivative_is_exact_on_quadratics() {
        let g = TimeGrid::graded(1.0_f64, 20, 2.0).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|&t| 3.0 * t * t - t + 2.0).collect();
        let d = fd_derivative(g.nodes(), &v);
        for (x, &t) in d.iter().zip(g.nodes()) {
            assert!((x - (6.0 * t - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn order_one_is_the_classical_derivative() {
        let g = TimeGrid::uniform(1.0_f64, 16).unwrap();
        let phi = TimeSeries::from_fn(g.clone(), |t| t * t);
        let out = caputo_derivative(&phi, order(1.0)).unwrap();
        for (x, &t) in out.values().iter().zip(g.nodes()) {
            assert!((x - 2.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let g = TimeGrid::uniform(1.0_f32, 64).unwrap();
        let phi = TimeSeries::from_fn(g, |t| t);
        let out = caputo_derivative(&phi, order(0.5)).unwrap();
        let exact = 2.0 / std::f32::consts::PI.sqrt();
        assert!((out.values()[64] - exact).abs() < 1e-4);
    }
}
