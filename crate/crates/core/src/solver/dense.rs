//! Brute-force reference: the full space-time system with dense spectral
//! differentiation matrices, solved by block forward substitution with an
//! LU factorization per time slice.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::frac_calc::ProductWeights;
use crate::spaces::{Field, SpaceGrid, SpaceTimeField};

use super::equation::{Coefficient, EquationSpec};
use super::march::{volterra_residual, Scheme, Solution};

/// Largest admissible `(N + 1) n^d`.
pub const DENSE_CAP: usize = 200_000;

/// Periodic first-derivative matrix on `n` nodes of `[-L, L)`.
pub fn first_derivative_matrix(n: usize, half_width: f64) -> DMatrix<f64> {
    let s = std::f64::consts::PI / half_width;
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            return 0.0;
        }
        let m = j as i64 - k as i64;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let theta = m as f64 * std::f64::consts::PI / n as f64;
        0.5 * s * sign / theta.tan()
    })
}

/// Periodic second-derivative matrix; keeps the Nyquist mode.
pub fn second_derivative_matrix(n: usize, half_width: f64) -> DMatrix<f64> {
    let s2 = (std::f64::consts::PI / half_width).powi(2);
    let nf = n as f64;
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            return -s2 * (nf * nf / 12.0 + 1.0 / 6.0);
        }
        let m = j as i64 - k as i64;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let theta = m as f64 * std::f64::consts::PI / nf;
        -s2 * sign / (2.0 * theta.sin().powi(2))
    })
}

/// Derivative matrices `(D_i, D_ij)` on the flattened grid.
fn matrices(grid: &SpaceGrid) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
    let n = grid.n();
    let d1 = first_derivative_matrix(n, grid.half_width());
    let d2 = second_derivative_matrix(n, grid.half_width());
    if grid.dim() == 1 {
        return (vec![d1], vec![d2]);
    }
    let id = DMatrix::<f64>::identity(n, n);
    let dx = d1.kronecker(&id);
    let dy = id.kronecker(&d1);
    let dxy = d1.kronecker(&d1);
    let second = vec![d2.kronecker(&id), dxy.clone(), dxy, id.kronecker(&d2)];
    (vec![dx, dy], second)
}

/// `L(t_n)` as a dense matrix.
fn assemble(spec: &EquationSpec<f64>, n: usize, d1: &[DMatrix<f64>], d2: &[DMatrix<f64>]) -> DMatrix<f64> {
    let coeffs = spec.coefficients();
    let dim = coeffs.dim();
    let m = spec.sgrid().len();
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut add = |c: &Coefficient<f64>, d: &DMatrix<f64>| {
        if c.is_zero() {
            return;
        }
        for i in 0..m {
            let a = c.at(n, i);
            for k in 0..m {
                l[(i, k)] += a * d[(i, k)];
            }
        }
    };
    for k in 0..dim * dim {
        add(coeffs.a(k / dim, k % dim), &d2[k]);
    }
    for i in 0..dim {
        add(coeffs.b(i), &d1[i]);
    }
    for i in 0..m {
        l[(i, i)] += coeffs.c().at(n, i);
    }
    l
}

/// Reference solution; rejects problems with more than [`DENSE_CAP`] unknowns.
pub fn solve_dense_oracle(spec: &EquationSpec<f64>) -> Result<Solution<f64>> {
    let sgrid = *spec.sgrid();
    let m = sgrid.len();
    let size = spec.tgrid().len() * m;
    if size > DENSE_CAP {
        return Err(Error::SizeCap { size, cap: DENSE_CAP });
    }
    let (d1, d2) = matrices(&sgrid);
    let weights = ProductWeights::new(spec.tgrid(), spec.alpha().value());
    let constant = spec.coefficients().is_constant();
    let fixed = constant.then(|| assemble(spec, 0, &d1, &d2));
    let f = spec.forcing();

    let mut u: Vec<DVector<f64>> = vec![DVector::zeros(m)];
    let mut g: Vec<DVector<f64>> = vec![DVector::from_column_slice(f.slice(0).values())];
    let mut cached: Option<(f64, nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>)> = None;
    for n in 1..spec.tgrid().len() {
        let row = weights.row(n);
        let wnn = row[n];
        let fnv = DVector::from_column_slice(f.slice(n).values());
        let mut rhs = &fnv * wnn;
        for (k, gk) in g.iter().enumerate() {
            rhs.axpy(row[k], gk, 1.0);
        }
        let l = match &fixed {
            Some(l) => l.clone(),
            None => assemble(spec, n, &d1, &d2),
        };
        let reuse = constant && matches!(&cached, Some((w, _)) if *w == wnn);
        if !reuse {
            let a = DMatrix::<f64>::identity(m, m) - &l * wnn;
            cached = Some((wnn, a.lu()));
        }
        let lu = &cached.as_ref().expect("factorization").1;
        let un = lu
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidArgument(format!("singular slice system at step {n}")))?;
        g.push(&l * &un + fnv);
        u.push(un);
    }
    let slices = u
        .into_iter()
        .map(|v| Field::new(sgrid, v.as_slice().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let field = SpaceTimeField::new(spec.tgrid().clone(), slices)?;
    let residual = volterra_residual(spec, &field)?;
    let iterations = std::iter::once(0).chain(std::iter::repeat(1)).take(field.tgrid().len()).collect();
    Ok(Solution::new(spec.alpha(), field, Scheme::DenseOracle, residual, iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matrices_differentiate_trigonometric_polynomials() {
        let n = 32;
        let l = 2.0;
        let g = SpaceGrid::new(1, l, n).unwrap();
        let k = PI / l * 3.0;
        let u = DVector::from_fn(n, |i, _| (k * g.node(i)[0]).sin());
        let du = first_derivative_matrix(n, l) * &u;
        let ddu = second_derivative_matrix(n, l) * &u;
        for i in 0..n {
            let x = g.node(i)[0];
            assert!((du[i] - k * (k * x).cos()).abs() < 1e-12);
            assert!((ddu[i] + k * k * (k * x).sin()).abs() < 1e-11);
        }
        // Nyquist mode: annihilated by D1, eigenvalue -(n/2)^2 (pi/L)^2 for D2
        let nyq = DVector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 });
        let kn = PI / l * (n / 2) as f64;
        assert!((first_derivative_matrix(n, l) * &nyq).amax() < 1e-12);
        assert!((second_derivative_matrix(n, l) * &nyq + &nyq * (kn * kn)).amax() < 1e-9);
    }
}
