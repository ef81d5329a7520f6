//! Littlewood-Paley decomposition with a smooth dyadic partition of unity
//! in frequency.

use crate::error::Result;
use crate::scalar::Real;
use crate::weights::{check_exponent, Weight};

use super::grid::Field;
use super::norms::CellWeights;
use super::spectral::SpectralPlan;

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, inf)`, built from `exp(-1/s)`.
pub fn cutoff(s: f64) -> f64 {
    let psi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    if s <= 1.0 {
        return 1.0;
    }
    if s >= 2.0 {
        return 0.0;
    }
    let a = psi(2.0 - s);
    a / (a + psi(s - 1.0))
}

/// Dyadic bump `Psi^(xi) = cutoff(|xi|) - cutoff(2|xi|)`, supported in
/// `1/2 <= |xi| <= 2`.
pub fn dyadic_bump(r: f64) -> f64 {
    cutoff(r) - cutoff(2.0 * r)
}

/// Pieces `Psi_j * u`, `j = 0..=J`; piece 0 is the low-frequency part
/// `cutoff(|xi|)`.
#[derive(Debug, Clone)]
pub struct LPDecomposition<T> {
    pieces: Vec<Field<T>>,
}

impl<T: Real> LPDecomposition<T> {
    pub fn pieces(&self) -> &[Field<T>] {
        &self.pieces
    }

    /// Largest dyadic index `J`.
    pub fn max_index(&self) -> usize {
        self.pieces.len() - 1
    }

    /// Sum of all pieces.
    pub fn reconstruct(&self) -> Field<T> {
        let grid = *self.pieces[0].grid();
        let mut acc = vec![T::zero(); grid.len()];
        for piece in &self.pieces {
            for (a, &v) in acc.iter_mut().zip(piece.values()) {
                *a = *a + v;
            }
        }
        Field::from_values_unchecked(grid, acc)
    }
}

/// Splits `u` into dyadic frequency pieces with
/// `J = max(1, ceil(log2 max|xi|))`, so that the pieces sum to `u`.
pub fn lp_decompose<T: Real>(u: &Field<T>) -> LPDecomposition<T> {
    let grid = *u.grid();
    let plan = SpectralPlan::<T>::new(&grid);
    let j_max = grid.max_frequency().log2().ceil().max(1.0) as usize;
    let spectrum = plan.forward(u.values());
    let mut radii = vec![0.0; grid.len()];
    plan.for_each_frequency(|k, xi| {
        radii[k] = xi.iter().map(|x| x.to_f64_lossy().powi(2)).sum::<f64>().sqrt();
    });
    let pieces = (0..=j_max)
        .map(|j| {
            let scale = (-(j as f64)).exp2();
            let spec = spectrum
                .iter()
                .zip(&radii)
                .map(|(&c, &r)| {
                    let m = if j == 0 { cutoff(r) } else { dyadic_bump(r * scale) };
                    c * T::lit(m)
                })
                .collect();
            Field::from_values_unchecked(grid, plan.inverse_real(spec))
        })
        .collect();
    LPDecomposition { pieces }
}

/// `||Psi_0 * u||_{L_p(w)} + ||(sum_{j>=1} |2^(gamma j) Psi_j * u|^2)^(1/2)||_{L_p(w)}`.
pub fn lp_square_function_norm<T: Real>(dec: &LPDecomposition<T>, gamma: f64, p: f64, w: &Weight) -> Result<T> {
    check_exponent(p)?;
    let cells = CellWeights::new(dec.pieces[0].grid(), w)?;
    Ok(lp_square_function_norm_cells(dec, gamma, p, &cells))
}

pub fn lp_square_function_norm_cells<T: Real>(dec: &LPDecomposition<T>, gamma: f64, p: f64, cells: &CellWeights<T>) -> T {
    let len = dec.pieces[0].values().len();
    let mut square = vec![T::zero(); len];
    for (j, piece) in dec.pieces.iter().enumerate().skip(1) {
        let s = T::lit((gamma * j as f64).exp2());
        for (acc, &v) in square.iter_mut().zip(piece.values()) {
            *acc = *acc + (s * v) * (s * v);
        }
    }
    let root: Vec<T> = square.into_iter().map(|v| v.sqrt()).collect();
    cells.norm(dec.pieces[0].values(), p) + cells.norm(&root, p)
}
