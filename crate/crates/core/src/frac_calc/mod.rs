//! Discrete fractional calculus on (possibly graded) time grids.

mod grid;
mod mittag_leffler;
mod ops;
mod quadrature;

pub(crate) use grid::ensure_finite;
pub use grid::{default_grading_exponent, FracOrder, Grading, TimeGrid, TimeSeries};
pub use mittag_leffler::mittag_leffler;
pub use ops::{caputo_derivative, fd_derivative, fd_second_derivative, frac_integral, frac_integral_corrected, remove_taylor_head, rl_derivative};
pub use quadrature::ProductWeights;
