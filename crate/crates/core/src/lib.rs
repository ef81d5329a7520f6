//! Fractional calculus, Muckenhoupt-weighted Sobolev norms and a solver for
//! time-fractional diffusion-wave equations, together with a harness that
//! measures the constants in the associated weighted inequalities.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! verification harness and the command-line tool use.

pub mod error;
pub mod frac_calc;
pub mod scalar;
pub mod spaces;
pub mod solver;
pub mod special;
pub mod weights;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type TimeGrid = frac_calc::TimeGrid<f64>;
pub type TimeSeries = frac_calc::TimeSeries<f64>;
pub type ProductWeights = frac_calc::ProductWeights<f64>;
pub type Field = spaces::Field<f64>;
pub type SpaceTimeField = spaces::SpaceTimeField<f64>;
pub type CellWeights = spaces::CellWeights<f64>;
pub type LPDecomposition = spaces::LPDecomposition<f64>;
pub type PartitionOfUnity = spaces::PartitionOfUnity<f64>;
pub type Coefficients = solver::Coefficients<f64>;
pub type EquationSpec = solver::EquationSpec<f64>;
pub type Solution = solver::Solution<f64>;
