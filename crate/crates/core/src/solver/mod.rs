//! Solver for `d^alpha u = a^ij u_ij + b^i u_i + c u + f` on a periodic box
//! with zero initial data, a dense reference solver, manufactured forcings
//! and parabolic rescaling.

mod dense;
mod equation;
mod io;
mod manufactured;
mod march;
mod operator;
mod rescale;

pub use dense::{first_derivative_matrix, second_derivative_matrix, solve_dense_oracle, DENSE_CAP};
pub use equation::{Coefficient, Coefficients, EquationSpec};
pub use io::{load_solution, manifest_path, SolutionManifest, SOLUTION_FORMAT};
pub use manufactured::{manufactured_rhs, single_mode_solution, ExactSolution};
pub use march::{caputo_residual, solve, volterra_residual, Scheme, SolveOptions, Solution};
pub use rescale::{dyadic_level, parabolic_rescale};
