//! Periodic grids, Fourier multipliers and weighted Bessel-potential norms.
//!
//! Everything lives on the box `[-L, L)^d`, `d` in `{1, 2}`, with `n` nodes
//! per axis and angular frequencies `pi k / L`.

mod grid;
mod lp;
mod norms;
mod partition;
mod smooth;
mod spectral;

pub use grid::{Field, SpaceGrid, SpaceTimeField};
pub use lp::{cutoff, dyadic_bump, lp_decompose, lp_square_function_norm, lp_square_function_norm_cells, LPDecomposition};
pub use norms::{
    mixed_norm, mixed_norm_until, mixed_norm_with, slice_norms, sobolev_norm, sobolev_norm_with, time_lq, time_weights,
    weighted_lp_norm, CellWeights, MixedNormSpec, SobolevNorm,
};
pub use partition::{lattice_centers, partition_of_unity, PartitionOfUnity};
pub use smooth::{holder_quotient, holder_shift, smoothness_norm, smoothness_norm_with, zygmund_quotient, SmoothnessVariant};
pub use spectral::{
    apply_multiplier, apply_multiplier_with_origin, bessel_potential, bessel_potential_with, bessel_symbol,
    spectral_derivative, BesselSymbol, SpectralPlan,
};

