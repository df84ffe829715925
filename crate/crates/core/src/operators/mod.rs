//! Kinetic dispersions, external potentials and the periodic lattices they
//! are sampled on.

mod fourier;
mod grid;
mod kinetic;
mod potential;

pub use fourier::Fourier;
pub use grid::GridSpec;
pub use kinetic::{h3_margin, kinetic_on_grid, H3Report, KineticProfile, MomentumField, H3_TOLERANCE};
pub use potential::{
    inverse_distance_cell_average, potential_on_grid, PositionField, PotentialSpec, Sampling, TabulatedField,
};
