//! The one-particle problem `h = K(p) + V` on a periodic lattice.

mod certificate;
mod convergence;
mod hamiltonian;
mod solve;
mod variational;

pub use certificate::{binding_certificate, BindingCertificate, LATTICE_CAVEAT};
pub use convergence::{
    converge_study, converge_study_lifted, richardson, sample, ConvergenceStudy, NestedPair, NESTED_TOLERANCE,
};
pub use hamiltonian::{apply_h, lattice_checksum, OneBodyHamiltonian};
pub use solve::{
    boundary_mass, ensure_refinement, ground_state, ground_state_with_box_control, lift_potential, solve_operator,
    GroundState, Lift, SolveOptions, SolveResult, BOUNDARY_MASS_LIMIT,
};
pub use variational::{minimize_over_family, variational_upper_bound, TrialFamily, VariationalBound, GOLDEN_ITERATIONS};
