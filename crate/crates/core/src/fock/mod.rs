//! A truncated particle–field (Nelson-type) model on a periodic lattice,
//! small enough to diagonalize, used to check the binding inequality and
//! the hypotheses behind it end to end.

mod checks;
mod field;
mod nelson;
mod theorem;

pub use checks::{
    check_h2, check_h3, real_trial_function, translate, trial_state_verify, H2Report, TrialReport, H2_TOLERANCE,
    TRIAL_ENERGY_TOLERANCE, TRIAL_NORM_TOLERANCE, TRIAL_POTENTIAL_TOLERANCE,
};
pub use field::{degree, field_polynomial, FieldOrdering, FockBasis, SparseMatrix};
pub use nelson::{
    assemble, lattice_momentum, AssembledPair, FockTruncation, Mode, NelsonInstance, NelsonOperator,
    DEFAULT_DIM_CAP,
};
pub use theorem::{
    ground_pair, hypotheses, onebody_operator, theorem_verify, verify_instance, GroundPair, GroundPairOptions,
    HypothesisReport, TheoremReport, Verification, DENSE_AGREEMENT_TOLERANCE, SLACK_TOLERANCE,
};
