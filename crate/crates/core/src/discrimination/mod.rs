//! One-way protocols: exact simulation and optimal minimum-error estimation.

mod povm;
mod projective;
mod protocol;

pub use povm::{nelder_mead, optimize_povm, PovmOptimum, RESTARTS};
pub use projective::{
    analytic_p, canonicalize_angle, golden_section_max, guess_probability_projective,
    helstrom_two_pure, max_rule_protocol, optimize_projective, projective_basis,
    ProjectiveOptimum, GRID_STEP,
};
pub use protocol::{
    branch_weights, chi_basis_protocol, is_four_state_family, load_protocol, save_protocol,
    simulate_one_way, BobRecord, BobStrategy, EstimationParametrization, EstimationResult,
    OneWayProtocol, ProtocolFile, PROTOCOL_FORMAT_TAG,
};
