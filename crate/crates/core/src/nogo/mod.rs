//! Zero-error constraint system on the party that measures first.
//!
//! A zero-error first measurement `{M_k}` by the acting party must keep every
//! pair that the passive party cannot separate distinguishable at the acting
//! party, for every outcome: `α_ik α_jk ⟨w_ik|w_jk⟩ = 0`. Writing
//! `E_k = M_k†M_k`, the left side equals `⟨x_i|E_k|x_j⟩`, so the conditions are
//! linear in `E_k`. When the only solution is `E_k ∝ I`, no outcome changes
//! any branch weight or overlap and the first round makes no progress.

mod feasibility;
mod oracle;
mod relations;

pub use feasibility::{
    constraint_pairs, feasibility_analysis, feasibility_for_pairs, forced_structure,
    ConstraintPair, FeasibilityReport, ForcedStructure, Verdict,
};
pub use oracle::{kraus_oracle_check, OracleReport, ORACLE_TOLERANCE};
pub use relations::{
    check_generalized_relations, parallelogram_residual, verify_parallelogram,
    ParallelogramReport, RelationsReport,
};

/// The four pairs the nine-state argument constrains explicitly.
pub const NINE_STATE_CORE_PAIRS: [(usize, usize); 4] = [(5, 6), (7, 8), (1, 9), (3, 9)];
