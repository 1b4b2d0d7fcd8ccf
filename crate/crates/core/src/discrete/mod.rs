//! Finite-alphabet evaluation of the combinatorial-message-sharing region.

mod cms;
mod pmf;
mod zb;

pub use cms::{
    alpha, cms_constraints, description_rates, rate_feasible, rate_feasible_with, AuxRateVector, CmsConstraint,
    Feasibility, RateTuple, FEASIBILITY_TOLERANCE,
};
pub use pmf::{
    best_reconstruction, entropy_bits, expected_distortion, JointPmf, PmfDocument, ReconstructionDocument,
    ReconstructionMap, VariableRole,
};
pub use zb::{zb_replica_bounds, ReplicaBounds};
