//! Control functions, grand Wiener amalgam norms, partitions of unity and
//! their discrete counterparts.

pub mod bupu;
pub mod discrete;
pub mod equivalence;
pub mod window;

pub use bupu::{
    make_uniform_bupu, validate_bupu, well_spread_check, BoundCheck, Bupu, BupuValidation,
    OverlapCheck, PartitionCheck, SupportCheck, WellSpreadReport, PARTITION_TOLERANCE,
};
pub use discrete::{
    discrete_amalgam_norm, discrete_space_bounds, discrete_space_norm, local_norms, step_function,
    ScaleBounds,
};
pub use equivalence::{
    equivalence_report, EquivalenceBounds, EquivalenceGeometry, EquivalenceNorms,
    EquivalenceOptions, EquivalenceRatios, EquivalenceReport, BOUND_SLACK,
};
pub use window::{amalgam_norm, control_function, translate_window, Window};
