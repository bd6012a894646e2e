//! Grand Lebesgue, grand sequence and grand Wiener amalgam norms on finite
//! measure spaces and finite abelian groups.
//!
//! Every norm here is a supremum over `eps` in `(0, p - 1]` of a weighted
//! `L^{p-eps}` norm. Domains are finite atomic measure spaces, so integrals
//! are exact finite sums and the epsilon search is the only approximation.

pub mod amalgam;
pub mod convolution;
pub mod error;
pub mod exponent;
pub mod grand;
pub mod grid;
pub mod lp;
pub mod measure;

pub use amalgam::{
    amalgam_norm, control_function, discrete_amalgam_norm, discrete_space_norm, equivalence_report,
    make_uniform_bupu, translate_window, validate_bupu, well_spread_check, Bupu, Window,
};
pub use convolution::{
    amalgam_submultiplicativity_check, convolve, noncompact_witness, submultiplicativity_check,
    FiniteAbelianGroup, Normalization,
};
pub use error::{Error, Result};
pub use exponent::{grand_factor, GrandExponent};
pub use grand::{
    closure_criterion, embedding_constants, epsilon_profile, grand_norm, grand_sequence_norm,
    ClosureEstimate, ClosureOutcome, EmbeddingConstants, EpsilonProfile, ProfileEntry,
};
pub use grid::{make_epsilon_grid, EpsilonGrid, Supremum};
pub use lp::{lp_norm, INFINITE_ORDER};
pub use measure::{GroupShape, MeasureSpace, SampledFunction, Topology};
