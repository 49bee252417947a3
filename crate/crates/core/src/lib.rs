//! Exact and simulated tools for the degrees of freedom of real scalar
//! Gaussian interference channels.
//!
//! * [`channel`]: gain matrices, diagonal scalings, reduction to the
//!   canonical three-user channel, and the channel itself.
//! * [`lattice`]: truncated lattice codebooks aligned along a quadratic
//!   irrational gain, exact separation checks and Monte Carlo error rates.
//! * [`sumset`]: sumset algebra and verified constructions for the
//!   additive-combinatorics lemmas.
//! * [`multilevel`]: the deterministic multi-level alignment code.
//! * [`bounds`]: exact DoF upper bounds and slope estimates.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod lattice;
pub mod matrix_io;
pub mod multilevel;
pub mod quadratic;
pub mod seed;
pub mod sumset;

pub use bounds::{
    dof_slope_estimate, format_decimal, gaussian_entropy_ub, halfk_upper, rational_3user_bound,
    rational_kuser_bound, subchannel_bound, triple_bound, BoundReport, SlopeFit, TripleTrace,
};
pub use channel::{
    apply_channel, apply_deterministic, integerize, reduce_to_canonical, scale, CanonicalReduction,
    CanonicalTriple, DiagonalScaling, Gain, GainMatrix, NoiseSpec,
};
pub use error::{Error, Result};
pub use lattice::{
    build_codebook, liouville_delta, min_separation, nearest_point, simulate_symbol_error,
    LatticeSimConfig, LiouvilleCertificate, SRange, Separation, SimulationReport, TruncatedLattice,
};
pub use matrix_io::{parse_matrix, write_matrix};
pub use multilevel::{
    encode, exhaustive_zero_error, scheme_dof, validate_scheme, Decoder, LevelScheme, MessageTuple,
};
pub use quadratic::QuadraticIrrational;
pub use seed::derive_seed;
pub use sumset::{
    bsg_construct, entropy_of_sum, exg_construct, partial_sumset, plunnecke_check, ruzsa_cover,
    set_combine, setsum_bound_check, Combine, IntVectorSet, PairSubset,
};

/// Version string reported by the tools.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
