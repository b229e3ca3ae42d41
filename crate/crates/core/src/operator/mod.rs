//! Operators, eigenbases, states and superoperators.

mod chain;
mod eigen;
pub mod spin;
mod state;
pub mod superop;

pub use chain::OpenChain;
pub use eigen::{eigendecompose, EigenBasis, DEFAULT_DEGENERACY_TOL};
pub use spin::{build_xxz, site_operator, SpinChainSystem};
pub use state::{gibbs_state, trace_distance, DensityMatrix};
pub use superop::{
    sandwich_superop, unvectorize, vectorize, Superoperator, Vectorization,
};
