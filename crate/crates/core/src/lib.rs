//! Weak-coupling master equations for boundary-driven XXZ chains.
//!
//! The crate builds four generators for a spin chain whose end sites couple to
//! bosonic baths: Redfield, local Lindblad, eigenbasis (secular) Lindblad and the
//! universal Lindblad equation. Steady states, currents and consistency audits sit
//! on top of those generators.
//!
//! Superoperators act on column-stacked density matrices, so `A ρ B` maps to
//! `(Bᵀ ⊗ A) vec(ρ)`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bath;
pub mod builders;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod steady;

pub use bath::{BathSpec, PvQuadrature, SpectralFunction, Statistics};
pub use builders::{
    build_eigenbasis_lindblad, build_local_lindblad, build_redfield, build_redfield_hermitian,
    build_ule, extract_kossakowski, GeneratorKind, GeneratorParts, KossakowskiMatrix,
    LindbladForm,
};
pub use error::{QmeError, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use operator::{
    build_xxz, eigendecompose, gibbs_state, trace_distance, DensityMatrix, EigenBasis, OpenChain,
    SpinChainSystem, Superoperator,
};
pub use steady::{evolve, perturbative_ness, positivity_probe, solve_ness, SteadyStateReport};
