//! The four master-equation generators.

mod eigenbasis;
mod kossakowski;
mod lindblad;
mod local;
mod redfield;
mod ule;

use alloc::string::String;
use alloc::vec::Vec;

pub use eigenbasis::{build_eigenbasis_lindblad, DEFAULT_SECULAR_TOL};
pub use kossakowski::{extract_kossakowski, gell_mann_basis, KossakowskiMatrix};
pub use lindblad::{Jump, LindbladChannel, LindbladForm};
pub use local::build_local_lindblad;
pub use redfield::{build_redfield, build_redfield_hermitian};
pub use ule::build_ule;

use crate::error::{QmeError, Result};
use crate::linalg::{cr, CMatrix};
use crate::operator::superop::hamiltonian_superop;
use crate::operator::Superoperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    Redfield,
    LocalLindblad,
    EigenbasisLindblad,
    Universal,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::Redfield,
        GeneratorKind::LocalLindblad,
        GeneratorKind::EigenbasisLindblad,
        GeneratorKind::Universal,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            GeneratorKind::Redfield => "re",
            GeneratorKind::LocalLindblad => "lle",
            GeneratorKind::EigenbasisLindblad => "ele",
            GeneratorKind::Universal => "ule",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        GeneratorKind::ALL.into_iter().find(|k| k.label().eq_ignore_ascii_case(s))
    }

    pub fn is_lindblad(&self) -> bool {
        !matches!(self, GeneratorKind::Redfield)
    }
}

/// H_S plus an ε²-weighted dissipator split by bath.
///
/// Lamb-shift terms live inside the per-bath dissipator, so the Hamiltonian part is
/// always the bare H_S.
#[derive(Debug, Clone)]
pub struct GeneratorParts {
    pub kind: GeneratorKind,
    pub hamiltonian: CMatrix,
    pub dissipator: Superoperator,
    pub epsilon: f64,
    pub lindblad: Option<LindbladForm>,
    pub warnings: Vec<String>,
}

impl GeneratorParts {
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// Full generator −i[H_S, ·] + ε²L₂.
    pub fn liouvillian(&self) -> CMatrix {
        hamiltonian_superop(&self.hamiltonian) + self.dissipator.matrix()
    }

    /// L₂ without the ε² factor.
    pub fn unit_dissipator(&self) -> Superoperator {
        self.dissipator.scaled(1.0 / (self.epsilon * self.epsilon))
    }

    /// Same generator at another coupling; the dissipator is exactly quadratic in ε.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<GeneratorParts> {
        check_epsilon(epsilon)?;
        let r = (epsilon / self.epsilon) * (epsilon / self.epsilon);
        Ok(GeneratorParts {
            kind: self.kind,
            hamiltonian: self.hamiltonian.clone(),
            dissipator: self.dissipator.scaled(r),
            epsilon,
            lindblad: self.lindblad.as_ref().map(|l| l.scaled(r)),
            warnings: self.warnings.clone(),
        })
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(QmeError::InvalidArgument(alloc::format!("epsilon = {epsilon} must be positive")));
    }
    Ok(())
}

pub(crate) fn eps2(epsilon: f64) -> crate::linalg::C64 {
    cr(epsilon * epsilon)
}
