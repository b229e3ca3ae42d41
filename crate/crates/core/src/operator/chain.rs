use alloc::format;
use alloc::vec::Vec;

use crate::bath::BathSpec;
use crate::error::{QmeError, Result};
use crate::operator::eigen::{eigendecompose, EigenBasis};
use crate::operator::spin::SpinChainSystem;

/// A chain, its eigenbasis and the baths attached to its terminals.
#[derive(Debug, Clone)]
pub struct OpenChain {
    system: SpinChainSystem,
    basis: EigenBasis,
    baths: Vec<BathSpec>,
}

impl OpenChain {
    pub fn new(system: SpinChainSystem, baths: Vec<BathSpec>, degeneracy_tol: f64) -> Result<Self> {
        if baths.is_empty() {
            return Err(QmeError::InvalidArgument("no baths".into()));
        }
        for (k, b) in baths.iter().enumerate() {
            if system.coupling_operator(b.terminal()).is_none() {
                return Err(QmeError::InvalidArgument(format!(
                    "bath {k} attached to site {} which is not a terminal",
                    b.terminal()
                )));
            }
            if baths[..k].iter().any(|o| o.terminal() == b.terminal()) {
                return Err(QmeError::InvalidArgument(format!("two baths on site {}", b.terminal())));
            }
        }
        let basis = eigendecompose(&system, degeneracy_tol)?;
        Ok(OpenChain { system, basis, baths })
    }

    pub fn system(&self) -> &SpinChainSystem {
        &self.system
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn baths(&self) -> &[BathSpec] {
        &self.baths
    }

    pub fn bath(&self, terminal: usize) -> Option<&BathSpec> {
        self.baths.iter().find(|b| b.terminal() == terminal)
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// (bath, σ₋ at its terminal) pairs.
    pub fn coupled(&self) -> impl Iterator<Item = (&BathSpec, &crate::linalg::CMatrix)> {
        self.baths.iter().map(move |b| (b, self.system.coupling_operator(b.terminal()).unwrap()))
    }
}
