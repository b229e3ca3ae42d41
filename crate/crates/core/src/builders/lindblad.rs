use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::{cr, CMatrix};
use crate::operator::superop::{dissipator_superop, hamiltonian_superop};
use crate::operator::Superoperator;

#[derive(Debug, Clone)]
pub struct Jump {
    pub operator: CMatrix,
    pub rate: f64,
}

/// Jumps and Lamb shift contributed by one bath.
#[derive(Debug, Clone)]
pub struct LindbladChannel {
    pub terminal: usize,
    pub lamb_shift: CMatrix,
    pub jumps: Vec<Jump>,
}

impl LindbladChannel {
    /// −i[H_LS, ·] + Σ γ D[L].
    pub fn superoperator(&self) -> CMatrix {
        let mut m = hamiltonian_superop(&self.lamb_shift);
        for j in &self.jumps {
            m += dissipator_superop(&j.operator) * cr(j.rate);
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct LindbladForm {
    pub channels: Vec<LindbladChannel>,
}

impl LindbladForm {
    pub fn lamb_shift(&self) -> CMatrix {
        let d = self.channels[0].lamb_shift.nrows();
        self.channels.iter().fold(CMatrix::zeros(d, d), |acc, c| acc + &c.lamb_shift)
    }

    pub fn jumps(&self) -> impl Iterator<Item = &Jump> {
        self.channels.iter().flat_map(|c| c.jumps.iter())
    }

    pub fn min_rate(&self) -> f64 {
        self.jumps().map(|j| j.rate).fold(f64::INFINITY, f64::min)
    }

    /// Reassembled dissipator with its per-bath split.
    pub fn superoperator(&self) -> Result<Superoperator> {
        Superoperator::from_parts(self.channels.iter().map(|c| (c.terminal, c.superoperator())).collect())
    }

    pub(crate) fn scaled(&self, r: f64) -> LindbladForm {
        LindbladForm {
            channels: self
                .channels
                .iter()
                .map(|c| LindbladChannel {
                    terminal: c.terminal,
                    lamb_shift: &c.lamb_shift * cr(r),
                    jumps: c.jumps.iter().map(|j| Jump { operator: j.operator.clone(), rate: j.rate * r }).collect(),
                })
                .collect(),
        }
    }
}
