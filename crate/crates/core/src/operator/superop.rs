//! Column-stacked superoperators: `A ρ B ↦ (Bᵀ ⊗ A) vec(ρ)`.

use alloc::vec::Vec;

use crate::error::{QmeError, Result};
use crate::linalg::{c, cr, identity, kron, CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vectorization {
    ColumnStacking,
}

pub fn vectorize(rho: &CMatrix) -> CVector {
    CVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &CVector) -> Result<CMatrix> {
    let d = integer_sqrt(v.len()).ok_or(QmeError::NotPerfectSquare(v.len()))?;
    Ok(CMatrix::from_column_slice(d, d, v.as_slice()))
}

fn integer_sqrt(n: usize) -> Option<usize> {
    let r = libm::round(libm::sqrt(n as f64)) as usize;
    (r * r == n && r > 0).then_some(r)
}

/// Raw matrix of ρ ↦ AρB.
pub fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    kron(&b.transpose(), a)
}

/// ρ ↦ Aρ.
pub fn left_multiply(a: &CMatrix) -> CMatrix {
    kron(&identity(a.nrows()), a)
}

/// ρ ↦ ρB.
pub fn right_multiply(b: &CMatrix) -> CMatrix {
    kron(&b.transpose(), &identity(b.nrows()))
}

/// ρ ↦ −i[H, ρ].
pub fn hamiltonian_superop(h: &CMatrix) -> CMatrix {
    (right_multiply(h) - left_multiply(h)) * c(0.0, 1.0)
}

/// ρ ↦ LρL† − ½{L†L, ρ}.
pub fn dissipator_superop(l: &CMatrix) -> CMatrix {
    let ldl = l.adjoint() * l;
    sandwich(l, &l.adjoint()) - (left_multiply(&ldl) + right_multiply(&ldl)) * cr(0.5)
}

#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: CMatrix,
    dim: usize,
    convention: Vectorization,
    per_bath: Option<Vec<(usize, CMatrix)>>,
}

impl Superoperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QmeError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let dim = integer_sqrt(matrix.nrows()).ok_or(QmeError::NotPerfectSquare(matrix.nrows()))?;
        Ok(Superoperator { matrix, dim, convention: Vectorization::ColumnStacking, per_bath: None })
    }

    /// Sum of per-terminal parts, keeping the split.
    pub fn from_parts(parts: Vec<(usize, CMatrix)>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| QmeError::InvalidArgument("no parts".into()))?;
        let mut total = CMatrix::zeros(first.1.nrows(), first.1.ncols());
        for (_, m) in &parts {
            if m.shape() != total.shape() {
                return Err(QmeError::DimensionMismatch { expected: total.nrows(), found: m.nrows() });
            }
            total += m;
        }
        let mut s = Superoperator::new(total)?;
        s.per_bath = Some(parts);
        Ok(s)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Hilbert-space dimension D (the matrix is D²×D²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn convention(&self) -> Vectorization {
        self.convention
    }

    pub fn per_bath(&self) -> Option<&[(usize, CMatrix)]> {
        self.per_bath.as_deref()
    }

    pub fn part(&self, terminal: usize) -> Result<&CMatrix> {
        self.per_bath
            .as_ref()
            .and_then(|p| p.iter().find(|(t, _)| *t == terminal))
            .map(|(_, m)| m)
            .ok_or(QmeError::SplitUnavailable(terminal))
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        apply_matrix(&self.matrix, rho)
    }

    pub fn apply_part(&self, terminal: usize, rho: &CMatrix) -> Result<CMatrix> {
        apply_matrix(self.part(terminal)?, rho)
    }

    pub fn scaled(&self, factor: f64) -> Superoperator {
        let f = cr(factor);
        Superoperator {
            matrix: &self.matrix * f,
            dim: self.dim,
            convention: self.convention,
            per_bath: self
                .per_bath
                .as_ref()
                .map(|p| p.iter().map(|(t, m)| (*t, m * f)).collect()),
        }
    }

    /// max |vec(1)†·L|, zero for a trace-preserving map.
    pub fn trace_defect(&self) -> f64 {
        trace_defect(&self.matrix)
    }
}

pub fn apply_matrix(m: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    if m.ncols() != rho.len() {
        return Err(QmeError::DimensionMismatch { expected: m.ncols(), found: rho.len() });
    }
    unvectorize(&(m * vectorize(rho)))
}

pub fn trace_defect(m: &CMatrix) -> f64 {
    let d = integer_sqrt(m.nrows()).unwrap_or(0);
    let mut worst: f64 = 0.0;
    for col in 0..m.ncols() {
        let mut s = cr(0.0);
        for k in 0..d {
            s += m[(k * (d + 1), col)];
        }
        worst = worst.max(s.norm());
    }
    worst
}

pub fn sandwich_superop(a: &CMatrix, b: &CMatrix) -> Result<Superoperator> {
    if !a.is_square() || !b.is_square() || a.nrows() != b.nrows() {
        return Err(QmeError::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    Superoperator::new(sandwich(a, b))
}

/// Accumulates a superoperator term by term.
pub(crate) struct SuperopBuilder {
    pub m: CMatrix,
}

impl SuperopBuilder {
    pub fn new(dim: usize) -> Self {
        SuperopBuilder { m: CMatrix::zeros(dim * dim, dim * dim) }
    }

    pub fn sandwich(&mut self, coef: crate::linalg::C64, a: &CMatrix, b: &CMatrix) {
        self.m += sandwich(a, b) * coef;
    }

    pub fn left(&mut self, coef: crate::linalg::C64, a: &CMatrix) {
        self.m += left_multiply(a) * coef;
    }

    pub fn right(&mut self, coef: crate::linalg::C64, b: &CMatrix) {
        self.m += right_multiply(b) * coef;
    }
}
