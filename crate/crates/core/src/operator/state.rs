use alloc::vec::Vec;

use crate::error::{QmeError, Result};
use crate::linalg::{cr, hermitian_eigen, hermitian_eigenvalues, hermiticity_defect, max_abs, CMatrix};
use crate::operator::spin::SpinChainSystem;

/// Hermitian, unit-trace matrix. Positivity is queried, not enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        Self::with_tolerance(rho, 1e-12)
    }

    pub fn with_tolerance(rho: CMatrix, tol: f64) -> Result<Self> {
        if !rho.is_square() {
            return Err(QmeError::DimensionMismatch { expected: rho.nrows(), found: rho.ncols() });
        }
        if !crate::linalg::all_finite(&rho) {
            return Err(QmeError::NonFinite("density matrix"));
        }
        let defect = hermiticity_defect(&rho);
        if defect > tol * max_abs(&rho).max(1.0) {
            return Err(QmeError::NonHermitianState { residue: defect });
        }
        let tr = rho.trace();
        if (tr - cr(1.0)).norm() > tol {
            return Err(QmeError::InvalidArgument(alloc::format!("trace {tr} differs from 1")));
        }
        Ok(DensityMatrix { rho })
    }

    /// Hermitize and normalize the trace.
    pub fn from_unnormalized(rho: &CMatrix) -> Result<Self> {
        let h = crate::linalg::hermitian_part(rho);
        let tr = h.trace().re;
        if !(tr.abs() > 0.0) || !tr.is_finite() {
            return Err(QmeError::TracelessNullVector { trace: tr });
        }
        Ok(DensityMatrix { rho: h * cr(1.0 / tr) })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.rho)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn expectation(&self, op: &CMatrix) -> crate::linalg::C64 {
        (&self.rho * op).trace()
    }

    /// Pure state |ψ⟩⟨ψ| from an unnormalized ket.
    pub fn pure(psi: &crate::linalg::CVector) -> Result<Self> {
        let n = psi.norm();
        if !(n > 0.0) {
            return Err(QmeError::InvalidArgument("zero ket".into()));
        }
        let v = psi / cr(n);
        Ok(DensityMatrix { rho: &v * v.adjoint() })
    }
}

/// ½ Σ|λ_i(ρ₁ − ρ₂)|.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(QmeError::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    for m in [a, b] {
        let d = hermiticity_defect(m);
        if d > 1e-10 * max_abs(m).max(1.0) {
            return Err(QmeError::NotHermitian { defect: d });
        }
    }
    Ok(0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>())
}

/// e^{−β(H_S − μN_S)}/Z, with exponents shifted by their maximum.
pub fn gibbs_state(system: &SpinChainSystem, beta: f64, mu: f64) -> Result<DensityMatrix> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(QmeError::InvalidArgument(alloc::format!("beta = {beta} must be positive")));
    }
    if !mu.is_finite() {
        return Err(QmeError::NonFinite("mu"));
    }
    let g = system.hamiltonian() - system.number() * cr(mu);
    let (e, u) = hermitian_eigen(&g);
    let top = e.iter().map(|&x| -beta * x).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = e.iter().map(|&x| libm::exp(-beta * x - top)).collect();
    let z: f64 = w.iter().sum();
    let diag = crate::linalg::CVector::from_iterator(w.len(), w.iter().map(|&p| cr(p / z)));
    let rho = &u * CMatrix::from_diagonal(&diag) * u.adjoint();
    Ok(DensityMatrix { rho: crate::linalg::hermitian_part(&rho) })
}
