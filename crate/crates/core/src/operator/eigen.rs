use alloc::vec::Vec;

use crate::error::{QmeError, Result};
use crate::linalg::{hermitian_eigen, is_hermitian, CMatrix};
use crate::operator::spin::SpinChainSystem;

/// Default degeneracy tolerance, relative to the spectral width.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EigenBasis {
    energies: Vec<f64>,
    vectors: CMatrix,
    number_labels: Vec<usize>,
    min_gap: f64,
}

impl EigenBasis {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Columns are the eigenkets |E_α⟩.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn number_labels(&self) -> &[usize] {
        &self.number_labels
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn width(&self) -> f64 {
        self.energies[self.dim() - 1] - self.energies[0]
    }

    /// U†AU.
    pub fn to_eigen(&self, a: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * a * &self.vectors
    }

    /// UAU†.
    pub fn from_eigen(&self, a: &CMatrix) -> CMatrix {
        &self.vectors * a * self.vectors.adjoint()
    }

    /// |E_α⟩⟨E_γ| in the site basis.
    pub fn projector(&self, alpha: usize, gamma: usize) -> CMatrix {
        self.vectors.column(alpha) * self.vectors.column(gamma).adjoint()
    }
}

/// Diagonalize H_S. When N_S is diagonal in the site basis, each excitation sector is
/// diagonalized separately so eigenvectors carry an exact label.
pub fn eigendecompose(system: &SpinChainSystem, degeneracy_tol: f64) -> Result<EigenBasis> {
    let h = system.hamiltonian();
    let number = system.number();
    if !is_hermitian(h, 1e-12) {
        return Err(QmeError::NotHermitian { defect: crate::linalg::hermiticity_defect(h) });
    }
    let dim = h.nrows();
    let diag_number = (0..dim).all(|i| (0..dim).all(|j| i == j || number[(i, j)].norm() == 0.0));

    let mut pairs: Vec<(f64, nalgebra::DVector<crate::linalg::C64>)> = Vec::with_capacity(dim);
    if diag_number {
        let mut sectors: Vec<(i64, Vec<usize>)> = Vec::new();
        for i in 0..dim {
            let label = libm::round(number[(i, i)].re) as i64;
            match sectors.iter_mut().find(|(l, _)| *l == label) {
                Some((_, idx)) => idx.push(i),
                None => sectors.push((label, alloc::vec![i])),
            }
        }
        for (_, idx) in &sectors {
            let m = idx.len();
            let block = CMatrix::from_fn(m, m, |a, b| h[(idx[a], idx[b])]);
            let (e, v) = hermitian_eigen(&block);
            for k in 0..m {
                let mut full = nalgebra::DVector::zeros(dim);
                for (a, &i) in idx.iter().enumerate() {
                    full[i] = v[(a, k)];
                }
                pairs.push((e[k], full));
            }
        }
        // a block structure must leave nothing outside the sectors
        let leak = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .filter(|&(i, j)| number[(i, i)] != number[(j, j)])
            .fold(0.0f64, |m, (i, j)| m.max(h[(i, j)].norm()));
        if leak > 0.0 {
            return Err(QmeError::SymmetryBroken { index: 0, value: leak });
        }
    } else {
        let (e, v) = hermitian_eigen(h);
        for (k, &ek) in e.iter().enumerate() {
            pairs.push((ek, v.column(k).into_owned()));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let energies: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = CMatrix::zeros(dim, dim);
    for (k, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(k, v);
    }

    let mut number_labels = Vec::with_capacity(dim);
    for k in 0..dim {
        let v = vectors.column(k);
        let val = (v.adjoint() * number * v)[(0, 0)].re;
        let r = libm::round(val);
        if (val - r).abs() > 1e-8 || r < 0.0 {
            return Err(QmeError::SymmetryBroken { index: k, value: val });
        }
        number_labels.push(r as usize);
    }

    let width = energies[dim - 1] - energies[0];
    let min_gap = energies.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let tolerance = degeneracy_tol * width;
    if dim > 1 && !(min_gap > tolerance) {
        return Err(QmeError::DegenerateSpectrum { gap: min_gap, tolerance });
    }
    Ok(EigenBasis { energies, vectors, number_labels, min_gap })
}
