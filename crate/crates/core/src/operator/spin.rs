//! Spin-1/2 chain operators and the XXZ Hamiltonian.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{QmeError, Result};
use crate::linalg::{c, commutator, cr, identity, kron, max_abs, CMatrix};

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

/// |↑⟩⟨↓| with |↑⟩ the first basis vector.
pub fn sigma_plus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)])
}

pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(1.0), cr(0.0)])
}

/// Embed a one-site operator at `site` (1-based, site 1 is the leftmost factor).
pub fn site_operator(n_sites: usize, site: usize, op: &CMatrix) -> CMatrix {
    assert!(site >= 1 && site <= n_sites, "site {site} outside 1..={n_sites}");
    let left = identity(1 << (site - 1));
    let right = identity(1 << (n_sites - site));
    kron(&kron(&left, op), &right)
}

#[derive(Debug, Clone)]
pub struct SpinChainSystem {
    n_sites: usize,
    fields: Vec<f64>,
    coupling: f64,
    anisotropy: f64,
    hamiltonian: CMatrix,
    number: CMatrix,
    left: CMatrix,
    middle: CMatrix,
    right: CMatrix,
    couplings: Vec<(usize, CMatrix)>,
}

impl SpinChainSystem {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    /// Excitation number Σ σ₊σ₋.
    pub fn number(&self) -> &CMatrix {
        &self.number
    }

    pub fn h_left(&self) -> &CMatrix {
        &self.left
    }

    pub fn h_middle(&self) -> &CMatrix {
        &self.middle
    }

    pub fn h_right(&self) -> &CMatrix {
        &self.right
    }

    /// Terminal sites with their bath coupling operator σ₋.
    pub fn couplings(&self) -> &[(usize, CMatrix)] {
        &self.couplings
    }

    pub fn coupling_operator(&self, terminal: usize) -> Option<&CMatrix> {
        self.couplings.iter().find(|(t, _)| *t == terminal).map(|(_, s)| s)
    }

    pub fn terminals(&self) -> Vec<usize> {
        self.couplings.iter().map(|(t, _)| *t).collect()
    }

    pub fn sigma_z(&self, site: usize) -> CMatrix {
        site_operator(self.n_sites, site, &sigma_z())
    }

    pub fn sigma_plus(&self, site: usize) -> CMatrix {
        site_operator(self.n_sites, site, &sigma_plus())
    }

    pub fn sigma_minus(&self, site: usize) -> CMatrix {
        site_operator(self.n_sites, site, &sigma_minus())
    }

    /// M_z = Σ σz.
    pub fn magnetization(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for s in 1..=self.n_sites {
            m += self.sigma_z(s);
        }
        m
    }

    /// σxσx + σyσy + Δσzσz on bond (j, j+1).
    pub fn bond_operator(&self, j: usize) -> CMatrix {
        bond(self.n_sites, j, self.anisotropy)
    }

    /// Spin current operator 4ig(σ₊ʲσ₋ʲ⁺¹ − σ₋ʲσ₊ʲ⁺¹).
    pub fn bond_current_operator(&self, j: usize) -> CMatrix {
        let a = self.sigma_plus(j) * self.sigma_minus(j + 1);
        let b = self.sigma_minus(j) * self.sigma_plus(j + 1);
        (a - b) * c(0.0, 4.0 * self.coupling)
    }

    /// Operators that commute with both couplings: H_M, interior σz and interior bonds.
    pub fn conserved_candidates(&self) -> Vec<CMatrix> {
        let n = self.n_sites;
        let mut out = Vec::new();
        if n < 3 {
            return out;
        }
        out.push(self.middle.clone());
        for s in 2..n {
            out.push(self.sigma_z(s));
        }
        for j in 2..n.saturating_sub(1) {
            out.push(self.bond_operator(j));
        }
        out
    }
}

fn bond(n_sites: usize, j: usize, delta: f64) -> CMatrix {
    let xx = site_operator(n_sites, j, &sigma_x()) * site_operator(n_sites, j + 1, &sigma_x());
    let yy = site_operator(n_sites, j, &sigma_y()) * site_operator(n_sites, j + 1, &sigma_y());
    let zz = site_operator(n_sites, j, &sigma_z()) * site_operator(n_sites, j + 1, &sigma_z());
    xx + yy + zz * cr(delta)
}

/// H_S = Σ ω_ℓ σz^ℓ/2 − g Σ (σxσx + σyσy + Δσzσz), coupled at sites 1 and N through σ₋.
///
/// Partition: H_L = on-site(1) + bond(1,2), H_R = on-site(N) + bond(N−1,N), H_M the
/// rest. For two sites H_M = 0 and the bond is shared equally; for one site
/// H_L = H_R = 0.
pub fn build_xxz(n_sites: usize, fields: &[f64], g: f64, delta: f64) -> Result<SpinChainSystem> {
    if n_sites == 0 || n_sites > 12 {
        return Err(QmeError::InvalidArgument(format!("n_sites = {n_sites} outside 1..=12")));
    }
    if fields.len() != n_sites {
        return Err(QmeError::DimensionMismatch { expected: n_sites, found: fields.len() });
    }
    if fields.iter().any(|w| !w.is_finite()) {
        return Err(QmeError::NonFinite("fields"));
    }
    if !g.is_finite() {
        return Err(QmeError::NonFinite("coupling g"));
    }
    if !delta.is_finite() {
        return Err(QmeError::NonFinite("anisotropy"));
    }
    let n = n_sites;
    let dim = 1usize << n;
    let onsite = |s: usize| site_operator(n, s, &sigma_z()) * cr(0.5 * fields[s - 1]);
    let bonds: Vec<CMatrix> = (1..n).map(|j| bond(n, j, delta) * cr(-g)).collect();

    let zero = CMatrix::zeros(dim, dim);
    let (left, middle, right) = match n {
        1 => (zero.clone(), onsite(1), zero),
        2 => {
            let half = &bonds[0] * cr(0.5);
            (onsite(1) + &half, zero, onsite(2) + half)
        }
        _ => {
            let mut mid = zero;
            for s in 2..n {
                mid += onsite(s);
            }
            for b in &bonds[1..n - 2] {
                mid += b;
            }
            (onsite(1) + &bonds[0], mid, onsite(n) + &bonds[n - 2])
        }
    };
    let hamiltonian = &left + &middle + &right;

    let mut number = CMatrix::zeros(dim, dim);
    for s in 1..=n {
        number += site_operator(n, s, &(sigma_plus() * sigma_minus()));
    }

    let mut couplings = alloc::vec![(1, site_operator(n, 1, &sigma_minus()))];
    if n > 1 {
        couplings.push((n, site_operator(n, n, &sigma_minus())));
    }

    let scale = max_abs(&hamiltonian).max(1.0);
    if max_abs(&commutator(&number, &hamiltonian)) > 1e-12 * scale {
        return Err(QmeError::InvalidArgument("H_S does not conserve N_S".into()));
    }
    if n > 1 {
        for (_, s) in &couplings {
            let herm = s + s.adjoint();
            let anti = s - s.adjoint();
            if max_abs(&commutator(&middle, &herm)) > 1e-12 * scale
                || max_abs(&commutator(&middle, &anti)) > 1e-12 * scale
            {
                return Err(QmeError::InvalidArgument("H_M does not commute with the coupling".into()));
            }
        }
    }

    Ok(SpinChainSystem {
        n_sites: n,
        fields: fields.to_vec(),
        coupling: g,
        anisotropy: delta,
        hamiltonian,
        number,
        left,
        middle,
        right,
        couplings,
    })
}
