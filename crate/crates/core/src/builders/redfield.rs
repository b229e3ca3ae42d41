use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bath::{hermitian_coupling_spectrum, redfield_c, redfield_d, BathSpec, Block2, PvQuadrature};
use crate::builders::{check_epsilon, eps2, GeneratorKind, GeneratorParts};
use crate::error::Result;
use crate::linalg::{c, cr, max_abs, CMatrix, C64};
use crate::operator::superop::SuperopBuilder;
use crate::operator::{EigenBasis, OpenChain, Superoperator};

pub(crate) fn negligible(x: C64, scale: f64) -> bool {
    x.norm() <= 1e-14 * scale
}

/// Memoized (C(E), D(E)) for one bath.
pub(crate) struct CdCache<'a> {
    bath: &'a BathSpec,
    quad: &'a PvQuadrature,
    map: BTreeMap<u64, (C64, C64)>,
}

impl<'a> CdCache<'a> {
    pub fn new(bath: &'a BathSpec, quad: &'a PvQuadrature) -> Self {
        CdCache { bath, quad, map: BTreeMap::new() }
    }

    pub fn get(&mut self, e: f64) -> Result<(C64, C64)> {
        if let Some(v) = self.map.get(&e.to_bits()) {
            return Ok(*v);
        }
        let v = (redfield_c(self.bath, e, self.quad)?, redfield_d(self.bath, e, self.quad)?);
        self.map.insert(e.to_bits(), v);
        Ok(v)
    }
}

/// Redfield generator from the eigenpair sums with C and D:
/// L[ρ] = −ε²([ρA_C, S†] + [S†, A_Dρ] + h.c.), A_C = Σ C(E_γ − E_α) S_αγ |α⟩⟨γ|.
pub fn build_redfield(chain: &OpenChain, epsilon: f64, quad: &PvQuadrature) -> Result<GeneratorParts> {
    check_epsilon(epsilon)?;
    let mut parts = Vec::new();
    for (bath, s) in chain.coupled() {
        parts.push((bath.terminal(), redfield_part(chain.basis(), bath, s, quad)? * eps2(epsilon)));
    }
    Ok(GeneratorParts {
        kind: GeneratorKind::Redfield,
        hamiltonian: chain.system().hamiltonian().clone(),
        dissipator: Superoperator::from_parts(parts)?,
        epsilon,
        lindblad: None,
        warnings: Vec::new(),
    })
}

fn redfield_part(basis: &EigenBasis, bath: &BathSpec, s: &CMatrix, quad: &PvQuadrature) -> Result<CMatrix> {
    let d = basis.dim();
    let e = basis.energies();
    let st = basis.to_eigen(s);
    let scale = max_abs(s);
    let mut cache = CdCache::new(bath, quad);
    let mut ac = CMatrix::zeros(d, d);
    let mut ad = CMatrix::zeros(d, d);
    for a in 0..d {
        for g in 0..d {
            if negligible(st[(a, g)], scale) {
                continue;
            }
            let (cc, dd) = cache.get(e[g] - e[a])?;
            ac[(a, g)] = cc * st[(a, g)];
            ad[(a, g)] = dd * st[(a, g)];
        }
    }
    let ac = basis.from_eigen(&ac);
    let ad = basis.from_eigen(&ad);
    let sd = s.adjoint();
    let acd = ac.adjoint();
    let add = ad.adjoint();
    let one = cr(1.0);
    let mut b = SuperopBuilder::new(d);
    b.right(one, &(&ac * &sd));
    b.sandwich(-one, &sd, &ac);
    b.left(one, &(&sd * &ad));
    b.sandwich(-one, &ad, &sd);
    b.left(one, &(s * &acd));
    b.sandwich(-one, &acd, s);
    b.right(one, &(&add * s));
    b.sandwich(-one, s, &add);
    Ok(b.m * cr(-1.0))
}

/// Redfield generator written with the Hermitian couplings X₁ = S + S†, X₂ = i(S − S†):
/// L[ρ] = −ε² Σ_{λλ'} ([X_λ, X_{λ'λ}ρ] + h.c.).
pub fn build_redfield_hermitian(
    chain: &OpenChain,
    epsilon: f64,
    quad: &PvQuadrature,
) -> Result<GeneratorParts> {
    check_epsilon(epsilon)?;
    let mut parts = Vec::new();
    for (bath, s) in chain.coupled() {
        parts.push((bath.terminal(), hermitian_part(chain.basis(), bath, s, quad)? * eps2(epsilon)));
    }
    Ok(GeneratorParts {
        kind: GeneratorKind::Redfield,
        hamiltonian: chain.system().hamiltonian().clone(),
        dissipator: Superoperator::from_parts(parts)?,
        epsilon,
        lindblad: None,
        warnings: Vec::new(),
    })
}

pub(crate) fn hermitian_couplings(s: &CMatrix) -> [CMatrix; 2] {
    [s + s.adjoint(), (s - s.adjoint()) * c(0.0, 1.0)]
}

fn hermitian_part(basis: &EigenBasis, bath: &BathSpec, s: &CMatrix, quad: &PvQuadrature) -> Result<CMatrix> {
    let d = basis.dim();
    let e = basis.energies();
    let x = hermitian_couplings(s);
    let xt = [basis.to_eigen(&x[0]), basis.to_eigen(&x[1])];
    let scale = max_abs(s);
    let mut cache: BTreeMap<u64, Block2> = BTreeMap::new();
    let one = cr(1.0);
    let mut b = SuperopBuilder::new(d);
    for k in 0..2 {
        let mut z = CMatrix::zeros(d, d);
        for eta in 0..d {
            for g in 0..d {
                if negligible(xt[0][(eta, g)], scale) && negligible(xt[1][(eta, g)], scale) {
                    continue;
                }
                let w = e[g] - e[eta];
                let gamma = match cache.get(&w.to_bits()) {
                    Some(v) => *v,
                    None => {
                        let v = hermitian_coupling_spectrum(bath, w, quad)?;
                        cache.insert(w.to_bits(), v);
                        v
                    }
                };
                for kp in 0..2 {
                    z[(eta, g)] += xt[kp][(eta, g)] * gamma[(k, kp)];
                }
            }
        }
        let z = basis.from_eigen(&z);
        let zd = z.adjoint();
        b.left(one, &(&x[k] * &z));
        b.sandwich(-one, &z, &x[k]);
        b.right(one, &(&zd * &x[k]));
        b.sandwich(-one, &x[k], &zd);
    }
    Ok(b.m * cr(-1.0))
}
