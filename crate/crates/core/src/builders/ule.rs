use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bath::{ule_f_block, ule_g_block, Block2, PvQuadrature};
use crate::builders::lindblad::{Jump, LindbladChannel, LindbladForm};
use crate::builders::redfield::{hermitian_couplings, negligible};
use crate::builders::{check_epsilon, GeneratorKind, GeneratorParts};
use crate::error::Result;
use crate::linalg::{cr, hermitian_part, max_abs, CMatrix};
use crate::operator::OpenChain;

const PI: f64 = core::f64::consts::PI;

/// Universal Lindblad equation.
///
/// Per bath and k ∈ {1, 2}: L_k = 2πε Σ_{k'} g_{kk'}(E_γ − E_α) X^{k'}_{αγ} |α⟩⟨γ| with unit
/// rate, and H_LS = ε² Σ X^k_{αη} X^{k'}_{ηγ} f_{kk'}(E_α − E_η, E_γ − E_η) |α⟩⟨γ|.
pub fn build_ule(chain: &OpenChain, epsilon: f64, quad: &PvQuadrature) -> Result<GeneratorParts> {
    check_epsilon(epsilon)?;
    let basis = chain.basis();
    let d = basis.dim();
    let e = basis.energies();
    let mut channels = Vec::new();
    for (bath, s) in chain.coupled() {
        let x = hermitian_couplings(s);
        let xt = [basis.to_eigen(&x[0]), basis.to_eigen(&x[1])];
        let scale = max_abs(s);

        let mut jumps = Vec::new();
        for k in 0..2 {
            let mut l = CMatrix::zeros(d, d);
            for a in 0..d {
                for g in 0..d {
                    if negligible(xt[0][(a, g)], scale) && negligible(xt[1][(a, g)], scale) {
                        continue;
                    }
                    let gm = ule_g_block(bath, e[g] - e[a])?;
                    for kp in 0..2 {
                        l[(a, g)] += gm[(k, kp)] * xt[kp][(a, g)] * cr(2.0 * PI);
                    }
                }
            }
            jumps.push(Jump { operator: basis.from_eigen(&l), rate: 1.0 });
        }

        let mut cache: BTreeMap<(u64, u64), Block2> = BTreeMap::new();
        let mut h = CMatrix::zeros(d, d);
        for a in 0..d {
            for g in 0..d {
                for eta in 0..d {
                    let mut coef = [[cr(0.0); 2]; 2];
                    let mut any = false;
                    for k in 0..2 {
                        for kp in 0..2 {
                            coef[k][kp] = xt[k][(a, eta)] * xt[kp][(eta, g)];
                            any |= !negligible(coef[k][kp], scale * scale);
                        }
                    }
                    if !any {
                        continue;
                    }
                    let (p, q) = (e[a] - e[eta], e[g] - e[eta]);
                    let key = (p.to_bits(), q.to_bits());
                    let f = match cache.get(&key) {
                        Some(v) => *v,
                        None => {
                            let v = ule_f_block(bath, p, q, quad)?;
                            cache.insert(key, v);
                            v
                        }
                    };
                    for k in 0..2 {
                        for kp in 0..2 {
                            h[(a, g)] += coef[k][kp] * f[(k, kp)];
                        }
                    }
                }
            }
        }
        channels.push(LindbladChannel {
            terminal: bath.terminal(),
            lamb_shift: hermitian_part(&basis.from_eigen(&h)),
            jumps,
        });
    }
    let form = LindbladForm { channels }.scaled(epsilon * epsilon);
    Ok(GeneratorParts {
        kind: GeneratorKind::Universal,
        hamiltonian: chain.system().hamiltonian().clone(),
        dissipator: form.superoperator()?,
        epsilon,
        lindblad: Some(form),
        warnings: Vec::new(),
    })
}
