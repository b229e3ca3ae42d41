use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bath::PvQuadrature;
use crate::builders::lindblad::{Jump, LindbladChannel, LindbladForm};
use crate::builders::redfield::{negligible, CdCache};
use crate::builders::{check_epsilon, GeneratorKind, GeneratorParts};
use crate::error::{QmeError, Result};
use crate::linalg::{max_abs, CMatrix};
use crate::operator::OpenChain;

/// Default Bohr-frequency matching tolerance, relative to the spectral width.
pub const DEFAULT_SECULAR_TOL: f64 = 1e-9;

/// Eigenbasis (secular) Lindblad equation.
///
/// Transitions of the coupling are grouped by Bohr frequency Ω (within
/// `secular_tol` × spectral width). Each group gives A_Ω with rate 2 Re D(Ω) and
/// A_Ω† with rate 2 Re C(Ω), plus Lamb shift Im D(Ω)·A†A − Im C(Ω)·AA†.
pub fn build_eigenbasis_lindblad(
    chain: &OpenChain,
    epsilon: f64,
    quad: &PvQuadrature,
    secular_tol: f64,
) -> Result<GeneratorParts> {
    check_epsilon(epsilon)?;
    if !(secular_tol > 0.0) {
        return Err(QmeError::InvalidArgument("secular_tol must be positive".into()));
    }
    let basis = chain.basis();
    let d = basis.dim();
    let e = basis.energies();
    let width = basis.width();
    let tol = secular_tol * width;
    let mut warnings: Vec<String> = Vec::new();
    let mut channels = Vec::new();
    for (bath, s) in chain.coupled() {
        let st = basis.to_eigen(s);
        let scale = max_abs(s);
        let mut transitions: Vec<(f64, usize, usize)> = Vec::new();
        for a in 0..d {
            for g in 0..d {
                if !negligible(st[(a, g)], scale) {
                    transitions.push((e[g] - e[a], a, g));
                }
            }
        }
        transitions.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut clusters: Vec<Vec<(f64, usize, usize)>> = Vec::new();
        for t in transitions {
            match clusters.last_mut() {
                Some(cl) if t.0 - cl[cl.len() - 1].0 <= tol => cl.push(t),
                _ => clusters.push(alloc::vec![t]),
            }
        }

        let mut cache = CdCache::new(bath, quad);
        let mut jumps = Vec::new();
        let mut lamb = CMatrix::zeros(d, d);
        for cl in &clusters {
            let omega = cl.iter().map(|t| t.0).sum::<f64>() / cl.len() as f64;
            let spread = cl[cl.len() - 1].0 - cl[0].0;
            if spread > 64.0 * f64::EPSILON * width.max(1.0) {
                warnings.push(format!(
                    "terminal {}: Bohr frequencies near {omega:.6} merged with spread {spread:e}",
                    bath.terminal()
                ));
            }
            let mut at = CMatrix::zeros(d, d);
            for &(_, a, g) in cl {
                at[(a, g)] = st[(a, g)];
            }
            let a_op = basis.from_eigen(&at);
            let (cc, dd) = cache.get(omega)?;
            let ad = a_op.adjoint();
            lamb += (&ad * &a_op) * crate::linalg::cr(dd.im) - (&a_op * &ad) * crate::linalg::cr(cc.im);
            if dd.re > 0.0 {
                jumps.push(Jump { operator: a_op.clone(), rate: 2.0 * dd.re });
            }
            if cc.re > 0.0 {
                jumps.push(Jump { operator: ad, rate: 2.0 * cc.re });
            }
        }
        channels.push(LindbladChannel {
            terminal: bath.terminal(),
            lamb_shift: crate::linalg::hermitian_part(&lamb),
            jumps,
        });
    }
    let form = LindbladForm { channels }.scaled(epsilon * epsilon);
    Ok(GeneratorParts {
        kind: GeneratorKind::EigenbasisLindblad,
        hamiltonian: chain.system().hamiltonian().clone(),
        dissipator: form.superoperator()?,
        epsilon,
        lindblad: Some(form),
        warnings,
    })
}
