use alloc::format;
use alloc::vec::Vec;

use crate::bath::{occupation, pv_halfline, PvQuadrature};
use crate::builders::lindblad::{Jump, LindbladChannel, LindbladForm};
use crate::builders::{check_epsilon, GeneratorKind, GeneratorParts};
use crate::error::{QmeError, Result};
use crate::linalg::cr;
use crate::operator::OpenChain;

const PI: f64 = core::f64::consts::PI;

/// Local Lindblad equation: each terminal spin relaxes as if isolated at its own field.
///
/// Rates ε²J(ω₀)(n+1) on σ₋ and ε²J(ω₀)n on σ₊; Lamb shift (Δ̄ + 2Δ̄′)σz/2 with
/// Δ̄ = (ε²/2π)𝒫∫J(ω)/(ω₀ − ω) and Δ̄′ the same with J·n.
pub fn build_local_lindblad(chain: &OpenChain, epsilon: f64, quad: &PvQuadrature) -> Result<GeneratorParts> {
    check_epsilon(epsilon)?;
    let system = chain.system();
    let mut channels = Vec::new();
    for (bath, s) in chain.coupled() {
        let site = bath.terminal();
        let w0 = system.fields()[site - 1];
        if !(w0 > 0.0) {
            return Err(QmeError::InvalidArgument(format!("local Lindblad needs a positive field at site {site}")));
        }
        let j = bath.spectral().eval(w0);
        let n = occupation(bath, w0)?;
        let upper = bath.spectral().support().max(2.0 * w0);
        let dbar = -pv_halfline(&|w| Ok(bath.spectral().eval(w)), w0, upper, quad)? / (2.0 * PI);
        let dprime = -pv_halfline(&|w| bath.jn(w), w0, upper, quad)? / (2.0 * PI);
        channels.push(LindbladChannel {
            terminal: site,
            lamb_shift: system.sigma_z(site) * cr(0.5 * (dbar + 2.0 * dprime)),
            jumps: alloc::vec![
                Jump { operator: s.clone(), rate: j * (n + 1.0) },
                Jump { operator: s.adjoint(), rate: j * n },
            ],
        });
    }
    let form = LindbladForm { channels }.scaled(epsilon * epsilon);
    Ok(GeneratorParts {
        kind: GeneratorKind::LocalLindblad,
        hamiltonian: system.hamiltonian().clone(),
        dissipator: form.superoperator()?,
        epsilon,
        lindblad: Some(form),
        warnings: Vec::new(),
    })
}
