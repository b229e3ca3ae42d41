#![allow(dead_code)]

use qme_core::bath::{BathSpec, PvQuadrature};
use qme_core::builders::{
    build_eigenbasis_lindblad, build_local_lindblad, build_redfield, build_ule, GeneratorKind,
    GeneratorParts, DEFAULT_SECULAR_TOL,
};
use qme_core::operator::{build_xxz, OpenChain, DEFAULT_DEGENERACY_TOL};

pub const DELTA: f64 = 0.3;
pub const MU: f64 = -0.5;
pub const CUTOFF: f64 = 10.0;

pub fn chain(fields: &[f64], g: f64, betas: &[f64]) -> OpenChain {
    let n = fields.len();
    let system = build_xxz(n, fields, g, DELTA).unwrap();
    let terminals: Vec<usize> = if n == 1 { vec![1] } else { vec![1, n] };
    let baths = terminals
        .iter()
        .zip(betas)
        .map(|(&t, &b)| BathSpec::ohmic(t, b, MU, CUTOFF).unwrap())
        .collect();
    OpenChain::new(system, baths, DEFAULT_DEGENERACY_TOL).unwrap()
}

pub fn uniform3(g: f64, bl: f64, br: f64) -> OpenChain {
    chain(&[1.0, 1.0, 1.0], g, &[bl, br])
}

pub fn qubit(beta: f64) -> OpenChain {
    chain(&[1.0], 0.0, &[beta])
}

pub fn build(kind: GeneratorKind, chain: &OpenChain, eps: f64) -> GeneratorParts {
    let q = PvQuadrature::default();
    match kind {
        GeneratorKind::Redfield => build_redfield(chain, eps, &q),
        GeneratorKind::LocalLindblad => build_local_lindblad(chain, eps, &q),
        GeneratorKind::EigenbasisLindblad => build_eigenbasis_lindblad(chain, eps, &q, DEFAULT_SECULAR_TOL),
        GeneratorKind::Universal => build_ule(chain, eps, &q),
    }
    .unwrap()
}
