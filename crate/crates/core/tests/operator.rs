mod common;

use common::*;
use proptest::prelude::*;
use qme_core::builders::GeneratorKind;
use qme_core::diagnostics::{random_density_matrix, random_panel};
use qme_core::linalg::{c, commutator, cr, hermitian_eigenvalues, hermiticity_defect, max_abs, CMatrix};
use qme_core::operator::superop::{dissipator_superop, hamiltonian_superop, sandwich, trace_defect};
use qme_core::operator::{
    build_xxz, eigendecompose, gibbs_state, sandwich_superop, trace_distance, unvectorize, vectorize,
    DEFAULT_DEGENERACY_TOL,
};
use qme_core::QmeError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_matrix(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    use rand::Rng;
    CMatrix::from_fn(d, d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn assert_spectrum(n: usize, fields: &[f64], g: f64, delta: f64, want: &[f64]) {
    let s = build_xxz(n, fields, g, delta).unwrap();
    let e = hermitian_eigenvalues(s.hamiltonian());
    assert_eq!(e.len(), want.len());
    for (a, b) in e.iter().zip(want) {
        assert!((a - b).abs() < 1e-13, "{e:?} vs {want:?}");
    }
}

#[test]
fn xxz_spectra() {
    assert_spectrum(1, &[1.0], 0.0, 1.0, &[-0.5, 0.5]);
    assert_spectrum(2, &[1.0, 1.0], 0.0, 1.0, &[-1.0, 0.0, 0.0, 1.0]);
    let (g, d) = (0.2, 1.0);
    assert_spectrum(2, &[1.0, 1.0], g, d, &[-1.0 - g * d, g * d - 2.0 * g, g * d + 2.0 * g, 1.0 - g * d]);
}

#[test]
fn xxz_invariants() {
    let s = build_xxz(3, &[1.0, 1.5, 2.0], 0.5, DELTA).unwrap();
    assert!(max_abs(&commutator(s.number(), s.hamiltonian())) < 1e-12);
    for (_, op) in s.couplings() {
        let herm = op + op.adjoint();
        assert!(max_abs(&commutator(s.h_middle(), &herm)) < 1e-12);
    }
    for h in [s.h_left(), s.h_middle(), s.h_right()] {
        assert_eq!(hermiticity_defect(h), 0.0);
    }
    assert_eq!(s.terminals(), vec![1, 3]);
}

#[test]
fn eigenbasis_labels() {
    let s = build_xxz(1, &[1.0], 0.0, 1.0).unwrap();
    let b = eigendecompose(&s, DEFAULT_DEGENERACY_TOL).unwrap();
    assert_eq!(b.energies(), &[-0.5, 0.5]);
    assert_eq!(b.number_labels(), &[0, 1]);

    let s = build_xxz(3, &[1.0; 3], 0.5, DELTA).unwrap();
    let b = eigendecompose(&s, DEFAULT_DEGENERACY_TOL).unwrap();
    let mut labels = b.number_labels().to_vec();
    labels.sort();
    assert_eq!(labels, vec![0, 1, 1, 1, 2, 2, 2, 3]);
    let u = b.vectors();
    assert!(max_abs(&(u.adjoint() * u - CMatrix::identity(8, 8))) < 1e-12);
    let diag = b.to_eigen(s.hamiltonian());
    for i in 0..8 {
        for j in 0..8 {
            if i != j {
                assert!(diag[(i, j)].norm() < 1e-10);
            }
        }
    }
}

#[test]
fn isotropic_uniform_chain_is_degenerate() {
    let s = build_xxz(3, &[1.0; 3], 0.5, 1.0).unwrap();
    assert!(matches!(eigendecompose(&s, DEFAULT_DEGENERACY_TOL), Err(QmeError::DegenerateSpectrum { .. })));
    let s = build_xxz(2, &[1.0, 1.0], 0.0, 1.0).unwrap();
    assert!(matches!(eigendecompose(&s, DEFAULT_DEGENERACY_TOL), Err(QmeError::DegenerateSpectrum { .. })));
}

#[test]
fn vectorization_conventions() {
    let v = vectorize(&CMatrix::identity(2, 2));
    assert_eq!(v.as_slice(), &[cr(1.0), cr(0.0), cr(0.0), cr(1.0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let r = random_matrix(8, &mut rng);
    assert_eq!(unvectorize(&vectorize(&r)).unwrap(), r);
    for _ in 0..20 {
        let (a, b, rho) = (random_matrix(4, &mut rng), random_matrix(4, &mut rng), random_matrix(4, &mut rng));
        let direct = &a * &rho * &b;
        let via = unvectorize(&(sandwich(&a, &b) * vectorize(&rho))).unwrap();
        assert!(max_abs(&(direct - via)) < 1e-12);
    }
}

#[test]
fn larmor_precession() {
    let sz = CMatrix::from_row_slice(2, 2, &[cr(0.5), cr(0.0), cr(0.0), cr(-0.5)]);
    let rho = CMatrix::from_row_slice(2, 2, &[cr(0.5), cr(0.5), cr(0.5), cr(0.5)]);
    let out = unvectorize(&(hamiltonian_superop(&sz) * vectorize(&rho))).unwrap();
    // σy/2
    let want = CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -0.5), c(0.0, 0.5), cr(0.0)]);
    assert!(max_abs(&(out - want)) < 1e-15);
}

#[test]
fn dissipator_is_trace_preserving() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let l = random_matrix(4, &mut rng);
        assert!(trace_defect(&dissipator_superop(&l)) < 1e-12);
    }
    let s = sandwich_superop(&CMatrix::identity(4, 4), &CMatrix::identity(4, 4)).unwrap();
    assert_eq!(*s.matrix(), CMatrix::identity(16, 16));
}

#[test]
fn trace_distance_examples() {
    let up = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
    let down = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)]);
    assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-15);
    let bad = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(1.0), cr(0.0), cr(0.0)]);
    assert!(trace_distance(&bad, &up).is_err());
}

#[test]
fn gibbs_properties() {
    let s = build_xxz(3, &[1.0, 1.5, 2.0], 0.5, DELTA).unwrap();
    let hot = gibbs_state(&s, 1e-9, -0.5).unwrap();
    assert!(max_abs(&(hot.matrix() - CMatrix::identity(8, 8) * cr(0.125))) < 1e-8);
    let r = gibbs_state(&s, 1.0, -0.5).unwrap();
    assert!(max_abs(&commutator(r.matrix(), s.hamiltonian())) < 1e-12);
    assert!(max_abs(&commutator(r.matrix(), s.number())) < 1e-12);
    assert!((r.matrix().trace().re - 1.0).abs() < 1e-12);
}

#[test]
fn generators_return_traceless_hermitian() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let panel = random_panel(8, 100, 11);
    for k in GeneratorKind::ALL {
        let p = build(k, &chain, 0.1);
        for rho in &panel {
            let out = p.dissipator.apply(rho.matrix()).unwrap();
            let full = unvectorize(&(p.liouvillian() * vectorize(rho.matrix()))).unwrap();
            for m in [out, full] {
                assert!(m.trace().norm() < 1e-10, "{k:?}");
                assert!(hermiticity_defect(&m) < 1e-10, "{k:?}");
            }
        }
    }
}

proptest! {
    #[test]
    fn vec_roundtrip(d in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_matrix(d, &mut rng);
        prop_assert_eq!(unvectorize(&vectorize(&r)).unwrap(), r);
    }

    #[test]
    fn trace_distance_symmetric_and_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density_matrix(4, &mut rng);
        let b = random_density_matrix(4, &mut rng);
        let ab = trace_distance(a.matrix(), b.matrix()).unwrap();
        let ba = trace_distance(b.matrix(), a.matrix()).unwrap();
        prop_assert!((ab - ba).abs() < 1e-14);
        prop_assert!((0.0..=1.0 + 1e-14).contains(&ab));
    }

    #[test]
    fn eigenbasis_reconstructs(w2 in 0.5f64..2.0, w3 in 0.5f64..2.0, g in 0.05f64..1.0) {
        let s = build_xxz(3, &[1.0, w2, w3], g, DELTA).unwrap();
        if let Ok(b) = eigendecompose(&s, DEFAULT_DEGENERACY_TOL) {
            let d = CMatrix::from_diagonal(&qme_core::CVector::from_iterator(8, b.energies().iter().map(|&e| cr(e))));
            prop_assert!(max_abs(&(b.from_eigen(&d) - s.hamiltonian())) < 1e-10 * max_abs(s.hamiltonian()));
        }
    }
}
