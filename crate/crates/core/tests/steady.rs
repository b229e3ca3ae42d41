mod common;

use common::*;
use qme_core::builders::GeneratorKind;
use qme_core::diagnostics::{random_ket, random_panel, scaling_slope};
use qme_core::linalg::{cr, CVector};
use qme_core::operator::{gibbs_state, trace_distance, DensityMatrix};
use qme_core::steady::{evolve, liouvillian_spectrum, perturbative_ness, positivity_probe, solve_ness};
use qme_core::QmeError;
use rand::SeedableRng;

#[test]
fn eigenbasis_lindblad_thermalizes_exactly() {
    let chain = uniform3(0.5, 1.0, 1.0);
    let r = solve_ness(&build(GeneratorKind::EigenbasisLindblad, &chain, 0.1)).unwrap();
    let g = gibbs_state(chain.system(), 1.0, MU).unwrap();
    assert!(trace_distance(r.rho_ness.matrix(), g.matrix()).unwrap() < 1e-8);
}

#[test]
fn lindblad_spectra_in_left_half_plane() {
    let chain = uniform3(0.5, 5.0, 0.5);
    for k in [GeneratorKind::LocalLindblad, GeneratorKind::EigenbasisLindblad, GeneratorKind::Universal] {
        let top = liouvillian_spectrum(&build(k, &chain, 0.1)).iter().map(|z| z.re).fold(f64::MIN, f64::max);
        assert!(top <= 1e-10, "{k:?}: {top:e}");
    }
}

#[test]
fn steady_state_residual_small() {
    let chain = uniform3(0.5, 5.0, 0.5);
    for k in GeneratorKind::ALL {
        let r = solve_ness(&build(k, &chain, 0.1)).unwrap();
        assert!(r.residual <= 1e-10 * r.liouvillian_norm, "{k:?}");
        assert!(r.unique && r.gap > 0.0);
    }
}

#[test]
fn closed_system_is_not_unique() {
    let chain = uniform3(0.5, 1.0, 1.0);
    let mut p = build(GeneratorKind::Redfield, &chain, 0.1);
    p.dissipator = p.dissipator.scaled(0.0);
    assert!(matches!(solve_ness(&p), Err(QmeError::NonUniqueSteadyState { .. })));
}

#[test]
fn perturbative_populations_at_equilibrium_are_gibbs() {
    let chain = uniform3(0.5, 1.0, 1.0);
    let p = perturbative_ness(&build(GeneratorKind::Redfield, &chain, 0.1), chain.basis()).unwrap();
    let b = chain.basis();
    let w: Vec<f64> = b
        .energies()
        .iter()
        .zip(b.number_labels())
        .map(|(e, &n)| (-(e - MU * n as f64)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    for (x, y) in p.populations.iter().zip(&w) {
        assert!((x - y / z).abs() < 1e-10);
    }
    for j in 0..8 {
        let col: f64 = p.rate_matrix.column(j).iter().sum();
        assert!(col.abs() < 1e-12);
    }
    let c = p.coherences2_eigen(b);
    for a in 0..8 {
        assert!(c[(a, a)].norm() < 1e-14);
    }
}

#[test]
fn perturbative_populations_shared_by_redfield_and_ule() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let a = perturbative_ness(&build(GeneratorKind::Redfield, &chain, 0.1), chain.basis()).unwrap();
    let b = perturbative_ness(&build(GeneratorKind::Universal, &chain, 0.1), chain.basis()).unwrap();
    for (x, y) in a.populations.iter().zip(&b.populations) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn redfield_populations_converge_quadratically() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let base = build(GeneratorKind::Redfield, &chain, 0.1);
    let pert = perturbative_ness(&base, chain.basis()).unwrap();
    let eps = qme_core::diagnostics::geomspace(0.02, 0.1, 6);
    let mut dev = Vec::new();
    for &e in &eps {
        let r = solve_ness(&base.with_epsilon(e).unwrap()).unwrap();
        let d = chain.basis().to_eigen(r.rho_ness.matrix());
        dev.push((0..8).map(|a| (d[(a, a)].re - pert.populations[a]).abs()).fold(0.0, f64::max));
    }
    let fit = scaling_slope(&eps, &dev).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.3, "{fit:?}");
}

#[test]
fn redfield_coherences_match_second_order() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let base = build(GeneratorKind::Redfield, &chain, 0.1);
    let b = chain.basis();
    let c2 = perturbative_ness(&base, b).unwrap().coherences2_eigen(b);
    let eps = qme_core::diagnostics::geomspace(0.02, 0.1, 6);
    let mut dev = Vec::new();
    for &e in &eps {
        let r = b.to_eigen(solve_ness(&base.with_epsilon(e).unwrap()).unwrap().rho_ness.matrix());
        let mut s = 0.0;
        for a in 0..8 {
            for n in 0..8 {
                if a != n {
                    s += (r[(a, n)] - c2[(a, n)] * e * e).norm_sqr();
                }
            }
        }
        dev.push(s.sqrt());
    }
    assert!(scaling_slope(&eps, &dev).unwrap().slope >= 3.5);
}

#[test]
fn evolution_basics() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let p = build(GeneratorKind::Universal, &chain, 0.1);
    let rho0 = random_panel(8, 1, 4).remove(0);
    assert_eq!(evolve(&p, &rho0, 0.0).unwrap().rho, rho0);
    for k in 0..20 {
        let t = 0.5 * k as f64;
        let r = evolve(&p, &rho0, t).unwrap();
        assert!((r.rho.matrix().trace().re - 1.0).abs() < 1e-10);
    }
    let ness = solve_ness(&p).unwrap();
    let late = evolve(&p, &rho0, 100.0 / ness.gap).unwrap();
    assert!(trace_distance(late.rho.matrix(), ness.rho_ness.matrix()).unwrap() < 1e-6);
}

#[test]
fn completely_positive_evolution_stays_positive() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let p = build(GeneratorKind::Universal, &chain, 0.1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let times: Vec<f64> = (0..6).map(|k| k as f64 * 2.0).collect();
    for _ in 0..50 {
        let psi = DensityMatrix::pure(&random_ket(8, &mut rng)).unwrap();
        let tr = positivity_probe(&p, &psi, &times).unwrap();
        assert!(tr.overall_min >= -1e-10, "{}", tr.overall_min);
    }
}

#[test]
fn redfield_can_leave_the_state_space() {
    // superposition of the ground state and the top state of the one-excitation sector
    let chain = uniform3(0.5, 5.0, 0.5);
    let p = build(GeneratorKind::Redfield, &chain, 0.1);
    let b = chain.basis();
    let times: Vec<f64> = (0..40).map(|k| 0.05 * k as f64).collect();
    let mut worst = f64::INFINITY;
    for a in 0..8 {
        for c in a + 1..8 {
            let psi: CVector = (b.vectors().column(a) + b.vectors().column(c)) * cr(std::f64::consts::FRAC_1_SQRT_2);
            let rho = DensityMatrix::pure(&psi).unwrap();
            worst = worst.min(positivity_probe(&p, &rho, &times).unwrap().overall_min);
        }
    }
    assert!(worst < 0.0, "{worst:e}");
    assert!(worst > -0.1);
}

#[test]
fn gibbs_start_under_equilibrium_redfield() {
    let chain = uniform3(0.5, 1.0, 1.0);
    let g = gibbs_state(chain.system(), 1.0, MU).unwrap();
    let start = g.min_eigenvalue();
    let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
    let mut drift = Vec::new();
    for eps in [0.05, 0.1] {
        let p = build(GeneratorKind::Redfield, &chain, eps);
        let tr = positivity_probe(&p, &g, &times).unwrap();
        drift.push((tr.overall_min - start).abs());
    }
    assert!(drift[1] < 10.0 * 0.01, "{drift:?}");
}
