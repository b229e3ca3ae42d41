mod common;

use common::*;
use qme_core::builders::GeneratorKind;
use qme_core::diagnostics::*;
use qme_core::linalg::{c, cr, CMatrix};
use qme_core::operator::{gibbs_state, superop::vectorize};
use qme_core::steady::solve_ness;
use qme_core::QmeError;

const EPS_GRID: (f64, f64, usize) = (0.01, 0.1, 8);

fn eps_grid() -> Vec<f64> {
    geomspace(EPS_GRID.0, EPS_GRID.1, EPS_GRID.2)
}

fn reports(chain: &qme_core::OpenChain, kind: GeneratorKind) -> Vec<CurrentReport> {
    let base = build(kind, chain, 0.1);
    eps_grid()
        .iter()
        .map(|&e| {
            let p = base.with_epsilon(e).unwrap();
            let r = solve_ness(&p).unwrap();
            current_report(&p, chain, r.rho_ness.matrix()).unwrap()
        })
        .collect()
}

#[test]
fn bond_current_vanishes_without_coherence() {
    let chain = uniform3(0.5, 1.0, 1.0);
    let sys = chain.system();
    let mut diag = CMatrix::zeros(8, 8);
    for k in 0..8 {
        diag[(k, k)] = cr((k + 1) as f64 / 36.0);
    }
    let g = gibbs_state(sys, 1.0, MU).unwrap();
    for j in 1..3 {
        assert_eq!(bond_current(&diag, sys, j).unwrap(), 0.0);
        assert!(bond_current(g.matrix(), sys, j).unwrap().abs() < 1e-14);
    }
    assert!(bond_current(&diag, sys, 3).is_err());
}

#[test]
fn redfield_current_oracle_and_continuity() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let p = build(GeneratorKind::Redfield, &chain, 0.1);
    let r = solve_ness(&p).unwrap();
    let rep = current_report(&p, &chain, r.rho_ness.matrix()).unwrap();
    let i1 = rep.bond_currents[0];
    assert!((i1 - 0.0037180873019841514).abs() < 1e-9, "{i1}");
    assert!((rep.bond_currents[1] - i1).abs() < 1e-10);
    assert!((rep.boundary(1).unwrap() + i1).abs() < 1e-10);
    assert!((rep.boundary(3).unwrap() - rep.bond_currents[1]).abs() < 1e-10);
    for v in &rep.continuity_residuals {
        assert!(v.abs() < 1e-10);
    }
    let (jl, jr) = rep.energy_bond_currents;
    assert!((jl - jr).abs() < 1e-10);
    assert!((rep.energy_boundary(1).unwrap() + rep.energy_boundary(3).unwrap()).abs() < 1e-10);
}

#[test]
fn continuity_by_generator() {
    let chain = uniform3(0.5, 5.0, 0.5);
    for k in GeneratorKind::ALL {
        let p = build(k, &chain, 0.1);
        let r = solve_ness(&p).unwrap();
        let rep = current_report(&p, &chain, r.rho_ness.matrix()).unwrap();
        let worst = rep.continuity_residuals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        match k {
            GeneratorKind::Redfield | GeneratorKind::LocalLindblad => assert!(worst < 1e-10, "{k:?}"),
            _ => assert!(worst > 1e-6, "{k:?} {worst:e}"),
        }
        let bl = rep.boundary(1).unwrap();
        let br = rep.boundary(3).unwrap();
        assert!((bl + br).abs() < 1e-10, "{k:?}");
        if k == GeneratorKind::EigenbasisLindblad {
            assert!(rep.bond_currents.iter().all(|i| i.abs() < 1e-12));
            assert!(bl.abs() > 1e-6);
        }
    }
}

#[test]
fn silent_bath_injects_nothing() {
    use qme_core::bath::{BathSpec, SpectralFunction};
    use qme_core::operator::{build_xxz, OpenChain, DEFAULT_DEGENERACY_TOL};
    let sys = build_xxz(3, &[1.0, 1.0, 1.0], 0.5, DELTA).unwrap();
    let baths = vec![
        BathSpec::ohmic(1, 5.0, MU, CUTOFF).unwrap(),
        BathSpec::new(3, 0.5, MU, SpectralFunction::ohmic_gaussian(CUTOFF).unwrap().with_strength(0.0).unwrap()).unwrap(),
    ];
    let chain = OpenChain::new(sys, baths, DEFAULT_DEGENERACY_TOL).unwrap();
    let p = build(GeneratorKind::Redfield, &chain, 0.1);
    let rho = random_panel(8, 1, 3).remove(0);
    let mz = chain.system().magnetization();
    assert_eq!(boundary_current(&p, rho.matrix(), 3, &mz).unwrap(), 0.0);
}

#[test]
fn coherence_identity() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let p = build(GeneratorKind::Universal, &chain, 0.1);
    let rho = solve_ness(&p).unwrap().rho_ness;
    for j in 1..3 {
        let a = bond_current(rho.matrix(), chain.system(), j).unwrap();
        let b = bond_current_from_coherences(rho.matrix(), &chain, j);
        assert!((a - b).abs() < 1e-12, "{a} {b}");
    }
    let panel = random_panel(8, 5, 11);
    for r in &panel {
        let a = bond_current(r.matrix(), chain.system(), 1).unwrap();
        assert!((a - bond_current_from_coherences(r.matrix(), &chain, 1)).abs() < 1e-12);
    }
}

#[test]
fn boundary_current_is_superoperator_expectation() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let p = build(GeneratorKind::Redfield, &chain, 0.1);
    let rho = random_panel(8, 1, 5).remove(0);
    let mz = chain.system().magnetization();
    let part = p.dissipator.part(1).unwrap();
    let v = part * vectorize(rho.matrix());
    let w = vectorize(&mz.transpose());
    let direct = w.iter().zip(v.iter()).fold(c(0.0, 0.0), |s, (a, b)| s + a * b).re;
    assert!((direct - boundary_current(&p, rho.matrix(), 1, &mz).unwrap()).abs() < 1e-14);
}

#[test]
fn conservation_audit_separates_generators() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let ops = chain.system().conserved_candidates();
    let panel = random_panel(8, 20, 7);
    for (k, exact) in [
        (GeneratorKind::Redfield, true),
        (GeneratorKind::LocalLindblad, true),
        (GeneratorKind::EigenbasisLindblad, false),
        (GeneratorKind::Universal, false),
    ] {
        let a = conservation_audit(&build(k, &chain, 0.1), &chain, &ops, &panel).unwrap();
        if exact {
            assert!(a.max_residual < 1e-12 * a.dissipator_norm, "{k:?} {a:?}");
        } else {
            assert!(a.max_residual > 1e-6, "{k:?} {a:?}");
        }
    }
    let bad = vec![chain.system().sigma_z(1)];
    let p = build(GeneratorKind::Redfield, &chain, 0.1);
    assert!(matches!(
        conservation_audit(&p, &chain, &bad, &panel),
        Err(QmeError::InvalidTestOperator { index: 0, .. })
    ));
}

#[test]
fn uniform_equilibrium_carries_no_boundary_current() {
    let chain = uniform3(0.5, 1.0, 1.0);
    for k in [GeneratorKind::Redfield, GeneratorKind::LocalLindblad, GeneratorKind::Universal] {
        for rep in reports(&chain, k) {
            assert!(rep.boundary(1).unwrap().abs() < 1e-12, "{k:?}");
            assert!(rep.boundary(3).unwrap().abs() < 1e-12, "{k:?}");
        }
    }
}

#[test]
fn equilibrium_current_scaling_with_unequal_fields() {
    let chain = chain(&[1.0, 1.5, 2.0], 0.5, &[1.0, 1.0]);
    let eps = eps_grid();
    let re: Vec<f64> = reports(&chain, GeneratorKind::Redfield).iter().map(|r| r.boundary(1).unwrap()).collect();
    let fit = scaling_slope(&eps, &re).unwrap();
    assert!((fit.slope - 4.0).abs() < 0.4, "{fit:?}");
    let lle: Vec<f64> = reports(&chain, GeneratorKind::LocalLindblad).iter().map(|r| r.boundary(1).unwrap()).collect();
    let fit = scaling_slope(&eps, &lle).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.2, "{fit:?}");
    let ule: Vec<f64> = reports(&chain, GeneratorKind::Universal).iter().map(|r| r.bond_currents[0]).collect();
    let fit = scaling_slope(&eps, &ule).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.2, "{fit:?}");
}

#[test]
fn ule_continuity_violation_is_second_order() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let eps = eps_grid();
    let ule = reports(&chain, GeneratorKind::Universal);
    let diff: Vec<f64> = ule.iter().map(|r| r.bond_currents[0] - r.bond_currents[1]).collect();
    let fit = scaling_slope(&eps, &diff).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.2, "{fit:?}");
    let re = reports(&chain, GeneratorKind::Redfield);
    let gap: Vec<f64> = ule.iter().zip(&re).map(|(a, b)| a.boundary(1).unwrap() - b.boundary(1).unwrap()).collect();
    let fit = scaling_slope(&eps, &gap).unwrap();
    assert!((fit.slope - 4.0).abs() < 0.4, "{fit:?}");
}

#[test]
fn audit_against_redfield() {
    let chain = uniform3(0.5, 5.0, 0.5);
    let re = build(GeneratorKind::Redfield, &chain, 0.1);
    let s = AuditSettings::default();
    let self_audit = audit_generator(&chain, &re, &re, &s).unwrap();
    assert!(self_audit.population_match.1 && self_audit.coherence_match.1);
    assert!(self_audit.thermal_distance.is_none());
    assert!(self_audit.kossakowski_min < 0.0);
    let ule = audit_generator(&chain, &build(GeneratorKind::Universal, &chain, 0.1), &re, &s).unwrap();
    assert!(ule.population_match.1 && !ule.coherence_match.1);
    assert!(ule.kossakowski_min > -1e-12);
    let lle = audit_generator(&chain, &build(GeneratorKind::LocalLindblad, &chain, 0.1), &re, &s).unwrap();
    assert!(!lle.population_match.1);
}
