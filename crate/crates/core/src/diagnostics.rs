//! Currents, conservation audits, generator comparisons and scaling fits.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::{extract_kossakowski, GeneratorKind, GeneratorParts};
use crate::error::{QmeError, Result};
use crate::linalg::{c, commutator, cr, max_abs, CMatrix, CVector};
use crate::operator::{gibbs_state, trace_distance, DensityMatrix, EigenBasis, OpenChain, SpinChainSystem};
use crate::steady::solve_ness;

fn real_expectation(rho: &CMatrix, op: &CMatrix) -> Result<f64> {
    let v = (rho * op).trace();
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(QmeError::NonHermitianState { residue: v.im });
    }
    Ok(v.re)
}

/// I_j = 4ig(⟨σ₊ʲσ₋ʲ⁺¹⟩ − ⟨σ₋ʲσ₊ʲ⁺¹⟩).
pub fn bond_current(rho: &CMatrix, system: &SpinChainSystem, j: usize) -> Result<f64> {
    if j < 1 || j >= system.n_sites() {
        return Err(QmeError::InvalidArgument(alloc::format!("bond {j} outside 1..{}", system.n_sites())));
    }
    real_expectation(rho, &system.bond_current_operator(j))
}

/// Tr(W·ε²L₂^(ℓ)[ρ]).
pub fn boundary_current(parts: &GeneratorParts, rho: &CMatrix, terminal: usize, weight: &CMatrix) -> Result<f64> {
    let out = parts.dissipator.apply_part(terminal, rho)?;
    real_expectation(&out, weight)
}

/// −iΣ(E_α − E_ν)ρ_αν O_να = i⟨[H_S, O]⟩; only coherences contribute.
pub fn coherence_rate(rho: &CMatrix, basis: &EigenBasis, op: &CMatrix) -> f64 {
    let r = basis.to_eigen(rho);
    let o = basis.to_eigen(op);
    let e = basis.energies();
    let mut s = cr(0.0);
    for a in 0..basis.dim() {
        for n in 0..basis.dim() {
            if a != n {
                s += r[(a, n)] * o[(n, a)] * c(0.0, -(e[a] - e[n]));
            }
        }
    }
    s.re
}

/// Bond current j from the eigenbasis coherences, via the rate of Σ_{k≤j} σz^k.
pub fn bond_current_from_coherences(rho: &CMatrix, chain: &OpenChain, j: usize) -> f64 {
    let sys = chain.system();
    let mut o = CMatrix::zeros(sys.dim(), sys.dim());
    for k in 1..=j {
        o += sys.sigma_z(k);
    }
    coherence_rate(rho, chain.basis(), &o)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentReport {
    pub bond_currents: Vec<f64>,
    /// Spin current injected by each bath, by terminal.
    pub boundary_currents: Vec<(usize, f64)>,
    /// Energy current injected by each bath, by terminal.
    pub energy_boundary_currents: Vec<(usize, f64)>,
    /// (J_{L→M}, J_{M→R}) = (−i⟨[H_S, H_L]⟩, i⟨[H_S, H_R]⟩).
    pub energy_bond_currents: (f64, f64),
    /// d⟨σz^k⟩/dt per site; zero in a steady state.
    pub continuity_residuals: Vec<f64>,
}

impl CurrentReport {
    pub fn boundary(&self, terminal: usize) -> Option<f64> {
        self.boundary_currents.iter().find(|(t, _)| *t == terminal).map(|(_, v)| *v)
    }

    pub fn energy_boundary(&self, terminal: usize) -> Option<f64> {
        self.energy_boundary_currents.iter().find(|(t, _)| *t == terminal).map(|(_, v)| *v)
    }
}

pub fn current_report(parts: &GeneratorParts, chain: &OpenChain, rho: &CMatrix) -> Result<CurrentReport> {
    let sys = chain.system();
    let n = sys.n_sites();
    let bond_currents = (1..n).map(|j| bond_current(rho, sys, j)).collect::<Result<Vec<_>>>()?;
    let mz = sys.magnetization();
    let mut boundary_currents = Vec::new();
    let mut energy_boundary_currents = Vec::new();
    for b in chain.baths() {
        boundary_currents.push((b.terminal(), boundary_current(parts, rho, b.terminal(), &mz)?));
        energy_boundary_currents.push((b.terminal(), boundary_current(parts, rho, b.terminal(), sys.hamiltonian())?));
    }
    let h = sys.hamiltonian();
    let jl = real_expectation(rho, &(commutator(h, sys.h_left()) * c(0.0, -1.0)))?;
    let jr = real_expectation(rho, &(commutator(h, sys.h_right()) * c(0.0, 1.0)))?;
    let inject = |site: usize| boundary_currents.iter().find(|(t, _)| *t == site).map(|(_, v)| *v).unwrap_or(0.0);
    let continuity_residuals = (1..=n)
        .map(|k| {
            let inflow = if k < n { bond_currents[k - 1] } else { 0.0 };
            let outflow = if k > 1 { bond_currents[k - 2] } else { 0.0 };
            inflow - outflow + inject(k)
        })
        .collect();
    Ok(CurrentReport {
        bond_currents,
        boundary_currents,
        energy_boundary_currents,
        energy_bond_currents: (jl, jr),
        continuity_residuals,
    })
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Random full-rank state GG†/Tr with G complex Gaussian.
pub fn random_density_matrix(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(gaussian(rng), gaussian(rng)));
    let r = &g * g.adjoint();
    DensityMatrix::from_unnormalized(&r).expect("Gaussian matrix has positive trace")
}

pub fn random_ket(dim: usize, rng: &mut ChaCha8Rng) -> CVector {
    CVector::from_fn(dim, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn random_panel(dim: usize, count: usize, seed: u64) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_density_matrix(dim, &mut rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationAudit {
    /// max |Tr(O·ε²L₂[ρ])| over operators and states.
    pub max_residual: f64,
    /// Frobenius norm of ε²L₂.
    pub dissipator_norm: f64,
}

/// Checks Tr(O L₂[ρ]) = 0 for operators commuting with every bath coupling.
pub fn conservation_audit(
    parts: &GeneratorParts,
    chain: &OpenChain,
    ops: &[CMatrix],
    panel: &[DensityMatrix],
) -> Result<ConservationAudit> {
    for (index, o) in ops.iter().enumerate() {
        let scale = max_abs(o).max(1.0);
        for (_, s) in chain.coupled() {
            let defect = max_abs(&commutator(o, s)).max(max_abs(&commutator(o, &s.adjoint())));
            if defect > 1e-12 * scale {
                return Err(QmeError::InvalidTestOperator { index, defect });
            }
        }
    }
    let mut max_residual: f64 = 0.0;
    for rho in panel {
        let out = parts.dissipator.apply(rho.matrix())?;
        for o in ops {
            max_residual = max_residual.max((o * &out).trace().norm());
        }
    }
    Ok(ConservationAudit { max_residual, dissipator_norm: parts.dissipator.matrix().norm() })
}

/// Max deviations of eigenbasis diagonal and off-diagonal elements of L₂ₐ[ρ] − L₂ᵦ[ρ]
/// over random states diagonal in the eigenbasis.
pub fn generator_compare_on_diagonals(
    a: &GeneratorParts,
    b: &GeneratorParts,
    basis: &EigenBasis,
    panel_size: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let la = a.unit_dissipator();
    let lb = b.unit_dissipator();
    let d = basis.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut diag, mut off) = (0.0f64, 0.0f64);
    for _ in 0..panel_size {
        let p: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let total: f64 = p.iter().sum();
        let rho = basis.from_eigen(&CMatrix::from_diagonal(&CVector::from_iterator(
            d,
            p.iter().map(|x| cr(x / total)),
        )));
        let delta = basis.to_eigen(&(la.apply(&rho)? - lb.apply(&rho)?));
        for i in 0..d {
            for j in 0..d {
                let v = delta[(i, j)].norm();
                if i == j {
                    diag = diag.max(v);
                } else {
                    off = off.max(v);
                }
            }
        }
    }
    Ok((diag, off))
}

/// Trace distance between the steady state and e^{−β(H_S − μN_S)}/Z.
pub fn thermalization_check(parts: &GeneratorParts, system: &SpinChainSystem, beta: f64, mu: f64) -> Result<f64> {
    let ness = solve_ness(parts)?;
    let gibbs = gibbs_state(system, beta, mu)?;
    trace_distance(ness.rho_ness.matrix(), gibbs.matrix())
}

/// Values below this are treated as numerically zero in slope fits.
pub const ZERO_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub used: usize,
    /// Indices of points dropped as numerically zero.
    pub zeroed: Vec<usize>,
}

/// Least-squares slope of log y against log x.
pub fn scaling_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(QmeError::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    let mut zeroed = Vec::new();
    let mut pts = Vec::new();
    for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let y = y.abs();
        if !(x > 0.0) || !x.is_finite() || !y.is_finite() {
            continue;
        }
        if y < ZERO_FLOOR {
            zeroed.push(k);
            continue;
        }
        pts.push((libm::log(x), libm::log(y)));
    }
    let n = pts.len();
    if n < 4 {
        return Err(QmeError::InsufficientData { usable: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(QmeError::InsufficientData { usable: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| { let r = p.1 - intercept - slope * p.0; r * r }).sum();
    let stderr = libm::sqrt(sse / (nf - 2.0) / sxx);
    Ok(SlopeFit { slope, stderr, intercept, used: n, zeroed })
}

/// Logarithmically spaced grid including both ends.
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (libm::log(lo), libm::log(hi));
    (0..n).map(|k| libm::exp(a + (b - a) * k as f64 / (n - 1) as f64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditProvenance {
    pub kind: GeneratorKind,
    pub epsilon: f64,
    pub quadrature_points: usize,
    pub quadrature_rel_tol: f64,
    pub seed: u64,
    pub panel_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Present when all baths share β and μ.
    pub thermal_distance: Option<f64>,
    pub conservation: ConservationAudit,
    pub kossakowski_min: f64,
    /// (max deviation, matches) of diagonal elements against the reference generator.
    pub population_match: (f64, bool),
    pub coherence_match: (f64, bool),
    pub currents: CurrentReport,
    pub steady_residual: f64,
    pub gap: f64,
    pub warnings: Vec<String>,
    pub provenance: AuditProvenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditSettings {
    pub panel_size: usize,
    pub seed: u64,
    pub quadrature_points: usize,
    pub quadrature_rel_tol: f64,
    /// Deviation below which two generators count as equal.
    pub match_tol: f64,
}

impl Default for AuditSettings {
    fn default() -> Self {
        AuditSettings { panel_size: 20, seed: 7, quadrature_points: 2000, quadrature_rel_tol: 1e-8, match_tol: 1e-10 }
    }
}

/// All per-generator checks against a Redfield reference at the same ε.
pub fn audit_generator(
    chain: &OpenChain,
    parts: &GeneratorParts,
    reference: &GeneratorParts,
    settings: &AuditSettings,
) -> Result<AuditReport> {
    let ness = solve_ness(parts)?;
    let rho = ness.rho_ness.matrix();
    let baths = chain.baths();
    let equal = baths.iter().all(|b| b.beta() == baths[0].beta() && b.mu() == baths[0].mu());
    let thermal_distance = if equal {
        let g = gibbs_state(chain.system(), baths[0].beta(), baths[0].mu())?;
        Some(trace_distance(rho, g.matrix())?)
    } else {
        None
    };
    let panel = random_panel(chain.dim(), settings.panel_size, settings.seed);
    let conservation = conservation_audit(parts, chain, &chain.system().conserved_candidates(), &panel)?;
    let kossakowski_min = extract_kossakowski(parts)?.min_eigenvalue;
    let (dd, od) = generator_compare_on_diagonals(parts, reference, chain.basis(), settings.panel_size, settings.seed)?;
    Ok(AuditReport {
        thermal_distance,
        conservation,
        kossakowski_min,
        population_match: (dd, dd < settings.match_tol),
        coherence_match: (od, od < settings.match_tol),
        currents: current_report(parts, chain, rho)?,
        steady_residual: ness.residual,
        gap: ness.gap,
        warnings: parts.warnings.clone(),
        provenance: AuditProvenance {
            kind: parts.kind,
            epsilon: parts.epsilon,
            quadrature_points: settings.quadrature_points,
            quadrature_rel_tol: settings.quadrature_rel_tol,
            seed: settings.seed,
            panel_size: settings.panel_size,
        },
    })
}
