//! Steady states, perturbative populations and time evolution.

use alloc::vec::Vec;

use crate::builders::GeneratorParts;
use crate::error::{QmeError, Result};
use crate::linalg::{c, cr, eigenvalues, expm, hermiticity_defect, max_abs, null_vector, CMatrix, CVector, C64};
use crate::operator::superop::{apply_matrix, unvectorize, vectorize};
use crate::operator::{DensityMatrix, EigenBasis};

#[derive(Debug, Clone)]
pub struct SteadyStateReport {
    pub rho_ness: DensityMatrix,
    /// ‖L vec(ρ)‖₂ after Hermitization and normalization.
    pub residual: f64,
    /// Frobenius norm of the Liouvillian, the scale for `residual`.
    pub liouvillian_norm: f64,
    /// Smallest |Re λ| over the non-stationary eigenvalues.
    pub gap: f64,
    /// Second-smallest |λ|.
    pub second_eigenvalue: f64,
    pub unique: bool,
    /// Anti-Hermitian part removed by symmetrization, relative to max|ρ|.
    pub hermiticity_defect: f64,
    pub spectrum: Vec<C64>,
}

/// Null vector of the Liouvillian, Hermitized and trace-normalized.
pub fn solve_ness(parts: &GeneratorParts) -> Result<SteadyStateReport> {
    solve_liouvillian(&parts.liouvillian())
}

pub fn solve_liouvillian(l: &CMatrix) -> Result<SteadyStateReport> {
    let (v, _) = null_vector(l)?;
    let raw = unvectorize(&v)?;
    let tr = raw.trace();
    if tr.norm() < 1e-8 * v.norm() {
        return Err(QmeError::TracelessNullVector { trace: tr.norm() });
    }
    let scaled = &raw / tr;
    let defect = hermiticity_defect(&scaled) / max_abs(&scaled).max(f64::MIN_POSITIVE);
    let rho = DensityMatrix::from_unnormalized(&scaled)?;
    let residual = (l * vectorize(rho.matrix())).norm();
    let lnorm = l.norm();

    let mut spectrum = eigenvalues(l);
    spectrum.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let second = spectrum.get(1).map(|z| z.norm()).unwrap_or(f64::INFINITY);
    let gap = spectrum.iter().skip(1).map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    let floor = residual.max(f64::EPSILON * lnorm);
    let unique = second > 1e3 * floor;
    if !unique {
        return Err(QmeError::NonUniqueSteadyState { gap: second, residual });
    }
    Ok(SteadyStateReport {
        rho_ness: rho,
        residual,
        liouvillian_norm: lnorm,
        gap,
        second_eigenvalue: second,
        unique,
        hermiticity_defect: defect,
        spectrum,
    })
}

/// Liouvillian eigenvalues.
pub fn liouvillian_spectrum(parts: &GeneratorParts) -> Vec<C64> {
    eigenvalues(&parts.liouvillian())
}

#[derive(Debug, Clone)]
pub struct PerturbativeNess {
    /// Leading-order state, diagonal in the eigenbasis.
    pub rho0: DensityMatrix,
    pub populations: Vec<f64>,
    /// O(ε²) coherences divided by ε², in the site basis.
    pub coherences2: CMatrix,
    /// R_αν = ⟨α|L₂[|ν⟩⟨ν|]|α⟩.
    pub rate_matrix: nalgebra::DMatrix<f64>,
}

impl PerturbativeNess {
    pub fn coherences2_eigen(&self, basis: &EigenBasis) -> CMatrix {
        basis.to_eigen(&self.coherences2)
    }
}

/// Populations from the null vector of the rate matrix, and the ε² coherences
/// c_αν = ⟨α|L₂[ρ⁰]|ν⟩ / (i(E_α − E_ν)), which balances −i(E_α − E_ν)c_αν from the
/// Hamiltonian part.
pub fn perturbative_ness(parts: &GeneratorParts, basis: &EigenBasis) -> Result<PerturbativeNess> {
    let d = basis.dim();
    if parts.dim() != d {
        return Err(QmeError::DimensionMismatch { expected: d, found: parts.dim() });
    }
    let l2 = parts.unit_dissipator();
    let e = basis.energies();
    let mut r = nalgebra::DMatrix::<f64>::zeros(d, d);
    for nu in 0..d {
        let out = basis.to_eigen(&l2.apply(&basis.projector(nu, nu))?);
        for a in 0..d {
            r[(a, nu)] = out[(a, a)].re;
        }
    }
    let svd = r.clone().svd(false, true);
    let v_t = svd.v_t.ok_or(QmeError::Linalg("svd without right vectors"))?;
    let smax = svd.singular_values.max();
    let tol = 1e-9 * smax.max(f64::MIN_POSITIVE);
    let nullity = svd.singular_values.iter().filter(|&&s| s <= tol).count();
    if nullity != 1 {
        return Err(QmeError::NonErgodicRateMatrix { nullity });
    }
    let k = svd.singular_values.imin();
    let v = v_t.row(k);
    let sum: f64 = v.iter().sum();
    let populations: Vec<f64> = v.iter().map(|x| x / sum).collect();

    let diag = CVector::from_iterator(d, populations.iter().map(|&p| cr(p)));
    let rho0_eigen = CMatrix::from_diagonal(&diag);
    let rho0 = basis.from_eigen(&rho0_eigen);
    let drive = basis.to_eigen(&l2.apply(&rho0)?);
    let mut coh = CMatrix::zeros(d, d);
    for a in 0..d {
        for nu in 0..d {
            if a != nu {
                coh[(a, nu)] = drive[(a, nu)] / c(0.0, e[a] - e[nu]);
            }
        }
    }
    Ok(PerturbativeNess {
        rho0: DensityMatrix::from_unnormalized(&rho0)?,
        populations,
        coherences2: crate::linalg::hermitian_part(&basis.from_eigen(&coh)),
        rate_matrix: r,
    })
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub rho: DensityMatrix,
    /// Anti-Hermitian part removed before returning.
    pub hermiticity_deviation: f64,
}

/// exp(tL) applied to ρ₀.
pub fn evolve(parts: &GeneratorParts, rho0: &DensityMatrix, t: f64) -> Result<EvolutionResult> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QmeError::InvalidArgument(alloc::format!("time {t} must be nonnegative")));
    }
    if t == 0.0 {
        return Ok(EvolutionResult { rho: rho0.clone(), hermiticity_deviation: 0.0 });
    }
    let prop = expm(&(parts.liouvillian() * cr(t)))?;
    propagate(&prop, rho0)
}

fn propagate(prop: &CMatrix, rho0: &DensityMatrix) -> Result<EvolutionResult> {
    let out = apply_matrix(prop, rho0.matrix())?;
    let dev = hermiticity_defect(&out);
    let h = crate::linalg::hermitian_part(&out);
    let tr = h.trace().re;
    if !tr.is_finite() || tr.abs() < 0.5 {
        return Err(QmeError::EvolutionFailed("trace lost during propagation"));
    }
    Ok(EvolutionResult { rho: DensityMatrix::with_tolerance(h, 1e-8)?, hermiticity_deviation: dev })
}

#[derive(Debug, Clone)]
pub struct PositivityTrace {
    pub times: Vec<f64>,
    pub min_eigenvalues: Vec<f64>,
    pub overall_min: f64,
}

/// Smallest eigenvalue of ρ(t) on a time grid.
pub fn positivity_probe(parts: &GeneratorParts, rho0: &DensityMatrix, times: &[f64]) -> Result<PositivityTrace> {
    let l = parts.liouvillian();
    let mut min_eigenvalues = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= 0.0) {
            return Err(QmeError::InvalidArgument(alloc::format!("time {t} must be nonnegative")));
        }
        let rho = if t == 0.0 { rho0.clone() } else { propagate(&expm(&(&l * cr(t)))?, rho0)?.rho };
        min_eigenvalues.push(rho.min_eigenvalue());
    }
    let overall_min = min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PositivityTrace { times: times.to_vec(), min_eigenvalues, overall_min })
}
