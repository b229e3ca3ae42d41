//! Redfield and ULE frequency-domain coefficients.

use nalgebra::Matrix2;

use crate::bath::quadrature::{pv_fullline, pv_halfline, PvQuadrature};
use crate::bath::BathSpec;
use crate::error::Result;
use crate::linalg::{c, cr, CMatrix, C64};

const PI: f64 = core::f64::consts::PI;

pub type Block2 = Matrix2<C64>;

/// [[1, −i], [i, 1]]
fn m_plus() -> Block2 {
    Block2::new(cr(1.0), c(0.0, -1.0), c(0.0, 1.0), cr(1.0))
}

/// [[1, i], [−i, 1]]
fn m_minus() -> Block2 {
    Block2::new(cr(1.0), c(0.0, 1.0), c(0.0, -1.0), cr(1.0))
}

fn upper_for(bath: &BathSpec, e: f64) -> f64 {
    bath.spectral().support().max(2.0 * e.abs())
}

/// C(E) = J(E)n(E)/2 − (i/2π)·𝒫∫₀^∞ J(ω)n(ω)/(ω − E) dω.
pub fn redfield_c(bath: &BathSpec, e: f64, quad: &PvQuadrature) -> Result<C64> {
    let re = if e > 0.0 { 0.5 * bath.jn(e)? } else { 0.0 };
    let pv = pv_halfline(&|w| bath.jn(w), e, upper_for(bath, e), quad)?;
    Ok(c(re, -pv / (2.0 * PI)))
}

/// D(E) = J(E)(n(E)+1)/2 − (i/2π)·𝒫∫₀^∞ J(ω)(n(ω)+1)/(ω − E) dω.
pub fn redfield_d(bath: &BathSpec, e: f64, quad: &PvQuadrature) -> Result<C64> {
    let re = if e > 0.0 { 0.5 * bath.jn1(e)? } else { 0.0 };
    let pv = pv_halfline(&|w| bath.jn1(w), e, upper_for(bath, e), quad)?;
    Ok(c(re, -pv / (2.0 * PI)))
}

/// πG(E) − i·𝒫∫G(ω)/(ω − E) dω for the Hermitian couplings X₁ = S + S†, X₂ = i(S − S†).
///
/// G(ω) = J(ω)(n(ω)+1)/(8π)·M₊ for ω > 0 and J(−ω)n(−ω)/(8π)·M₋ for ω < 0.
pub fn hermitian_coupling_spectrum(bath: &BathSpec, e: f64, quad: &PvQuadrature) -> Result<Block2> {
    let mut pole = Block2::zeros();
    if e > 0.0 {
        pole = m_plus() * cr(bath.jn1(e)? / 8.0);
    } else if e < 0.0 {
        pole = m_minus() * cr(bath.jn(-e)? / 8.0);
    }
    let pos = pv_halfline(&|w| bath.jn1(w), e, upper_for(bath, e), quad)?;
    let neg = pv_halfline(&|w| bath.jn(w), -e, upper_for(bath, e), quad)?;
    let pv = (m_plus() * cr(pos) - m_minus() * cr(neg)) * cr(1.0 / (8.0 * PI));
    Ok(pole - pv * c(0.0, 1.0))
}

/// Square root of G(ω)/(2π): √(J(n+1))/(4√2π)·M₊ for ω > 0, √(J(−ω)n(−ω))/(4√2π)·M₋ for ω < 0.
pub fn ule_g_block(bath: &BathSpec, omega: f64) -> Result<Block2> {
    let norm = 1.0 / (4.0 * libm::sqrt(2.0) * PI);
    if omega > 0.0 {
        Ok(m_plus() * cr(norm * libm::sqrt(bath.jn1(omega)?)))
    } else if omega < 0.0 {
        Ok(m_minus() * cr(norm * libm::sqrt(bath.jn(-omega)?)))
    } else {
        Ok(Block2::zeros())
    }
}

/// −2π·𝒫∫ g(ω + p) g(ω + q)/ω dω.
pub fn ule_f_block(bath: &BathSpec, p: f64, q: f64, quad: &PvQuadrature) -> Result<Block2> {
    let h = |w: f64| -> Result<[f64; 8]> {
        let m = ule_g_block(bath, w + p)? * ule_g_block(bath, w + q)?;
        Ok([
            m[(0, 0)].re,
            m[(0, 0)].im,
            m[(0, 1)].re,
            m[(0, 1)].im,
            m[(1, 0)].re,
            m[(1, 0)].im,
            m[(1, 1)].re,
            m[(1, 1)].im,
        ])
    };
    let upper = bath.spectral().support() + p.abs().max(q.abs());
    let v = pv_fullline(&h, upper, &[p.abs(), q.abs()], quad)?;
    let s = -2.0 * PI;
    Ok(Block2::new(
        c(s * v[0], s * v[1]),
        c(s * v[2], s * v[3]),
        c(s * v[4], s * v[5]),
        c(s * v[6], s * v[7]),
    ))
}

fn block_diag(blocks: &[Block2]) -> CMatrix {
    let n = 2 * blocks.len();
    let mut out = CMatrix::zeros(n, n);
    for (k, b) in blocks.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                out[(2 * k + i, 2 * k + j)] = b[(i, j)];
            }
        }
    }
    out
}

/// Block-diagonal g(ω) over the given baths.
pub fn ule_g(baths: &[BathSpec], omega: f64) -> Result<CMatrix> {
    let blocks = baths.iter().map(|b| ule_g_block(b, omega)).collect::<Result<alloc::vec::Vec<_>>>()?;
    Ok(block_diag(&blocks))
}

/// Block-diagonal f(p, q) over the given baths.
pub fn ule_f(baths: &[BathSpec], p: f64, q: f64, quad: &PvQuadrature) -> Result<CMatrix> {
    let blocks =
        baths.iter().map(|b| ule_f_block(b, p, q, quad)).collect::<Result<alloc::vec::Vec<_>>>()?;
    Ok(block_diag(&blocks))
}
