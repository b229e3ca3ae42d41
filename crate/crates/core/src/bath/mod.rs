//! Bosonic baths: spectral functions, occupations and frequency-domain coefficients.

mod coefficients;
mod quadrature;

use alloc::format;

pub use coefficients::{
    hermitian_coupling_spectrum, redfield_c, redfield_d, ule_f, ule_f_block, ule_g, ule_g_block,
    Block2,
};
pub use quadrature::{pv_fullline, pv_halfline, GaussLegendre, PvQuadrature};

use crate::error::{QmeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    Bosonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    OhmicGaussian,
}

/// κ·ω·e^{−(ω/ω_c)²} for ω > 0, zero otherwise. κ = 1 unless set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFunction {
    kind: SpectralKind,
    cutoff: f64,
    strength: f64,
}

impl SpectralFunction {
    pub fn ohmic_gaussian(cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(QmeError::InvalidArgument(format!("cutoff {cutoff} must be positive")));
        }
        Ok(SpectralFunction { kind: SpectralKind::OhmicGaussian, cutoff, strength: 1.0 })
    }

    pub fn with_strength(mut self, strength: f64) -> Result<Self> {
        if !(strength >= 0.0) || !strength.is_finite() {
            return Err(QmeError::InvalidArgument(format!("strength {strength} must be nonnegative")));
        }
        self.strength = strength;
        Ok(self)
    }

    pub fn kind(&self) -> SpectralKind {
        self.kind
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn eval(&self, omega: f64) -> f64 {
        if omega > 0.0 && self.strength != 0.0 {
            let x = omega / self.cutoff;
            self.strength * omega * libm::exp(-x * x)
        } else {
            0.0
        }
    }

    /// Upper limit beyond which the spectral function is negligible.
    pub fn support(&self) -> f64 {
        8.0 * self.cutoff
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    terminal: usize,
    beta: f64,
    mu: f64,
    statistics: Statistics,
    spectral: SpectralFunction,
}

impl BathSpec {
    pub fn new(terminal: usize, beta: f64, mu: f64, spectral: SpectralFunction) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(QmeError::InvalidArgument(format!("beta = {beta} must be positive")));
        }
        if !mu.is_finite() {
            return Err(QmeError::NonFinite("mu"));
        }
        if !(mu < 0.0) {
            return Err(QmeError::InvalidArgument(format!("bosonic bath needs mu < 0, got {mu}")));
        }
        Ok(BathSpec { terminal, beta, mu, statistics: Statistics::Bosonic, spectral })
    }

    /// Ohmic–Gaussian bath with unit strength.
    pub fn ohmic(terminal: usize, beta: f64, mu: f64, cutoff: f64) -> Result<Self> {
        Self::new(terminal, beta, mu, SpectralFunction::ohmic_gaussian(cutoff)?)
    }

    pub fn terminal(&self) -> usize {
        self.terminal
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn spectral(&self) -> &SpectralFunction {
        &self.spectral
    }

    /// J(ω)·n(ω); zero wherever J vanishes.
    pub(crate) fn jn(&self, omega: f64) -> Result<f64> {
        let j = self.spectral.eval(omega);
        if j == 0.0 {
            return Ok(0.0);
        }
        Ok(j * occupation(self, omega)?)
    }

    /// J(ω)·(n(ω) + 1).
    pub(crate) fn jn1(&self, omega: f64) -> Result<f64> {
        let j = self.spectral.eval(omega);
        if j == 0.0 {
            return Ok(0.0);
        }
        Ok(j * (occupation(self, omega)? + 1.0))
    }
}

/// Bose occupation 1/(e^{β(ω−μ)} − 1).
pub fn occupation(bath: &BathSpec, omega: f64) -> Result<f64> {
    let x = bath.beta * (omega - bath.mu);
    if !(x > 0.0) {
        return Err(QmeError::PoleInOccupation { omega, exponent: x });
    }
    Ok(1.0 / libm::expm1(x))
}

pub fn spectral_density(spec: &SpectralFunction, omega: f64) -> f64 {
    spec.eval(omega)
}
