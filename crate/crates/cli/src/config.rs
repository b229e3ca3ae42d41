//! Experiment configuration: JSON in, validated experiment out.

use qme_core::bath::BathSpec;
use qme_core::builders::{GeneratorKind, DEFAULT_SECULAR_TOL};
use qme_core::operator::{build_xxz, OpenChain, DEFAULT_DEGENERACY_TOL};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_DELTA: f64 = 0.3;
pub const DEFAULT_SEED: u64 = 7;
pub const WEAK_COUPLING_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub n_sites: usize,
    pub fields: Vec<f64>,
    pub g: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathBlock {
    pub terminal: usize,
    pub beta: f64,
    pub mu: f64,
    pub omega_c: f64,
    /// Overall prefactor of the spectral function.
    #[serde(default = "one")]
    pub strength: f64,
}

fn one() -> f64 {
    1.0
}

/// Explicit values or a generated grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Spaced(Spacing),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum Spacing {
    Linspace { start: f64, stop: f64, points: usize },
    Geomspace { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Spaced(Spacing::Linspace { start, stop, points }) => match points {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
            },
            Grid::Spaced(Spacing::Geomspace { start, stop, points }) => {
                qme_core::diagnostics::geomspace(*start, *stop, *points)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Epsilon,
    G,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Epsilon => "epsilon",
            SweepVariable::G => "g",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub variable: SweepVariable,
    pub grid: Grid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quadrature_points: usize,
    pub quadrature_rel_tol: f64,
    pub degeneracy: f64,
    pub secular: f64,
    /// Generator agreement threshold for population and coherence checks.
    pub generator_match: f64,
    /// Smallest Kossakowski eigenvalue still counted as positive.
    pub kossakowski: f64,
    /// Conservation residual relative to the dissipator norm.
    pub conservation: f64,
    /// Thermal distance counted as exact.
    pub thermal: f64,
    /// Bond currents counted as zero.
    pub current_zero: f64,
    pub panel_size: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature_points: 2000,
            quadrature_rel_tol: 1e-8,
            degeneracy: DEFAULT_DEGENERACY_TOL,
            secular: DEFAULT_SECULAR_TOL,
            generator_match: 1e-10,
            kossakowski: 1e-10,
            conservation: 1e-12,
            thermal: 1e-8,
            current_zero: 1e-12,
            panel_size: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    Gibbs,
    Random,
    Ground,
    Top,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveBlock {
    pub times: Grid,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
}

fn default_initial() -> InitialState {
    InitialState::Random
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemBlock,
    pub baths: Vec<BathBlock>,
    #[serde(default = "all_labels")]
    pub qme: Vec<String>,
    pub epsilon: f64,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub evolve: Option<EvolveBlock>,
}

fn all_labels() -> Vec<String> {
    GeneratorKind::ALL.iter().map(|k| k.label().to_string()).collect()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn invalid(path: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: msg.into() }
}

impl ExperimentConfig {
    /// Parses JSON; the error path names the offending field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut path = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.to_string();
            if let Some(field) = missing_field(&message) {
                path = if path == "." { field.to_string() } else { format!("{path}.{field}") };
            }
            invalid(path, message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("config", format!("cannot read {}: {e}", path.display())))?;
        let cfg = Self::from_json(&text)?;
        Ok((cfg, text))
    }

    pub fn kinds(&self) -> Result<Vec<GeneratorKind>, CliError> {
        parse_kinds(&self.qme).map_err(|(i, s)| invalid(format!("qme[{i}]"), format!("unknown master equation {s:?}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.system;
        if s.n_sites == 0 || s.n_sites > 12 {
            return Err(invalid("system.n_sites", format!("{} outside 1..=12", s.n_sites)));
        }
        if s.fields.len() != s.n_sites {
            return Err(invalid("system.fields", format!("{} values for {} sites", s.fields.len(), s.n_sites)));
        }
        for (i, f) in s.fields.iter().enumerate() {
            if !f.is_finite() {
                return Err(invalid(format!("system.fields[{i}]"), "not finite"));
            }
        }
        if !s.g.is_finite() {
            return Err(invalid("system.g", "not finite"));
        }
        if !s.delta.is_finite() {
            return Err(invalid("system.delta", "not finite"));
        }
        if self.baths.is_empty() {
            return Err(invalid("baths", "at least one bath required"));
        }
        let allowed: Vec<usize> = if s.n_sites == 1 { vec![1] } else { vec![1, s.n_sites] };
        for (i, b) in self.baths.iter().enumerate() {
            if !allowed.contains(&b.terminal) {
                return Err(invalid(format!("baths[{i}].terminal"), format!("site {} is not a chain end", b.terminal)));
            }
            if self.baths[..i].iter().any(|o| o.terminal == b.terminal) {
                return Err(invalid(format!("baths[{i}].terminal"), "terminal already has a bath"));
            }
            if !(b.beta > 0.0) || !b.beta.is_finite() {
                return Err(invalid(format!("baths[{i}].beta"), "must be positive"));
            }
            if !(b.mu < 0.0) {
                return Err(invalid(format!("baths[{i}].mu"), "must be negative for bosonic baths"));
            }
            if !(b.omega_c > 0.0) || !b.omega_c.is_finite() {
                return Err(invalid(format!("baths[{i}].omega_c"), "must be positive"));
            }
            if !(b.strength >= 0.0) || !b.strength.is_finite() {
                return Err(invalid(format!("baths[{i}].strength"), "must be nonnegative"));
            }
        }
        if self.qme.is_empty() {
            return Err(invalid("qme", "empty list"));
        }
        self.kinds()?;
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(invalid("epsilon", "must be positive"));
        }
        if let Some(sw) = &self.sweep {
            let v = sw.grid.values();
            if v.is_empty() {
                return Err(invalid("sweep.grid", "empty grid"));
            }
            for (i, x) in v.iter().enumerate() {
                let ok = x.is_finite() && (sw.variable == SweepVariable::G || *x > 0.0);
                if !ok {
                    return Err(invalid(format!("sweep.grid[{i}]"), format!("bad value {x}")));
                }
            }
            if let Grid::Spaced(Spacing::Geomspace { start, stop, .. }) = &sw.grid {
                if !(*start > 0.0 && *stop > 0.0) {
                    return Err(invalid("sweep.grid", "geometric grid needs positive ends"));
                }
            }
        }
        if let Some(ev) = &self.evolve {
            let v = ev.times.values();
            if v.is_empty() {
                return Err(invalid("evolve.times", "empty grid"));
            }
            if let Some(i) = v.iter().position(|t| !(*t >= 0.0) || !t.is_finite()) {
                return Err(invalid(format!("evolve.times[{i}]"), "times must be nonnegative"));
            }
        }
        let t = &self.tolerances;
        if t.quadrature_points < 16 {
            return Err(invalid("tolerances.quadrature_points", "at least 16"));
        }
        if t.panel_size == 0 {
            return Err(invalid("tolerances.panel_size", "must be positive"));
        }
        for (name, v) in [
            ("quadrature_rel_tol", t.quadrature_rel_tol),
            ("degeneracy", t.degeneracy),
            ("secular", t.secular),
            ("generator_match", t.generator_match),
            ("kossakowski", t.kossakowski),
            ("conservation", t.conservation),
            ("thermal", t.thermal),
            ("current_zero", t.current_zero),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("tolerances.{name}"), "must be positive"));
            }
        }
        Ok(())
    }

    /// Chain at coupling g, with every bath replaced by `override_bath` when given.
    pub fn chain_with(&self, g: f64, override_bath: Option<&BathBlock>) -> Result<OpenChain, CliError> {
        let s = &self.system;
        let system = build_xxz(s.n_sites, &s.fields, g, s.delta).map_err(CliError::Numerical)?;
        let mut baths = Vec::new();
        for (i, b) in self.baths.iter().enumerate() {
            let src = override_bath.unwrap_or(b);
            let spectral = qme_core::bath::SpectralFunction::ohmic_gaussian(src.omega_c)
                .and_then(|f| f.with_strength(src.strength))
                .map_err(|e| invalid(format!("baths[{i}]"), e.to_string()))?;
            let spec = BathSpec::new(b.terminal, src.beta, src.mu, spectral)
                .map_err(|e| invalid(format!("baths[{i}]"), e.to_string()))?;
            baths.push(spec);
        }
        OpenChain::new(system, baths, self.tolerances.degeneracy).map_err(CliError::Numerical)
    }

    pub fn chain(&self) -> Result<OpenChain, CliError> {
        self.chain_with(self.system.g, None)
    }

    pub fn equal_baths(&self) -> bool {
        let b0 = &self.baths[0];
        self.baths.iter().all(|b| b.beta == b0.beta && b.mu == b0.mu)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let mut eps = vec![self.epsilon];
        if let Some(sw) = &self.sweep {
            if sw.variable == SweepVariable::Epsilon {
                eps.extend(sw.grid.values());
            }
        }
        let top = eps.iter().copied().fold(0.0, f64::max);
        if top >= WEAK_COUPLING_LIMIT {
            w.push(format!("weak-coupling regime questionable (epsilon = {top})"));
        }
        w
    }
}

fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

pub fn parse_kinds(labels: &[String]) -> Result<Vec<GeneratorKind>, (usize, String)> {
    let mut out = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        let k = GeneratorKind::from_label(l.trim()).ok_or((i, l.clone()))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}
