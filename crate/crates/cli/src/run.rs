//! The ness, sweep, check and evolve commands.

use rayon::prelude::*;

use qme_core::bath::PvQuadrature;
use qme_core::builders::{
    build_eigenbasis_lindblad, build_local_lindblad, build_redfield, build_ule, extract_kossakowski,
    GeneratorKind, GeneratorParts,
};
use qme_core::diagnostics::{
    conservation_audit, current_report, generator_compare_on_diagonals, random_density_matrix, random_panel,
    scaling_slope,
};
use qme_core::linalg::CMatrix;
use qme_core::operator::{gibbs_state, trace_distance, DensityMatrix, OpenChain};
use qme_core::steady::{evolve, solve_ness};
use rand::SeedableRng;

use crate::config::{ExperimentConfig, InitialState, SweepVariable};
use crate::error::CliError;
use crate::table::{config_hash, Cell, ResultTable, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ness,
    Sweep,
    Check,
    Evolve,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ness => "ness",
            Command::Sweep => "sweep",
            Command::Check => "check",
            Command::Evolve => "evolve",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: ResultTable,
    pub warnings: Vec<String>,
    /// First cell of the check matrix that disagrees with the expected pattern.
    pub mismatch: Option<String>,
}

pub fn run(command: Command, cfg: &ExperimentConfig, config_text: &str) -> Result<Outcome, CliError> {
    let mut warnings = cfg.warnings();
    let (mut table, mismatch) = match command {
        Command::Ness => (ness_table(cfg, &mut warnings)?, None),
        Command::Sweep => (sweep_table(cfg, &mut warnings)?, None),
        Command::Check => check_table(cfg, &mut warnings)?,
        Command::Evolve => (evolve_table(cfg, &mut warnings)?, None),
    };
    warnings.sort();
    warnings.dedup();
    let labels: Vec<&str> = cfg.kinds()?.iter().map(|k| k.label()).collect();
    let mut prov = vec![
        ("version".to_string(), format!("qme-cli {VERSION}")),
        ("command".to_string(), command.name().to_string()),
        ("config_sha256".to_string(), config_hash(config_text)),
        ("seed".to_string(), cfg.seed.to_string()),
        ("qme".to_string(), labels.join(",")),
        ("epsilon".to_string(), crate::table::format_number(cfg.epsilon)),
        ("tolerances".to_string(), serde_json::to_string(&cfg.tolerances).expect("tolerances serialize")),
    ];
    for w in &warnings {
        prov.push(("warning".to_string(), w.clone()));
    }
    table.provenance = prov;
    Ok(Outcome { table, warnings, mismatch })
}

fn quadrature(cfg: &ExperimentConfig) -> Result<PvQuadrature, CliError> {
    Ok(PvQuadrature::new(cfg.tolerances.quadrature_points, cfg.tolerances.quadrature_rel_tol)?)
}

pub fn build(kind: GeneratorKind, chain: &OpenChain, eps: f64, cfg: &ExperimentConfig) -> Result<GeneratorParts, CliError> {
    let q = quadrature(cfg)?;
    let parts = match kind {
        GeneratorKind::Redfield => build_redfield(chain, eps, &q),
        GeneratorKind::LocalLindblad => build_local_lindblad(chain, eps, &q),
        GeneratorKind::EigenbasisLindblad => build_eigenbasis_lindblad(chain, eps, &q, cfg.tolerances.secular),
        GeneratorKind::Universal => build_ule(chain, eps, &q),
    }?;
    Ok(parts)
}

fn text(s: &str) -> Cell {
    Cell::Text(s.to_string())
}

fn point_columns(chain: &OpenChain) -> Vec<String> {
    let n = chain.system().n_sites();
    let mut c: Vec<String> = ["qme", "row", "epsilon", "g", "thermal_distance"].iter().map(|s| s.to_string()).collect();
    c.extend((1..=n).map(|k| format!("sz_{k}")));
    c.extend((0..chain.dim()).map(|a| format!("pop_{a}")));
    c.extend((1..n).map(|j| format!("bond_current_{j}")));
    for b in chain.baths() {
        c.push(format!("boundary_current_{}", b.terminal()));
    }
    for b in chain.baths() {
        c.push(format!("energy_boundary_{}", b.terminal()));
    }
    for s in [
        "energy_current_lm",
        "energy_current_mr",
        "bond_imbalance",
        "continuity_max",
        "boundary_dev_re",
        "bond_rel_dev_re",
        "conservation_residual",
        "kossakowski_min",
        "gap",
        "residual",
    ] {
        c.push(s.to_string());
    }
    c
}

/// Everything measured at one (generator, parameter) point, before cross-generator columns.
struct Point {
    kind: GeneratorKind,
    epsilon: f64,
    g: f64,
    values: Vec<f64>,
    boundary_first: f64,
    bond_first: f64,
    extra: [f64; 4],
}

fn measure(cfg: &ExperimentConfig, chain: &OpenChain, parts: &GeneratorParts, g: f64) -> Result<Point, CliError> {
    let ness = solve_ness(parts)?;
    let rho = ness.rho_ness.matrix();
    let sys = chain.system();
    let mut v = Vec::new();
    v.push(thermal_distance(cfg, chain, rho)?);
    for k in 1..=sys.n_sites() {
        v.push(ness.rho_ness.expectation(&sys.sigma_z(k)).re);
    }
    let eig = chain.basis().to_eigen(rho);
    v.extend((0..chain.dim()).map(|a| eig[(a, a)].re));
    let rep = current_report(parts, chain, rho)?;
    v.extend(rep.bond_currents.iter().copied());
    v.extend(rep.boundary_currents.iter().map(|x| x.1));
    v.extend(rep.energy_boundary_currents.iter().map(|x| x.1));
    v.push(rep.energy_bond_currents.0);
    v.push(rep.energy_bond_currents.1);
    let imbalance = match (rep.bond_currents.first(), rep.bond_currents.last()) {
        (Some(a), Some(b)) => a - b,
        _ => 0.0,
    };
    v.push(imbalance);
    v.push(rep.continuity_residuals.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
    let ops = sys.conserved_candidates();
    let conservation = if ops.is_empty() {
        0.0
    } else {
        let panel = random_panel(chain.dim(), cfg.tolerances.panel_size, cfg.seed);
        let a = conservation_audit(parts, chain, &ops, &panel)?;
        a.max_residual / a.dissipator_norm.max(f64::MIN_POSITIVE)
    };
    let kmin = extract_kossakowski(parts)?.min_eigenvalue;
    Ok(Point {
        kind: parts.kind,
        epsilon: parts.epsilon,
        g,
        values: v,
        boundary_first: rep.boundary_currents[0].1,
        bond_first: rep.bond_currents.first().copied().unwrap_or(f64::NAN),
        extra: [conservation, kmin, ness.gap, ness.residual],
    })
}

fn thermal_distance(cfg: &ExperimentConfig, chain: &OpenChain, rho: &CMatrix) -> Result<f64, CliError> {
    if !cfg.equal_baths() {
        return Ok(f64::NAN);
    }
    let b = &cfg.baths[0];
    let g = gibbs_state(chain.system(), b.beta, b.mu)?;
    Ok(trace_distance(rho, g.matrix())?)
}

/// Rows for a set of points sharing (epsilon, g), with deviations from the Redfield point.
fn rows_for(group: &[Point]) -> Vec<Vec<Cell>> {
    let re = group.iter().find(|p| p.kind == GeneratorKind::Redfield);
    group
        .iter()
        .map(|p| {
            let (dev, rel) = match re {
                Some(r) => (p.boundary_first - r.boundary_first, (-p.boundary_first - r.bond_first).abs() / r.bond_first.abs()),
                None => (f64::NAN, f64::NAN),
            };
            let mut row = vec![text(p.kind.label()), text("point"), Cell::Num(p.epsilon), Cell::Num(p.g)];
            row.extend(p.values.iter().map(|&x| Cell::Num(x)));
            row.push(Cell::Num(dev));
            row.push(Cell::Num(rel));
            row.extend(p.extra.iter().map(|&x| Cell::Num(x)));
            row
        })
        .collect()
}

fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("QME_WORKERS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::Config {
            path: "QME_WORKERS".to_string(),
            message: format!("not a worker count: {v:?}"),
        })?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Io(std::io::Error::other(e)))
}

fn collect_warnings(parts: &GeneratorParts, warnings: &mut Vec<String>) {
    for w in &parts.warnings {
        warnings.push(format!("{}: {w}", parts.kind.label()));
    }
}

fn ness_table(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<ResultTable, CliError> {
    let chain = cfg.chain()?;
    let kinds = cfg.kinds()?;
    let pool = pool()?;
    let results: Vec<Result<(Point, Vec<String>), CliError>> = pool.install(|| {
        kinds
            .par_iter()
            .map(|&k| {
                let parts = build(k, &chain, cfg.epsilon, cfg)?;
                Ok((measure(cfg, &chain, &parts, cfg.system.g)?, parts.warnings.clone()))
            })
            .collect()
    });
    let mut pts = Vec::new();
    for r in results {
        let (p, w) = r?;
        warnings.extend(w.into_iter().map(|w| format!("{}: {w}", p.kind.label())));
        pts.push(p);
    }
    let mut table = ResultTable::new(point_columns(&chain));
    for row in rows_for(&pts) {
        table.push(row);
    }
    Ok(table)
}

fn sweep_table(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<ResultTable, CliError> {
    let sw = cfg.sweep.as_ref().ok_or_else(|| CliError::Config {
        path: "sweep".to_string(),
        message: "sweep block required".to_string(),
    })?;
    let grid = sw.grid.values();
    let kinds = cfg.kinds()?;
    let pool = pool()?;
    let base_chain = cfg.chain()?;
    let points: Vec<Point> = match sw.variable {
        SweepVariable::Epsilon => {
            let bases: Vec<GeneratorParts> = pool
                .install(|| kinds.par_iter().map(|&k| build(k, &base_chain, cfg.epsilon, cfg)).collect::<Result<_, _>>())?;
            for b in &bases {
                collect_warnings(b, warnings);
            }
            let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|i| (0..kinds.len()).map(move |k| (i, k))).collect();
            pool.install(|| {
                jobs.par_iter()
                    .map(|&(i, k)| {
                        let p = bases[k].with_epsilon(grid[i])?;
                        measure(cfg, &base_chain, &p, cfg.system.g)
                    })
                    .collect::<Result<_, _>>()
            })?
        }
        SweepVariable::G => {
            let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|i| (0..kinds.len()).map(move |k| (i, k))).collect();
            let out: Vec<(Point, Vec<String>)> = pool.install(|| {
                jobs.par_iter()
                    .map(|&(i, k)| {
                        let chain = cfg.chain_with(grid[i], None)?;
                        let p = build(kinds[k], &chain, cfg.epsilon, cfg)?;
                        Ok((measure(cfg, &chain, &p, grid[i])?, p.warnings.clone()))
                    })
                    .collect::<Result<_, CliError>>()
            })?;
            out.into_iter()
                .map(|(p, w)| {
                    warnings.extend(w.into_iter().map(|w| format!("{} at g = {}: {w}", p.kind.label(), p.g)));
                    p
                })
                .collect()
        }
    };
    let mut table = ResultTable::new(point_columns(&base_chain));
    let mut by_kind: Vec<Vec<Vec<Cell>>> = vec![Vec::new(); kinds.len()];
    for group in points.chunks(kinds.len()) {
        for (k, row) in rows_for(group).into_iter().enumerate() {
            by_kind[k].push(row.clone());
            table.push(row);
        }
    }
    let width = table.columns.len();
    for (k, rows) in by_kind.iter().enumerate() {
        let col = |j: usize| rows.iter().map(|r| r[j].num().unwrap_or(f64::NAN)).collect::<Vec<f64>>();
        let mut max_row = vec![text(kinds[k].label()), text("max_abs")];
        for j in 2..width {
            max_row.push(Cell::Num(col(j).iter().fold(f64::NAN, |m, x| if x.is_nan() { m } else { m.max(x.abs()) })));
        }
        table.push(max_row);
        if sw.variable == SweepVariable::Epsilon {
            let mut slope_row = vec![text(kinds[k].label()), text("slope")];
            for j in 2..width {
                let s = if j < 4 { f64::NAN } else { scaling_slope(&grid, &col(j)).map(|f| f.slope).unwrap_or(f64::NAN) };
                slope_row.push(Cell::Num(s));
            }
            table.push(slope_row);
        }
    }
    Ok(table)
}

type CheckRow = (Vec<f64>, [bool; 6]);
type Trajectory = (Vec<Vec<f64>>, Vec<String>);

/// Cells of the condition matrix in column order.
pub const CHECK_CELLS: [&str; 6] = ["population", "coherence", "thermalization", "conservation", "positivity", "bond_zero"];

/// Pass/fail pattern each generator is expected to show; `None` means not checked.
pub fn expected_pattern(kind: GeneratorKind, n_sites: usize, has_conserved: bool) -> [Option<bool>; 6] {
    if n_sites == 1 {
        return [Some(true), Some(true), Some(true), Some(true), Some(true), None];
    }
    let cons = !has_conserved;
    match kind {
        GeneratorKind::Redfield => [Some(true), Some(true), Some(true), Some(true), Some(false), None],
        GeneratorKind::Universal => [Some(true), Some(false), Some(true), Some(cons), Some(true), None],
        GeneratorKind::LocalLindblad => [Some(false), Some(false), Some(false), Some(true), Some(true), None],
        GeneratorKind::EigenbasisLindblad => [Some(true), Some(false), Some(true), Some(cons), Some(true), Some(true)],
    }
}

fn check_table(cfg: &ExperimentConfig, _warnings: &mut Vec<String>) -> Result<(ResultTable, Option<String>), CliError> {
    let tol = &cfg.tolerances;
    let chain = cfg.chain()?;
    let eq_chain = cfg.chain_with(cfg.system.g, Some(&cfg.baths[0]))?;
    let kinds = cfg.kinds()?;
    let pool = pool()?;
    let reference = build(GeneratorKind::Redfield, &chain, cfg.epsilon, cfg)?;
    let ops = chain.system().conserved_candidates();
    let panel = random_panel(chain.dim(), tol.panel_size, cfg.seed);
    let eq_gibbs = gibbs_state(eq_chain.system(), cfg.baths[0].beta, cfg.baths[0].mu)?;
    let rows: Vec<Result<CheckRow, CliError>> = pool.install(|| {
        kinds
            .par_iter()
            .map(|&k| {
                let parts = if k == GeneratorKind::Redfield { reference.clone() } else { build(k, &chain, cfg.epsilon, cfg)? };
                let (pd, cd) = generator_compare_on_diagonals(&parts, &reference, chain.basis(), tol.panel_size, cfg.seed)?;
                let eq = build(k, &eq_chain, cfg.epsilon, cfg)?;
                let d1 = trace_distance(solve_ness(&eq)?.rho_ness.matrix(), eq_gibbs.matrix())?;
                let half = eq.with_epsilon(cfg.epsilon / 2.0)?;
                let d2 = trace_distance(solve_ness(&half)?.rho_ness.matrix(), eq_gibbs.matrix())?;
                let therm = d1 < tol.thermal || d2 <= 0.5 * d1;
                let cons = if ops.is_empty() {
                    0.0
                } else {
                    let a = conservation_audit(&parts, &chain, &ops, &panel)?;
                    a.max_residual / a.dissipator_norm.max(f64::MIN_POSITIVE)
                };
                let kmin = extract_kossakowski(&parts)?.min_eigenvalue;
                let ness = solve_ness(&parts)?;
                let rep = current_report(&parts, &chain, ness.rho_ness.matrix())?;
                let bmax = rep.bond_currents.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
                let flags = [
                    pd < tol.generator_match,
                    cd < tol.generator_match,
                    therm,
                    cons < tol.conservation,
                    kmin >= -tol.kossakowski,
                    bmax < tol.current_zero,
                ];
                Ok((vec![pd, cd, d1, d2, cons, kmin, bmax], flags))
            })
            .collect()
    });
    let mut cols: Vec<String> = ["qme", "row", "population_dev", "coherence_dev", "thermal_distance", "thermal_distance_half", "conservation_residual", "kossakowski_min", "bond_current_max"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(CHECK_CELLS.iter().map(|c| format!("{c}_pass")));
    cols.extend(CHECK_CELLS.iter().map(|c| format!("{c}_expected")));
    let mut table = ResultTable::new(cols);
    let mut mismatch = None;
    let n = chain.system().n_sites();
    for (k, r) in kinds.iter().zip(rows) {
        let (vals, flags) = r?;
        let exp = expected_pattern(*k, n, !ops.is_empty());
        let mut row = vec![text(k.label()), text("check")];
        row.extend(vals.into_iter().map(Cell::Num));
        row.extend(flags.iter().map(|&f| Cell::Num(if f { 1.0 } else { 0.0 })));
        row.extend(exp.iter().map(|e| Cell::Num(match e {
            Some(true) => 1.0,
            Some(false) => 0.0,
            None => f64::NAN,
        })));
        for (c, (f, e)) in CHECK_CELLS.iter().zip(flags.iter().zip(exp.iter())) {
            if let Some(e) = e {
                if f != e && mismatch.is_none() {
                    let word = |b: bool| if b { "pass" } else { "fail" };
                    mismatch = Some(format!("{}.{c}: expected {}, got {}", k.label(), word(*e), word(*f)));
                }
            }
        }
        table.push(row);
    }
    Ok((table, mismatch))
}

fn initial_state(cfg: &ExperimentConfig, chain: &OpenChain, which: InitialState) -> Result<DensityMatrix, CliError> {
    let b = chain.basis();
    let d = chain.dim();
    Ok(match which {
        InitialState::Gibbs => gibbs_state(chain.system(), cfg.baths[0].beta, cfg.baths[0].mu)?,
        InitialState::Random => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
            random_density_matrix(d, &mut rng)
        }
        InitialState::Ground => DensityMatrix::pure(&b.vectors().column(0).into_owned())?,
        InitialState::Top => DensityMatrix::pure(&b.vectors().column(d - 1).into_owned())?,
    })
}

fn evolve_table(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<ResultTable, CliError> {
    let ev = cfg.evolve.as_ref().ok_or_else(|| CliError::Config {
        path: "evolve".to_string(),
        message: "evolve block required".to_string(),
    })?;
    let times = ev.times.values();
    let chain = cfg.chain()?;
    let kinds = cfg.kinds()?;
    let rho0 = initial_state(cfg, &chain, ev.initial)?;
    let n = chain.system().n_sites();
    let mut cols: Vec<String> = ["qme", "row", "time", "trace", "min_eigenvalue", "hermiticity_deviation", "distance_to_ness"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((1..=n).map(|k| format!("sz_{k}")));
    cols.extend((1..n).map(|j| format!("bond_current_{j}")));
    let mut table = ResultTable::new(cols);
    let pool = pool()?;
    let results: Vec<Result<Trajectory, CliError>> = pool.install(|| {
        kinds
            .par_iter()
            .map(|&k| {
                let parts = build(k, &chain, cfg.epsilon, cfg)?;
                let ness = solve_ness(&parts)?;
                let sys = chain.system();
                let mut out = Vec::new();
                for &t in &times {
                    let r = evolve(&parts, &rho0, t)?;
                    let m = r.rho.matrix();
                    let mut v = vec![t, m.trace().re, r.rho.min_eigenvalue(), r.hermiticity_deviation];
                    v.push(trace_distance(m, ness.rho_ness.matrix())?);
                    v.extend((1..=n).map(|s| r.rho.expectation(&sys.sigma_z(s)).re));
                    for j in 1..n {
                        v.push(qme_core::diagnostics::bond_current(m, sys, j)?);
                    }
                    out.push(v);
                }
                Ok((out, parts.warnings.clone()))
            })
            .collect()
    });
    for (k, r) in kinds.iter().zip(results) {
        let (rows, w) = r?;
        warnings.extend(w.into_iter().map(|w| format!("{}: {w}", k.label())));
        for v in rows {
            let mut row = vec![text(k.label()), text("time")];
            row.extend(v.into_iter().map(Cell::Num));
            table.push(row);
        }
    }
    Ok(table)
}
