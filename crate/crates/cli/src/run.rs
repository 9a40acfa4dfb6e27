//! Subcommand drivers. The `run_*` functions compute; the command functions
//! also write files.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use spinbath_core::closed_form::{
    bessel_identity_residual, effective_sigma2, stationary_oracle, stationary_printed, stationary_z,
    BesselIntegrals, CharacteristicFunctionSpec,
};
use spinbath_core::configsum::ConfigSumEngine;
use spinbath_core::oracle::HilbertOracle;
use spinbath_core::{Beta, Engine, Model, Series};

use crate::config::{InitialState, NamedState, RunConfig, StationaryConfig};
use crate::error::CliError;
use crate::output::{self, VERSION};

/// Configuration-sum runs at least this large report progress on stderr.
const PROGRESS_MIN_MODES: usize = 20;

/// Agreement required between a pair of exact engines; `None` for pairs
/// that involve the Gaussian limit, which are only reported.
pub fn pair_tolerance(a: Engine, b: Engine) -> Option<f64> {
    use Engine::*;
    match (a.min(b), a.max(b)) {
        (Oracle, ConfigSum) => Some(1e-10),
        (Oracle, Integral) | (ConfigSum, Integral) => Some(1e-6),
        _ => None,
    }
}

pub struct EngineRun {
    pub series: Series,
    /// Printed-convention coherence, for the Bessel-integral engines.
    pub printed: Option<Vec<Complex<f64>>>,
}

fn progress_reporter(total_label: &'static str) -> impl Fn(usize, usize) + Sync {
    let last = AtomicUsize::new(0);
    move |done, total| {
        let decile = (done * 10).checked_div(total).unwrap_or(10);
        if decile > last.fetch_max(decile, Ordering::Relaxed) {
            eprintln!("{total_label}: {}% ({done}/{total} chunks)", decile * 10);
        }
    }
}

pub fn run_engine(engine: Engine, config: &RunConfig, model: &Model, times: &[f64]) -> Result<EngineRun, CliError> {
    let seed = config.seed;
    let series = match engine {
        Engine::Oracle => HilbertOracle::new(model)?.time_series(model, times, seed)?,
        Engine::ConfigSum => {
            let report = progress_reporter("configsum");
            let mut e = ConfigSumEngine::new(model)?;
            if model.len() >= PROGRESS_MIN_MODES {
                e = e.with_progress(&report);
            }
            e.time_series(times, seed)?
        }
        Engine::Integral | Engine::Gaussian => {
            if !model.initial_state().is_excited() {
                return Err(spinbath_core::Error::UnsupportedInitialState { engine: engine.name() }.into());
            }
            let spec = if engine == Engine::Integral {
                CharacteristicFunctionSpec::ExactProduct(model.clone())
            } else {
                let (c_total, omega) = config.gaussian_parameters()?;
                CharacteristicFunctionSpec::gaussian(c_total, model.beta(), omega)?
            };
            let reach = 2.0 * times.last().copied().unwrap_or(0.0).max(0.0);
            let run = BesselIntegrals::new(&spec, model.delta(), reach, config.quadrature.settings()?)?
                .trajectory(times, model.fingerprint(seed))?;
            return Ok(EngineRun {
                series: run.trajectory,
                printed: Some(run.printed),
            });
        }
    };
    Ok(EngineRun { series, printed: None })
}

/// Runs every configured engine on the configured grid.
pub fn run_engines(config: &RunConfig) -> Result<(Model, Vec<EngineRun>), CliError> {
    let model = config.build_model()?;
    let times = config.grid.times()?;
    let runs = config
        .engines
        .iter()
        .map(|&e| run_engine(e, config, &model, &times))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((model, runs))
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDeviation {
    pub a: Engine,
    pub b: Engine,
    pub max_sz_deviation: f64,
    pub max_rho10_deviation: f64,
    /// Largest entrywise deviation of the reduced density matrices.
    pub max_state_deviation: f64,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

pub fn pair_deviation(a: &Series, b: &Series) -> PairDeviation {
    let mut d = PairDeviation {
        a: a.engine,
        b: b.engine,
        max_sz_deviation: 0.0,
        max_rho10_deviation: 0.0,
        max_state_deviation: 0.0,
        tolerance: pair_tolerance(a.engine, b.engine),
        pass: None,
    };
    for (p, q) in a.points.iter().zip(&b.points) {
        d.max_sz_deviation = d.max_sz_deviation.max((p.sz - q.sz).abs());
        d.max_rho10_deviation = d.max_rho10_deviation.max((p.rho10 - q.rho10).norm());
        d.max_state_deviation = d.max_state_deviation.max(p.state.max_abs_diff(&q.state));
    }
    d.pass = d
        .tolerance
        .map(|tol| d.max_sz_deviation <= tol && d.max_state_deviation <= tol);
    d
}

/// `Re ρ10` printed over reconciled, at points where the latter is not tiny.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionRatio {
    pub engine: Engine,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: usize,
}

pub fn convention_ratio(run: &EngineRun) -> Option<ConventionRatio> {
    let printed = run.printed.as_ref()?;
    let ratios: Vec<f64> = run
        .series
        .points
        .iter()
        .zip(printed)
        .filter(|(p, _)| p.rho10.re.abs() > 1e-8)
        .map(|(p, q)| q.re / p.rho10.re)
        .collect();
    Some(ConventionRatio {
        engine: run.series.engine,
        min: ratios.iter().copied().reduce(f64::min),
        max: ratios.iter().copied().reduce(f64::max),
        points: ratios.len(),
    })
}

pub struct Comparison {
    pub model: Model,
    pub runs: Vec<EngineRun>,
    pub pairs: Vec<PairDeviation>,
    pub ratios: Vec<ConventionRatio>,
    pub pass: bool,
}

pub fn run_compare(config: &RunConfig) -> Result<Comparison, CliError> {
    if config.engines.len() < 2 {
        return Err(CliError::config("engines", "compare needs at least two engines"));
    }
    let (model, runs) = run_engines(config)?;
    let mut pairs = Vec::new();
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            pairs.push(pair_deviation(&a.series, &b.series));
        }
    }
    let ratios = runs.iter().filter_map(convention_ratio).collect();
    let pass = pairs.iter().all(|p| p.pass != Some(false));
    Ok(Comparison {
        model,
        runs,
        pairs,
        ratios,
        pass,
    })
}

#[derive(Serialize)]
struct Tolerances {
    quadrature_abs_tol: f64,
    quadrature_rel_tol: f64,
    outer_abs_tol: f64,
    pair_gates: Vec<(Engine, Engine, f64)>,
}

fn tolerances(config: &RunConfig) -> Result<Tolerances, CliError> {
    let s = config.quadrature.settings()?;
    let mut gates = Vec::new();
    for (i, &a) in config.engines.iter().enumerate() {
        for &b in &config.engines[i + 1..] {
            if let Some(t) = pair_tolerance(a, b) {
                gates.push((a, b, t));
            }
        }
    }
    Ok(Tolerances {
        quadrature_abs_tol: s.inner.abs_tol,
        quadrature_rel_tol: s.inner.rel_tol,
        outer_abs_tol: s.outer_abs_tol,
        pair_gates: gates,
    })
}

#[derive(Serialize)]
struct TrajectorySummary<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    fingerprint: String,
    modes: usize,
    engines: &'a [Engine],
    tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<&'a [PairDeviation]>,
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    printed_to_reconciled_re_ratio: &'a [ConventionRatio],
    pass: bool,
    csv: String,
    config: &'a RunConfig,
}

/// Result of a command: whether all gates passed and what was written.
pub struct Outcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
}

#[allow(clippy::too_many_arguments)]
fn write_trajectory_outputs(
    command: &'static str,
    config: &RunConfig,
    out_dir: &Path,
    model: &Model,
    runs: &[EngineRun],
    pairs: Option<&[PairDeviation]>,
    ratios: &[ConventionRatio],
    pass: bool,
) -> Result<Outcome, CliError> {
    let csv_path = output::resolve(out_dir, config.output.csv.as_deref(), &format!("{command}.csv"));
    let summary_path = output::resolve(out_dir, config.output.summary.as_deref(), &format!("{command}.json"));
    let series: Vec<Series> = runs.iter().map(|r| r.series.clone()).collect();
    output::write_csv(&series, &csv_path)?;
    let summary = TrajectorySummary {
        command,
        version: VERSION,
        seed: config.seed,
        fingerprint: model.fingerprint(config.seed),
        modes: model.len(),
        engines: &config.engines,
        tolerances: tolerances(config)?,
        pairs,
        printed_to_reconciled_re_ratio: ratios,
        pass,
        csv: csv_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        config,
    };
    output::write_summary(&summary, &summary_path)?;
    Ok(Outcome {
        pass,
        files: vec![csv_path, summary_path],
    })
}

pub fn simulate(config: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let (model, runs) = run_engines(config)?;
    let ratios: Vec<ConventionRatio> = runs.iter().filter_map(convention_ratio).collect();
    write_trajectory_outputs("simulate", config, out_dir, &model, &runs, None, &ratios, true)
}

pub fn compare(config: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let c = run_compare(config)?;
    write_trajectory_outputs("compare", config, out_dir, &c.model, &c.runs, Some(&c.pairs), &c.ratios, c.pass)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Average {
    pub sz: f64,
    pub re_rho10: f64,
    pub im_rho10: f64,
}

/// Closed-form stationary values next to the finite-`N` time average.
#[derive(Debug, Clone, Serialize)]
pub struct StationaryRecord {
    pub delta: f64,
    pub c_total: f64,
    pub beta: Beta,
    pub omega: f64,
    pub sigma2: f64,
    pub z: f64,
    /// Printed formula; absent when it is undefined (`C = 0`).
    pub printed_value: Option<f64>,
    pub oracle_value: f64,
    pub ratio: Option<f64>,
    pub modes: usize,
    pub window: [f64; 2],
    pub samples: usize,
    pub excited: Average,
    pub ground: Average,
    /// Exact infinite-time average for the sampled couplings.
    pub dephased_sz: f64,
    /// `(excited.sz - oracle) / oracle`.
    pub deviation_from_oracle: f64,
    pub within_two_percent: bool,
    /// `Σ g² / cosh²(β ω)` of the drawn couplings and the oracle at that variance.
    pub realized_sigma2: f64,
    pub oracle_at_realized_sigma2: f64,
    /// `|excited.sz + ground.sz|`
    pub sign_flip_residual: f64,
    /// Thermal `⟨σ_z⟩` of the bare spin, `-tanh(βΔ)`.
    pub canonical_sz: f64,
    pub differs_from_canonical: bool,
}

fn average(model: &Model, window: [f64; 2], samples: usize) -> Result<Average, CliError> {
    let (sz, rho10) = ConfigSumEngine::new(model)?.stationary_time_average(window[0], window[1], samples)?;
    Ok(Average {
        sz,
        re_rho10: rho10.re,
        im_rho10: rho10.im,
    })
}

pub fn run_stationary(config: &RunConfig) -> Result<StationaryRecord, CliError> {
    let sampler = config
        .model
        .sampler
        .ok_or_else(|| CliError::config("model.sampler", "the stationary analysis needs a sampled bath"))?;
    let delta = config.model.delta;
    let beta = config.beta();
    let (c_total, omega) = (sampler.c_total, sampler.omega);
    let sigma2 = effective_sigma2(c_total, beta, omega);
    let oracle_value = stationary_oracle(delta, sigma2)?;
    let printed_value = stationary_printed(delta, c_total, beta, omega).ok();

    let window_cfg = config.stationary.unwrap_or_default();
    let scale = if sigma2 > 0.0 { sigma2.sqrt().recip() } else { 1.0 };
    let window = [
        window_cfg.t_start.unwrap_or(100.0 * scale),
        window_cfg.t_end.unwrap_or(200.0 * scale),
    ];
    check_window(&window_cfg, window)?;

    let mut excited_cfg = config.clone();
    excited_cfg.model.initial_state = InitialState::Named(NamedState::Excited);
    let excited_model = excited_cfg.build_model()?;
    let mut ground_cfg = config.clone();
    ground_cfg.model.initial_state = InitialState::Named(NamedState::Ground);
    let ground_model = ground_cfg.build_model()?;

    let excited = average(&excited_model, window, window_cfg.samples)?;
    let ground = average(&ground_model, window, window_cfg.samples)?;
    let dephased_sz = ConfigSumEngine::new(&excited_model)?.dephased_limit().magnetization();

    let realized_sigma2: f64 = excited_model
        .modes()
        .iter()
        .map(|m| m.coupling * m.coupling / beta.cosh2_beta_omega(m.omega))
        .sum();
    let canonical_sz = match beta.finite() {
        Some(b) => -(b * delta).tanh(),
        None if delta == 0.0 => 0.0,
        None => -delta.signum(),
    };
    let deviation = if oracle_value != 0.0 {
        (excited.sz - oracle_value) / oracle_value
    } else {
        excited.sz - oracle_value
    };
    Ok(StationaryRecord {
        delta,
        c_total,
        beta,
        omega,
        sigma2,
        z: stationary_z(delta, c_total, beta, omega),
        printed_value,
        oracle_value,
        ratio: printed_value.filter(|_| oracle_value != 0.0).map(|p| p / oracle_value),
        modes: excited_model.len(),
        window,
        samples: window_cfg.samples,
        excited,
        ground,
        dephased_sz,
        deviation_from_oracle: deviation,
        within_two_percent: deviation.abs() <= 0.02,
        realized_sigma2,
        oracle_at_realized_sigma2: stationary_oracle(delta, realized_sigma2)?,
        sign_flip_residual: (excited.sz + ground.sz).abs(),
        canonical_sz,
        differs_from_canonical: (excited.sz - canonical_sz).abs() > 0.02,
    })
}

fn check_window(cfg: &StationaryConfig, window: [f64; 2]) -> Result<(), CliError> {
    if !(window[0] >= 0.0 && window[1] > window[0] && window[1].is_finite()) {
        return Err(CliError::config(
            "stationary",
            format!("window must satisfy 0 <= t_start < t_end, got [{}, {}]", window[0], window[1]),
        ));
    }
    if cfg.samples == 0 {
        return Err(CliError::config("stationary.samples", "must be positive"));
    }
    Ok(())
}

#[derive(Serialize)]
struct StationarySummary<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    fingerprint: String,
    report: &'a StationaryRecord,
    config: &'a RunConfig,
}

pub fn stationary(config: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let record = run_stationary(config)?;
    let path = output::resolve(out_dir, config.output.summary.as_deref(), "stationary.json");
    let summary = StationarySummary {
        command: "stationary",
        version: VERSION,
        seed: config.seed,
        fingerprint: config.build_model()?.fingerprint(config.seed),
        report: &record,
        config,
    };
    output::write_summary(&summary, &path)?;
    Ok(Outcome {
        pass: true,
        files: vec![path],
    })
}

/// Grid points used by the identity check: five per axis over `[0, 5]`.
pub const IDENTITY_AXIS: [f64; 5] = [0.0, 1.25, 2.5, 3.75, 5.0];
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityRecord {
    pub delta: f64,
    pub omega: f64,
    pub eta: f64,
    pub residual: f64,
}

pub fn run_identity_check() -> Result<Vec<IdentityRecord>, CliError> {
    let grid: Vec<[f64; 3]> = IDENTITY_AXIS
        .iter()
        .flat_map(|&d| IDENTITY_AXIS.iter().flat_map(move |&w| IDENTITY_AXIS.iter().map(move |&e| [d, w, e])))
        .collect();
    grid.par_iter()
        .map(|&[delta, omega, eta]| {
            Ok(IdentityRecord {
                delta,
                omega,
                eta,
                residual: bessel_identity_residual(delta, omega, eta)?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct IdentitySummary<'a> {
    command: &'static str,
    version: &'static str,
    points: usize,
    max_residual: f64,
    worst: Option<&'a IdentityRecord>,
    tolerance: f64,
    pass: bool,
    csv: String,
}

pub fn identity_check(config: Option<&RunConfig>, out_dir: &Path) -> Result<Outcome, CliError> {
    let records = run_identity_check()?;
    let csv_name = config.and_then(|c| c.output.csv.as_deref());
    let summary_name = config.and_then(|c| c.output.summary.as_deref());
    let csv_path = output::resolve(out_dir, csv_name, "identity.csv");
    let summary_path = output::resolve(out_dir, summary_name, "identity.json");
    let rows: Vec<Vec<Option<f64>>> = records
        .iter()
        .map(|r| vec![Some(r.delta), Some(r.omega), Some(r.eta), Some(r.residual)])
        .collect();
    output::write_file(&csv_path, &output::table_csv(&["delta", "omega", "eta", "residual"], &rows))?;
    let worst = records.iter().max_by(|a, b| a.residual.total_cmp(&b.residual));
    let max_residual = worst.map_or(0.0, |r| r.residual);
    let pass = max_residual <= IDENTITY_TOL;
    output::write_summary(
        &IdentitySummary {
            command: "identity-check",
            version: VERSION,
            points: records.len(),
            max_residual,
            worst,
            tolerance: IDENTITY_TOL,
            pass,
            csv: csv_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        },
        &summary_path,
    )?;
    Ok(Outcome {
        pass,
        files: vec![csv_path, summary_path],
    })
}

/// One stationary record per point of the `Δ × C × β` grid.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<StationaryRecord>, CliError> {
    let sampler = config
        .model
        .sampler
        .ok_or_else(|| CliError::config("model.sampler", "a sweep needs a sampled bath"))?;
    let sweep = config.sweep.clone().unwrap_or_default();
    let or_own = |v: &[f64], own: f64| if v.is_empty() { vec![own] } else { v.to_vec() };
    let deltas = or_own(&sweep.delta, config.model.delta);
    let cs = or_own(&sweep.c_total, sampler.c_total);
    let betas = or_own(&sweep.beta, config.model.beta);
    let mut records = Vec::with_capacity(deltas.len() * cs.len() * betas.len());
    for &delta in &deltas {
        for &c_total in &cs {
            for &beta in &betas {
                let mut point = config.clone();
                point.model.delta = delta;
                point.model.beta = beta;
                point.model.sampler.as_mut().unwrap().c_total = c_total;
                point.validate()?;
                records.push(run_stationary(&point)?);
            }
        }
    }
    Ok(records)
}

const SWEEP_HEADER: [&str; 13] = [
    "delta",
    "c_total",
    "beta",
    "sigma2",
    "z",
    "printed",
    "oracle",
    "ratio",
    "time_average_sz",
    "deviation_from_oracle",
    "ground_time_average_sz",
    "time_average_re_rho10",
    "time_average_im_rho10",
];

#[derive(Serialize)]
struct SweepSummary<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    points: &'a [StationaryRecord],
    csv: String,
    config: &'a RunConfig,
}

pub fn sweep(config: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let records = run_sweep(config)?;
    let csv_path = output::resolve(out_dir, config.output.csv.as_deref(), "sweep.csv");
    let summary_path = output::resolve(out_dir, config.output.summary.as_deref(), "sweep.json");
    let rows: Vec<Vec<Option<f64>>> = records
        .iter()
        .map(|r| {
            vec![
                Some(r.delta),
                Some(r.c_total),
                r.beta.finite().or(Some(f64::INFINITY)),
                Some(r.sigma2),
                Some(r.z),
                r.printed_value,
                Some(r.oracle_value),
                r.ratio,
                Some(r.excited.sz),
                Some(r.deviation_from_oracle),
                Some(r.ground.sz),
                Some(r.excited.re_rho10),
                Some(r.excited.im_rho10),
            ]
        })
        .collect();
    output::write_file(&csv_path, &output::table_csv(&SWEEP_HEADER, &rows))?;
    output::write_summary(
        &SweepSummary {
            command: "sweep",
            version: VERSION,
            seed: config.seed,
            points: &records,
            csv: csv_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            config,
        },
        &summary_path,
    )?;
    Ok(Outcome {
        pass: true,
        files: vec![csv_path, summary_path],
    })
}
