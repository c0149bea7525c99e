//! Experiment pipelines. Each stage is timed and recorded; a failing stage
//! stops the run but everything already written stays on disk and is listed
//! in the manifest.

use std::path::Path;

use dwlab_core::decay::{decay_experiment, CauchyData, DecayOptions};
use dwlab_core::dynamics::{
    a_u_weight, au_trajectory, birkhoff_average, min_time_average, sample_phase_points, DampingField,
    DoublingMap, Dynamics, GeodesicFlow, PhasePoint, PhaseSpace,
};
use dwlab_core::io::{self, SeriesPoint};
use dwlab_core::pressure::{
    gap_condition, pressure_cover, pressure_schedule, pressure_separated, pressure_transfer, GapVerdict,
    PressureConfig, PressureEstimate,
};
use dwlab_core::spectral::{assemble_operator, compute_spectrum, spectrum_diagnostics, DiscreteOperator, Spectrum};
use dwlab_core::{Geometry, Result as CoreResult};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{resolved_json, DataSpec, Estimator, Experiment, GeometrySpec, ObservableSpec, RunConfig};
use crate::manifest::{sha256_hex, OutputDir, RunManifest, StageRecord, Status, Stopwatch};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Bad input discovered while running (unwritable output, invalid
    /// matrix file). Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// A numerical stage failed. Exit code 3.
    #[error("stage '{stage}' failed: {message}")]
    Numerical { stage: String, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Numerical { .. } => 3,
        }
    }
}

/// Input problems surfacing from the core are validation failures, not
/// numerical ones.
fn is_input_error(e: &dwlab_core::Error) -> bool {
    use dwlab_core::Error as E;
    matches!(
        e,
        E::InvalidGeometry(_)
            | E::InvalidDamping(_)
            | E::NotSymmetric { .. }
            | E::NotNegativeSemidefinite { .. }
            | E::MatrixMarket { .. }
    )
}

struct Runner {
    out: OutputDir,
    stages: Vec<StageRecord>,
    series: Vec<SeriesPoint>,
}

impl Runner {
    fn stage<T>(
        &mut self,
        name: &str,
        params: Value,
        body: impl FnOnce() -> CoreResult<(T, Value)>,
    ) -> Result<T, RunError> {
        let clock = Stopwatch::start();
        let result = body();
        let seconds = clock.seconds();
        match result {
            Ok((value, info)) => {
                self.stages.push(StageRecord {
                    name: name.into(),
                    status: Status::Ok,
                    seconds,
                    params,
                    info,
                    error: None,
                });
                Ok(value)
            }
            Err(e) => {
                let message = e.to_string();
                self.stages.push(StageRecord {
                    name: name.into(),
                    status: Status::Failed,
                    seconds,
                    params,
                    info: Value::Null,
                    error: Some(message.clone()),
                });
                if is_input_error(&e) {
                    Err(RunError::Validation(format!("{name}: {message}")))
                } else {
                    Err(RunError::Numerical {
                        stage: name.into(),
                        message,
                    })
                }
            }
        }
    }

    fn write(&mut self, name: &str, content: CoreResult<String>) -> Result<(), RunError> {
        let content = content.map_err(|e| RunError::Numerical {
            stage: format!("write {name}"),
            message: e.to_string(),
        })?;
        self.out.write(name, &content).map_err(|e| RunError::Numerical {
            stage: format!("write {name}"),
            message: e.to_string(),
        })
    }

    fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        self.write(name, io::to_json(value))
    }

    fn point(&mut self, series: &str, key: impl Into<String>, x: f64, y: f64) {
        self.series.push(SeriesPoint {
            series: series.into(),
            key: key.into(),
            x,
            y,
        });
    }
}

pub struct RunOutcome {
    pub manifest: RunManifest,
    pub error: Option<RunError>,
}

/// Runs the configured experiment, writing artifacts and `manifest.json`
/// into `out_dir`. Validation failures of the output directory are returned
/// before any computation starts.
pub fn run_experiment(cfg: &RunConfig, out_dir: &Path, threads: Option<usize>) -> Result<RunOutcome, RunError> {
    let out = OutputDir::prepare(out_dir)
        .map_err(|e| RunError::Validation(format!("output directory {} is not writable: {e}", out_dir.display())))?;
    let clock = Stopwatch::start();
    let mut runner = Runner {
        out,
        stages: Vec::new(),
        series: Vec::new(),
    };
    let result = match cfg.experiment {
        Experiment::Spectrum => run_spectrum(&mut runner, cfg, cfg.geometry.grid().expect("validated")).map(|_| ()),
        Experiment::Pressure => run_pressure(&mut runner, cfg).map(|_| ()),
        Experiment::Decay => run_decay(&mut runner, cfg),
        Experiment::VerifyGap => run_verify(&mut runner, cfg),
    };
    let result = result.and_then(|_| {
        let series = std::mem::take(&mut runner.series);
        runner.write("series.csv", io::series_csv(&series))
    });

    let config = resolved_json(cfg);
    let config_text = serde_json::to_string(&config).expect("json");
    let mut manifest = RunManifest {
        tool: "dwlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment.as_str().into(),
        config_sha256: sha256_hex(config_text.as_bytes()),
        seed: cfg.seed,
        threads,
        wall_time_seconds: clock.seconds(),
        status: if result.is_ok() { Status::Ok } else { Status::Failed },
        error: result.as_ref().err().map(|e| e.to_string()),
        stages: std::mem::take(&mut runner.stages),
        files: runner.out.files.clone(),
        config,
    };
    let text = io::to_json(&manifest).expect("manifest serializes");
    std::fs::write(runner.out.path("manifest.json"), text)
        .map_err(|e| RunError::Validation(format!("cannot write manifest: {e}")))?;
    manifest.files = runner.out.files;
    Ok(RunOutcome {
        manifest,
        error: result.err(),
    })
}

fn assemble(runner: &mut Runner, cfg: &RunConfig, g: &Geometry) -> Result<DiscreteOperator, RunError> {
    runner.stage("assemble", json!({"geometry": g.label(), "damping": cfg.damping}), || {
        let op = assemble_operator(g, &cfg.damping)?;
        let info = json!({"n": op.n(), "sup_damping": op.sup_damping});
        Ok((op, info))
    })
}

fn run_spectrum(runner: &mut Runner, cfg: &RunConfig, g: &Geometry) -> Result<Spectrum, RunError> {
    let op = assemble(runner, cfg, g)?;
    let cap = cfg.spectrum.dense_cap;
    let spectrum = runner.stage("spectrum", json!({"dense_cap": cap}), || {
        let s = compute_spectrum(&op, false, cap)?;
        let info = json!({
            "dim": s.provenance.dim,
            "solver": s.provenance.solver,
            "b_norm": s.provenance.b_norm,
            "condition": s.condition,
            "near_defective": s.is_near_defective(),
        });
        Ok((s, info))
    })?;
    runner.write("spectrum.csv", io::spectrum_csv(&spectrum))?;
    let lambdas = cfg.spectrum.weyl_lambdas.clone();
    let diag = runner.stage("diagnostics", json!({"weyl_lambdas": lambdas}), || {
        Ok((spectrum_diagnostics(&spectrum, &lambdas), Value::Null))
    })?;
    runner.write_json("diagnostics.json", &diag)?;

    let label = g.label();
    for t in &spectrum.eigenvalues {
        runner.point("spectrum", label.clone(), t.re, t.im);
    }
    for row in &diag.weyl {
        runner.point("weyl_measured", label.clone(), row.lambda, row.measured as f64);
        if let Some(p) = row.predicted {
            runner.point("weyl_predicted", label.clone(), row.lambda, p);
        }
    }
    Ok(spectrum)
}

fn schedule(cfg: &RunConfig) -> PressureConfig {
    PressureConfig {
        seed: cfg.seed,
        ..cfg.pressure.schedule.clone()
    }
}

fn estimate<D: Dynamics>(
    d: &D,
    f: &(dyn Fn(&D::State) -> CoreResult<f64> + Sync),
    estimator: Estimator,
    pc: &PressureConfig,
) -> CoreResult<(PressureEstimate, Value)> {
    match estimator {
        Estimator::Schedule => pressure_schedule(d, f, pc).map(|e| (e, Value::Null)),
        Estimator::Separated => pressure_separated(d, f, pc).map(|e| (e, Value::Null)),
        Estimator::Cover => pressure_cover(d, f, pc).map(|r| {
            let info = json!({
                "total_words": r.total_words,
                "selected": r.selected.len(),
                "uncovered_cells": r.uncovered_cells,
            });
            (r.estimate, info)
        }),
        Estimator::Transfer => unreachable!("handled without dynamics"),
    }
}

fn flow_space(g: &GeometrySpec) -> CoreResult<PhaseSpace> {
    match g {
        GeometrySpec::Grid { geometry } => PhaseSpace::from_geometry(geometry),
        GeometrySpec::Bolza => Ok(PhaseSpace::Bolza),
        GeometrySpec::Doubling => unreachable!("the doubling map has no geodesic flow"),
    }
}

fn flow_field(cfg: &RunConfig) -> CoreResult<DampingField> {
    match &cfg.geometry {
        GeometrySpec::Grid { geometry } => DampingField::on_geometry(&cfg.damping, geometry),
        _ => DampingField::on_bolza(&cfg.damping),
    }
}

fn run_pressure(runner: &mut Runner, cfg: &RunConfig) -> Result<(PressureEstimate, GapVerdict), RunError> {
    let sec = &cfg.pressure;
    let pc = schedule(cfg);
    let params = json!({
        "estimator": sec.estimator,
        "schedule": pc,
        "observable": sec.observable,
    });
    let est = runner.stage("pressure", params, || match (sec.estimator, &cfg.geometry, sec.observable) {
        (Estimator::Transfer, _, _) => {
            let a = sec.adjacency.as_deref().expect("validated");
            let w = sec.weights.as_deref().expect("validated");
            pressure_transfer(a, w).map(|e| (e, Value::Null))
        }
        (est, GeometrySpec::Doubling, ObservableSpec::Constant { value }) => {
            estimate(&DoublingMap, &move |_: &f64| Ok(value), est, &pc)
        }
        (est, g, obs) => {
            let flow = GeodesicFlow::new(flow_space(g)?);
            match obs {
                ObservableSpec::AU => {
                    let field = flow_field(cfg)?;
                    let f = |p: &PhasePoint| a_u_weight(&field, &flow, p).map(|w| w.value);
                    estimate(&flow, &f, est, &pc)
                }
                ObservableSpec::Constant { value } => estimate(&flow, &move |_: &PhasePoint| Ok(value), est, &pc),
            }
        }
    })?;
    runner.write("pressure.csv", io::pressure_csv(&est))?;
    for row in &est.table {
        runner.point("pressure", format!("eps={}", row.eps), 1.0 / row.horizon as f64, row.value);
    }
    runner.point("pressure_estimate", est.method.as_str(), 0.0, est.value);
    if !est.warnings.is_empty() {
        if let Some(s) = runner.stages.last_mut() {
            s.info = json!({"details": s.info.take(), "warnings": est.warnings, "error_bar": est.error_bar});
        }
    }

    let margin = sec.margin;
    let verdict = runner.stage("gap_condition", json!({"margin": margin}), || {
        gap_condition(est.value, margin).map(|v| (v, Value::Null))
    })?;
    runner.write_json("gap.json", &verdict)?;

    let flows = sec.estimator != Estimator::Transfer && !matches!(cfg.geometry, GeometrySpec::Doubling);
    if flows && sec.dump_trajectories > 0 {
        let n = sec.dump_trajectories;
        let horizon = *pc.horizons.last().expect("validated");
        let seed = cfg.seed;
        let samples = runner.stage(
            "trajectories",
            json!({"samples": n, "horizon": horizon, "seed": seed}),
            || {
                let space = flow_space(&cfg.geometry)?;
                let flow = GeodesicFlow::new(space);
                let points = sample_phase_points(space, n, seed)?;
                let out = match sec.observable {
                    ObservableSpec::AU => {
                        let field = flow_field(cfg)?;
                        points
                            .iter()
                            .map(|p| au_trajectory(&field, &flow, p, horizon))
                            .collect::<CoreResult<Vec<_>>>()?
                    }
                    ObservableSpec::Constant { value } => points
                        .iter()
                        .map(|p| birkhoff_average(&flow, &|_| Ok(value), p, horizon))
                        .collect::<CoreResult<Vec<_>>>()?,
                };
                Ok((out, Value::Null))
            },
        )?;
        runner.write("trajectories.csv", io::trajectories_csv(&samples))?;
    }
    Ok((est, verdict))
}

fn run_decay(runner: &mut Runner, cfg: &RunConfig) -> Result<(), RunError> {
    let g = cfg.geometry.grid().expect("validated");
    let sec = &cfg.decay;
    let op = assemble(runner, cfg, g)?;
    let seed = cfg.seed;
    let stats = runner.stage(
        "damping_stats",
        json!({"horizon": sec.stats_horizon, "samples": sec.stats_samples, "seed": seed}),
        || {
            let field = DampingField::on_geometry(&cfg.damping, g)?;
            let stats = min_time_average(&field, sec.stats_horizon, sec.stats_samples, seed)?;
            let info = json!({"min_average": stats.min_average, "liouville_mean": stats.liouville_mean});
            Ok((stats, info))
        },
    )?;
    let data = runner.stage("initial_data", json!({"data": sec.data, "seed": seed}), || {
        let d = match sec.data {
            DataSpec::RandomSmooth { kmax } => CauchyData::random_smooth(g, kmax, seed)?,
            DataSpec::Constant => CauchyData::constant(op.n()),
        };
        Ok((d, Value::Null))
    })?;
    let opts = DecayOptions {
        horizon: sec.horizon,
        dt_out: sec.dt_out,
        method: sec.method,
        kappa: sec.kappa,
        dt: sec.dt,
    };
    let (report, series) = runner.stage("evolution", serde_json::to_value(opts).expect("json"), || {
        decay_experiment(&op, &data, &stats, None, &opts).map(|r| (r, Value::Null))
    })?;
    runner.write("energy.csv", io::energy_csv(&series))?;
    runner.write_json("decay.json", &report)?;
    for (t, e) in series.times.iter().zip(&series.energies) {
        runner.point("energy", series.method.as_str(), *t, *e);
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    pressure: f64,
    margin: f64,
    threshold: f64,
    satisfied: bool,
    /// `|Pr(a^u) + ε|`.
    pressure_bound: f64,
    #[serde(rename = "G")]
    gap: Option<f64>,
    spectrum_geometry: Option<String>,
    /// `min(G, |Pr(a^u) + ε|)` when both sides are available.
    rate_bound: Option<f64>,
    /// Which side attains the minimum: "spectral" or "dynamical".
    limiting: Option<&'static str>,
    notes: Vec<String>,
}

fn run_verify(runner: &mut Runner, cfg: &RunConfig) -> Result<(), RunError> {
    let (_, verdict) = run_pressure(runner, cfg)?;
    let spectral = cfg.spectrum_geometry.clone().or_else(|| cfg.geometry.grid().cloned());
    let mut notes = Vec::new();
    let (gap, label) = match &spectral {
        Some(g) => {
            let s = run_spectrum(runner, cfg, g)?;
            let d = spectrum_diagnostics(&s, &[]);
            (d.gap, Some(g.label()))
        }
        None => {
            notes.push("no spectrum supplied (set spectrum_geometry); only the dynamical side is reported".into());
            (None, None)
        }
    };
    let pressure_bound = verdict.threshold.abs();
    if !verdict.satisfied {
        notes.push("Pr + eps >= 0: the pressure condition gives no decay bound".into());
    }
    let rate_bound = gap.filter(|_| verdict.satisfied).map(|g| g.min(pressure_bound));
    let limiting = rate_bound.map(|r| if gap == Some(r) { "spectral" } else { "dynamical" });
    let report = VerifyReport {
        pressure: verdict.pressure,
        margin: verdict.margin,
        threshold: verdict.threshold,
        satisfied: verdict.satisfied,
        pressure_bound,
        gap,
        spectrum_geometry: label,
        rate_bound,
        limiting,
        notes,
    };
    runner.write_json("verify.json", &report)
}
