//! End-to-end decay experiment: spectrum, evolution, fit and predictions.

use serde::{Deserialize, Serialize};

use crate::decay::energy::{energy_series, EnergySeries, SobolevNorms};
use crate::decay::evolve::{evolve_modal, evolve_ode, EvolutionMethod};
use crate::decay::fit::fit_decay_rate;
use crate::decay::CauchyData;
use crate::dynamics::DampingStats;
use crate::error::{Error, Result};
use crate::spectral::{compute_spectrum, spectral_gap, DiscreteOperator, DENSE_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    #[serde(rename = "G")]
    pub gap: f64,
    pub c_inf: f64,
    pub a_bar: f64,
    pub fitted_rate: f64,
    /// `2·min(G, C(∞))`.
    pub predicted_rate: f64,
    /// `2·min(G, |Pr(a^u) + ε|)` when a pressure estimate is supplied.
    pub pressure_rate: Option<f64>,
    pub window: (f64, f64),
    pub residual: f64,
    pub kappa: f64,
    /// `‖ω₀‖_{H^{1+κ}} + ‖ω₁‖_{H^κ}`.
    pub data_norm: f64,
    pub method: EvolutionMethod,
    /// Set when `C(∞) = 0`: the discrete gap then only shrinks under refinement.
    pub resolution_dependent: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub horizon: f64,
    pub dt_out: f64,
    pub method: EvolutionMethod,
    /// Sobolev index for the data norm; defaults to `d/2`.
    pub kappa: Option<f64>,
    /// Step bound for the ode integrator.
    pub dt: Option<f64>,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            horizon: 120.0,
            dt_out: 0.5,
            method: EvolutionMethod::Modal,
            kappa: None,
            dt: None,
        }
    }
}

/// Runs the evolution and compares the fitted energy decay rate with
/// `2·min(G, C(∞))`. The fit starts after the transient `5/G` (or
/// `5/‖a‖∞` when there is no gap).
pub fn decay_experiment(
    op: &DiscreteOperator,
    data: &CauchyData,
    stats: &DampingStats,
    pressure: Option<(f64, f64)>,
    opts: &DecayOptions,
) -> Result<(DecayReport, EnergySeries)> {
    if !(opts.horizon > 0.0 && opts.dt_out > 0.0 && opts.dt_out < opts.horizon) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < dt_out < horizon, got {} and {}",
            opts.dt_out, opts.horizon
        )));
    }
    let spectrum = compute_spectrum(op, opts.method == EvolutionMethod::Modal, DENSE_CAP)?;
    let zero_tol = spectrum.zero_tol();
    let gap = spectral_gap(&spectrum.eigenvalues, zero_tol)
        .filter(|g| *g > zero_tol)
        .unwrap_or(0.0);

    let steps = (opts.horizon / opts.dt_out).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * opts.dt_out).collect();
    let traj = match opts.method {
        EvolutionMethod::Modal => evolve_modal(&spectrum, data, &times)?,
        EvolutionMethod::Ode => evolve_ode(op, data, &times, opts.dt)?,
    };
    let series = energy_series(op, &traj);

    let mut warnings = Vec::new();
    let cutoff = if gap > 0.0 {
        5.0 / gap
    } else if op.sup_damping > 0.0 {
        5.0 / op.sup_damping
    } else {
        0.0
    };
    let end = *times.last().expect("non-empty");
    let mut window = (cutoff, end);
    if times.iter().filter(|t| **t >= cutoff).count() < 10 {
        window = (0.5 * end, end);
        warnings.push(format!(
            "horizon {end} is shorter than the transient cutoff {cutoff:.3}; fitting the second half"
        ));
    }
    let (fitted_rate, residual) = match fit_decay_rate(&series, window) {
        Ok(f) => (f.rate, f.residual),
        Err(e) => {
            warnings.push(format!("rate fit failed: {e}"));
            (0.0, f64::NAN)
        }
    };

    let dim = op.geometry.dimension().unwrap_or(1) as f64;
    let kappa = opts.kappa.unwrap_or(0.5 * dim);
    let norms = SobolevNorms::new(op)?;
    let data_norm = norms.norm(&data.omega0, 1.0 + kappa) + norms.norm(&data.omega1, kappa);

    let c_inf = stats.min_average;
    let resolution_dependent = c_inf == 0.0 && op.sup_damping > 0.0;
    if resolution_dependent {
        warnings.push("geometric control fails (C(inf) = 0): the fitted rate depends on resolution".into());
    }
    Ok((
        DecayReport {
            gap,
            c_inf,
            a_bar: stats.liouville_mean,
            fitted_rate,
            predicted_rate: 2.0 * gap.min(c_inf),
            pressure_rate: pressure.map(|(pr, eps)| 2.0 * gap.min((pr + eps).abs())),
            window,
            residual,
            kappa,
            data_norm,
            method: opts.method,
            resolution_dependent,
            warnings,
        },
        series,
    ))
}
