//! Exponential rate fits and the local-in-time energy bound.

use serde::{Deserialize, Serialize};

use crate::decay::energy::{energy, EnergySeries, SobolevNorms};
use crate::decay::evolve::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::DiscreteOperator;

const MIN_POINTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `-d log E / dt`, clamped to be non-negative.
    pub rate: f64,
    pub intercept: f64,
    /// RMS residual of `log E`.
    pub residual: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Least-squares slope of `log E(t)` over `window`.
pub fn fit_decay_rate(series: &EnergySeries, window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.energies)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, e)| (*t, *e))
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::DegenerateFit(format!(
            "{} samples in window [{}, {}], need {MIN_POINTS}",
            pts.len(),
            window.0,
            window.1
        )));
    }
    if let Some((t, e)) = pts.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::NonPositiveEnergy { t: *t, energy: *e });
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (c, slope, residual) = crate::pressure::schedule::linear_fit(&x, &y)?;
    Ok(DecayFit {
        rate: (-slope).max(0.0),
        intercept: c,
        residual,
        window,
        points: pts.len(),
    })
}

/// `E(u, T) / ∫_{T-2}^{T+1} ‖u(t)‖²_{H¹} dt` by the trapezoid rule over the
/// trajectory samples in that window (step at most 0.05).
pub fn window_bound_check(op: &DiscreteOperator, norms: &SobolevNorms, traj: &Trajectory, t_big: f64) -> Result<f64> {
    if t_big < 2.0 {
        return Err(Error::InvalidArgument(format!("T must be >= 2, got {t_big}")));
    }
    let tol = 1e-9 * (1.0 + t_big);
    let idx: Vec<usize> = (0..traj.times.len())
        .filter(|&i| traj.times[i] >= t_big - 2.0 - tol && traj.times[i] <= t_big + 1.0 + tol)
        .collect();
    let covered = |i: Option<&usize>| i.map(|&i| traj.times[i]);
    let (Some(first), Some(last)) = (covered(idx.first()), covered(idx.last())) else {
        return Err(Error::InsufficientSampling("no samples in [T-2, T+1]".into()));
    };
    if (first - (t_big - 2.0)).abs() > tol || (last - (t_big + 1.0)).abs() > tol {
        return Err(Error::InsufficientSampling(format!(
            "samples span [{first}, {last}], need [{}, {}]",
            t_big - 2.0,
            t_big + 1.0
        )));
    }
    if idx.windows(2).any(|w| traj.times[w[1]] - traj.times[w[0]] > 0.05 + tol) {
        return Err(Error::InsufficientSampling("time step above 0.05".into()));
    }
    let at_t = idx
        .iter()
        .find(|&&i| (traj.times[i] - t_big).abs() <= tol)
        .ok_or_else(|| Error::InsufficientSampling(format!("no sample at T = {t_big}")))?;
    let n = op.n();
    let h1: Vec<f64> = idx.iter().map(|&i| norms.norm_sq(&traj.states[i][..n], 1.0)).collect();
    let integral: f64 = idx
        .windows(2)
        .zip(h1.windows(2))
        .map(|(w, v)| 0.5 * (traj.times[w[1]] - traj.times[w[0]]) * (v[0] + v[1]))
        .sum();
    let e = energy(op, &traj.states[*at_t]);
    Ok(if integral > 0.0 { e / integral } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::EvolutionMethod;

    fn series(f: impl Fn(f64) -> f64) -> EnergySeries {
        let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.5).collect();
        EnergySeries {
            energies: times.iter().map(|t| f(*t)).collect(),
            times,
            method: EvolutionMethod::Modal,
        }
    }

    #[test]
    fn exact_exponential() {
        let fit = fit_decay_rate(&series(|t| 5.0 * (-0.2 * t).exp()), (0.0, 100.0)).unwrap();
        assert!((fit.rate - 0.2).abs() < 1e-6);
    }

    #[test]
    fn dominant_mode_wins_late() {
        let s = series(|t| (-0.2 * t).exp() + 3.0 * (-0.6 * t).exp());
        let fit = fit_decay_rate(&s, (40.0, 100.0)).unwrap();
        assert!((fit.rate / 0.2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn window_errors() {
        let s = series(|t| if t > 50.0 { 0.0 } else { 1.0 });
        assert!(matches!(fit_decay_rate(&s, (40.0, 90.0)), Err(Error::NonPositiveEnergy { .. })));
        assert!(matches!(fit_decay_rate(&s, (10.0, 11.0)), Err(Error::DegenerateFit(_))));
    }
}
