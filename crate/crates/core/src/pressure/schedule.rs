//! Extrapolation of the separated-set table to `T → ∞`.

use crate::dynamics::Dynamics;
use crate::error::{Error, Result};
use crate::pressure::separated::separated_table;
use crate::pressure::{Observable, PressureConfig, PressureEstimate, PressureMethod, PressureRow};

/// Least-squares line `y = c + s·x`; returns `(c, s, rms residual)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", x.len())));
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::DegenerateFit("abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let c = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - c - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    Ok((c, slope, rms))
}

/// Fits `value ≈ Pr + c/T` at the smallest `ε`; the intercept is the
/// estimate and the RMS residual the error bar.
pub fn pressure_schedule<D: Dynamics>(d: &D, f: Observable<D::State>, cfg: &PressureConfig) -> Result<PressureEstimate> {
    cfg.validate()?;
    if cfg.horizons.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least two horizons, got {}",
            cfg.horizons.len()
        )));
    }
    let table = separated_table(d, f, cfg)?;
    fit_table(table)
}

pub(crate) fn fit_table(table: Vec<PressureRow>) -> Result<PressureEstimate> {
    let eps = table.iter().map(|r| r.eps).fold(f64::INFINITY, f64::min);
    let rows: Vec<&PressureRow> = table.iter().filter(|r| r.eps == eps && r.value.is_finite()).collect();
    let x: Vec<f64> = rows.iter().map(|r| 1.0 / r.horizon as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let (c, _, rms) = linear_fit(&x, &y)?;
    let last = rows.last().map(|r| (r.horizon, r.z_value));
    Ok(PressureEstimate {
        value: c,
        method: PressureMethod::Schedule,
        eps: Some(eps),
        horizon: last.map(|l| l.0),
        matrix_size: None,
        z_value: last.map(|l| l.1),
        error_bar: rms,
        table,
        warnings: Vec::new(),
    })
}
