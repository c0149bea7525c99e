//! Resolvent probes for the pencil and the generator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::spectral::companion::{linearize, QuadraticPencil};
use crate::spectral::operator::DiscreteOperator;
use crate::C64;

/// Ratio `σ_min/σ_max` of `P(τ)` below which the block check refuses to invert.
pub const SINGULAR_RCOND: f64 = 1e-13;

/// `‖P(τ)⁻¹‖₂ = 1/σ_min(P(τ))`; `+inf` when `P(τ)` is numerically singular.
pub fn resolvent_norm(pencil: &QuadraticPencil, tau: C64) -> Result<f64> {
    let p = pencil.eval(tau);
    let s = linalg::singular_values(&p)?;
    let (max, min) = (s[0], *s.last().unwrap());
    if min <= f64::EPSILON * s.len() as f64 * max {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / min)
}

/// `max |(τ-B)⁻¹ - [[R(-2ia-τ), -R], [RΔ, -τR]]|` with `R = P(τ)⁻¹`.
pub fn resolvent_block_check(op: &DiscreteOperator, tau: C64) -> Result<f64> {
    let n = op.n();
    let p = QuadraticPencil::new(op).eval(tau);
    let s = linalg::singular_values(&p)?;
    let rcond = s.last().unwrap() / s[0];
    if !(rcond >= SINGULAR_RCOND) {
        return Err(Error::Singular { tau, rcond });
    }
    let r = linalg::inverse(&p);

    let b = linearize(op);
    let shifted = CMat::from_fn(2 * n, 2 * n, |i, j| {
        let d = if i == j { tau } else { C64::new(0.0, 0.0) };
        d - b.matrix[(i, j)]
    });
    let direct = linalg::inverse(&shifted);

    // R·diag(-2ia - τ), R·Δ
    let top_left = CMat::from_fn(n, n, |i, j| r[(i, j)] * (C64::new(0.0, -2.0 * op.damping[j]) - tau));
    let lap = CMat::from_fn(n, n, |i, j| C64::new(op.laplacian[(i, j)], 0.0));
    let bottom_left = &r * &lap;

    let mut worst = 0.0f64;
    for i in 0..2 * n {
        for j in 0..2 * n {
            let block = match (i < n, j < n) {
                (true, true) => top_left[(i, j)],
                (true, false) => -r[(i, j - n)],
                (false, true) => bottom_left[(i - n, j)],
                (false, false) => -tau * r[(i - n, j - n)],
            };
            worst = worst.max((block - direct[(i, j)]).norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolventSweep {
    pub gamma: f64,
    /// `(⟨τ⟩, ‖P(τ)⁻¹‖)` along `Im τ = γ`.
    pub points: Vec<(f64, f64)>,
    /// Least-squares slope of `log‖R‖` against `log⟨τ⟩` (trend only).
    pub slope: f64,
}

pub fn resolvent_sweep(pencil: &QuadraticPencil, gamma: f64, re_values: &[f64]) -> Result<ResolventSweep> {
    let mut points = Vec::with_capacity(re_values.len());
    for &re in re_values {
        let tau = C64::new(re, gamma);
        let bracket = (1.0 + tau.norm_sqr()).sqrt();
        points.push((bracket, resolvent_norm(pencil, tau)?));
    }
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, r)| r.is_finite())
        .map(|(b, r)| (b.ln(), r.ln()))
        .collect();
    let slope = if finite.len() >= 2 {
        let m = finite.len() as f64;
        let mx = finite.iter().map(|p| p.0).sum::<f64>() / m;
        let my = finite.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = finite.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = finite.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    };
    Ok(ResolventSweep {
        gamma,
        points,
        slope,
    })
}
