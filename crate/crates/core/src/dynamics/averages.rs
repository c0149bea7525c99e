//! Birkhoff sums, the pressure weight `a^u` and dynamical damping means.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::field::DampingField;
use crate::dynamics::flow::{sample_phase_points, GeodesicFlow, PhasePoint, PhaseSpace};
use crate::error::{Error, Result};
use crate::geometry::{DampingProfile, Geometry};

/// Simpson substeps per unit time.
pub const SIMPSON_SUBSTEPS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub start: PhasePoint,
    pub horizon: usize,
    /// `Σ_{k<T} f(Φ^k ρ)`.
    pub birkhoff_sum: f64,
    /// `log J^u_T(ρ)`: `-T` in curvature −1, zero on flat spaces.
    pub log_ju: f64,
    /// Birkhoff sum of `a^u` when the trajectory was built for it.
    pub weight_au: Option<f64>,
    /// Points `Φ^k ρ` for `k = 0..=T` and partial sums up to `k` (exclusive).
    pub path: Vec<(PhasePoint, f64)>,
}

fn log_ju_rate(space: PhaseSpace) -> f64 {
    if space.is_anosov() {
        -1.0
    } else {
        0.0
    }
}

fn birkhoff_walk(
    flow: &GeodesicFlow,
    f: &dyn Fn(&PhasePoint) -> Result<f64>,
    p: &PhasePoint,
    horizon: usize,
    step: f64,
) -> Result<TrajectorySample> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let mut q = *p;
    let mut sum = 0.0;
    let mut path = Vec::with_capacity(horizon + 1);
    for _ in 0..horizon {
        path.push((q, sum));
        sum += f(&q)?;
        q = flow.flow(&q, step)?;
    }
    path.push((q, sum));
    Ok(TrajectorySample {
        start: *p,
        horizon,
        birkhoff_sum: sum,
        log_ju: log_ju_rate(flow.space) * horizon as f64,
        weight_au: None,
        path,
    })
}

/// Unit-time Birkhoff sum `Σ_{k=0}^{T-1} f∘Φ^k(ρ)`.
pub fn birkhoff_average(
    flow: &GeodesicFlow,
    f: &dyn Fn(&PhasePoint) -> Result<f64>,
    p: &PhasePoint,
    horizon: usize,
) -> Result<TrajectorySample> {
    birkhoff_walk(flow, f, p, horizon, 1.0)
}

/// The same sum taken along `Φ^{-1}`: `Σ_{k=0}^{T-1} f∘Φ^{-k}(ρ)`.
pub fn birkhoff_average_reversed(
    flow: &GeodesicFlow,
    f: &dyn Fn(&PhasePoint) -> Result<f64>,
    p: &PhasePoint,
    horizon: usize,
) -> Result<TrajectorySample> {
    birkhoff_walk(flow, f, p, horizon, -1.0)
}

/// `∫_0^t a∘Φ^s(ρ) ds` by composite Simpson with `SIMPSON_SUBSTEPS` per unit.
pub fn damping_integral(field: &DampingField, flow: &GeodesicFlow, p: &PhasePoint, t: f64) -> Result<f64> {
    let n = 2 * ((SIMPSON_SUBSTEPS as f64 * t.abs()).ceil() as usize).div_ceil(2).max(1);
    let h = t / n as f64;
    let mut acc = 0.0;
    match flow.space {
        PhaseSpace::Bolza => {
            // frames must be advanced step by step to keep reductions local
            let mut q = *p;
            for k in 0..=n {
                let w = simpson_weight(k, n);
                acc += w * field.value(&q);
                if k < n {
                    q = flow.flow(&q, h)?;
                }
            }
        }
        _ => {
            for k in 0..=n {
                acc += simpson_weight(k, n) * field.value(&flow.flow(p, k as f64 * h)?);
            }
        }
    }
    Ok(acc * h / 3.0)
}

fn simpson_weight(k: usize, n: usize) -> f64 {
    if k == 0 || k == n {
        1.0
    } else if k % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuWeight {
    pub value: f64,
    /// False on flat spaces, where the Jacobian term vanishes and the value
    /// is only the damping integral.
    pub anosov: bool,
}

/// `a^u(ρ) = -∫_0^1 a∘Φ^s(ρ) ds + ½ log J^u(ρ)` with `log J^u = -1` in
/// curvature −1.
pub fn a_u_weight(field: &DampingField, flow: &GeodesicFlow, p: &PhasePoint) -> Result<AuWeight> {
    let integral = damping_integral(field, flow, p, 1.0)?;
    Ok(AuWeight {
        value: -integral + 0.5 * log_ju_rate(flow.space),
        anosov: flow.space.is_anosov(),
    })
}

/// Birkhoff sum of `a^u` along a trajectory.
pub fn au_trajectory(field: &DampingField, flow: &GeodesicFlow, p: &PhasePoint, horizon: usize) -> Result<TrajectorySample> {
    let f = |q: &PhasePoint| a_u_weight(field, flow, q).map(|w| w.value);
    let mut s = birkhoff_average(flow, &f, p, horizon)?;
    s.weight_au = Some(s.birkhoff_sum);
    Ok(s)
}

/// `(∫_M a)/vol(M)` by the grid rule (exact for trigonometric polynomials
/// below Nyquist).
pub fn liouville_mean(profile: &DampingProfile, geometry: &Geometry, grid_len: usize) -> Result<f64> {
    let s = profile.sample(geometry, grid_len)?;
    Ok(s.iter().sum::<f64>() / s.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingStats {
    pub liouville_mean: f64,
    /// Upper estimate of `C(∞)` at the given horizon.
    pub min_average: f64,
    pub sup_norm: f64,
    pub horizon: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Point attaining the minimum.
    pub witness: Option<PhasePoint>,
}

/// Deterministic probes along closed axis-parallel geodesics of the torus
/// (the candidates for orbits avoiding an `x`-strip).
fn torus_probes(lx: f64, ly: f64) -> Vec<PhasePoint> {
    const M: usize = 64;
    let mut out = Vec::with_capacity(4 * M);
    for i in 0..M {
        let x = i as f64 * lx / M as f64;
        let y = i as f64 * ly / M as f64;
        for s in [1.0, -1.0] {
            out.push(PhasePoint::Torus { x: [x, 0.0], xi: [0.0, s] });
            out.push(PhasePoint::Torus { x: [0.0, y], xi: [s, 0.0] });
        }
    }
    out
}

/// `min_ρ (1/t)∫_0^t a∘Φ^s(ρ) ds` over Liouville samples (plus closed-orbit
/// probes on the torus), clamped to `[0, ā]`.
pub fn min_time_average(field: &DampingField, horizon: f64, n_samples: usize, seed: u64) -> Result<DampingStats> {
    if !(horizon >= 10.0) {
        return Err(Error::InvalidArgument(format!("horizon must be >= 10, got {horizon}")));
    }
    if n_samples < 100 {
        return Err(Error::InvalidArgument(format!("need >= 100 samples, got {n_samples}")));
    }
    let flow = GeodesicFlow::new(field.space);
    let mut points = sample_phase_points(field.space, n_samples, seed)?;
    if let PhaseSpace::Torus { lx, ly } = field.space {
        points.extend(torus_probes(lx, ly));
    }
    let averages: Vec<f64> = points
        .par_iter()
        .map(|p| damping_integral(field, &flow, p, horizon).map(|v| v / horizon))
        .collect::<Result<_>>()?;
    let (idx, min) = averages
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
    Ok(DampingStats {
        liouville_mean: field.mean,
        min_average: min.min(field.mean).max(0.0),
        sup_norm: field.sup_norm,
        horizon,
        n_samples,
        seed,
        witness: Some(points[idx]),
    })
}
