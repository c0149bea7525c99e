//! The semigroup `e^{-itB}`: modal propagation and implicit-midpoint stepping.

use serde::{Deserialize, Serialize};

use crate::decay::energy::energy;
use crate::decay::CauchyData;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Lu};
use crate::spectral::{linearize, solve_spectrum, DiscreteOperator, Spectrum, NEAR_DEFECTIVE};
use crate::C64;

/// Allowed energy growth per output interval, relative to `E(0)`.
const ENERGY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    Modal,
    Ode,
}

impl EvolutionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvolutionMethod::Modal => "modal",
            EvolutionMethod::Ode => "ode",
        }
    }
}

/// Snapshots `(u, i∂_t u)` at the requested times.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub method: EvolutionMethod,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be ascending".into()));
    }
    Ok(())
}

/// `U(t) = Σ_j e^{-iτ_j t} c_j v_j` with `c = V⁻¹U(0)`.
pub fn evolve_modal(spectrum: &Spectrum, data: &CauchyData, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    let Some(v) = &spectrum.vectors else {
        return Err(Error::InvalidArgument("modal evolution needs eigenvectors".into()));
    };
    let condition = spectrum.condition.unwrap_or(f64::INFINITY);
    if !(condition <= NEAR_DEFECTIVE) {
        return Err(Error::NearDefective { condition });
    }
    let u0 = data.state();
    if u0.len() != v.nrows() {
        return Err(Error::InvalidArgument(format!(
            "data has {} components, spectrum {}",
            u0.len(),
            v.nrows()
        )));
    }
    let c = Lu::new(v).solve_vec(&u0);
    let states = times
        .iter()
        .map(|&t| {
            let w: Vec<C64> = spectrum
                .eigenvalues
                .iter()
                .zip(&c)
                .map(|(tau, cj)| cj * (C64::new(0.0, -t) * tau).exp())
                .collect();
            linalg::matvec(v, &w)
        })
        .collect();
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        method: EvolutionMethod::Modal,
    })
}

/// `0.2 · (grid spacing)` for unit wave speed.
pub fn default_dt(op: &DiscreteOperator) -> f64 {
    0.2 * op.geometry.min_spacing()
}

/// `S^m - I` for the implicit-midpoint step `S = (I + ih/2·B)⁻¹(I - ih/2·B)`
/// with `h = Δ/m`, `m = 2^p`. Keeping the increment `X = S - I` and
/// squaring as `X ← 2X + X²` avoids the cancellation in `S = I + O(h)`.
fn midpoint_increment(b: &CMat, delta: f64, dt_max: f64) -> CMat {
    let mut p = 0;
    while delta / f64::powi(2.0, p) > dt_max {
        p += 1;
    }
    let h = delta / f64::powi(2.0, p);
    let n = b.nrows();
    let half = C64::new(0.0, 0.5 * h);
    let lhs = CMat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) } + half * b[(i, j)]);
    let rhs = CMat::from_fn(n, n, |i, j| C64::new(0.0, -h) * b[(i, j)]);
    let mut x = Lu::new(&lhs).solve(&rhs);
    for _ in 0..p {
        let sq = &x * &x;
        x = CMat::from_fn(n, n, |i, j| 2.0 * x[(i, j)] + sq[(i, j)]);
    }
    x
}

/// Implicit-midpoint time stepping with steps no longer than `dt_max`
/// (default [`default_dt`]); fails if the energy grows by more than
/// `1e-9·E(0)` plus a rounding allowance over any output interval.
pub fn evolve_ode(op: &DiscreteOperator, data: &CauchyData, times: &[f64], dt_max: Option<f64>) -> Result<Trajectory> {
    check_times(times)?;
    if data.len() != op.n() {
        return Err(Error::InvalidArgument(format!("data has {} nodes, operator {}", data.len(), op.n())));
    }
    let dt_max = dt_max.unwrap_or_else(|| default_dt(op));
    if !(dt_max > 0.0 && dt_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt_max}")));
    }
    let b = linearize(op).matrix;
    let mut state = data.state();
    let e0 = energy(op, &state);
    // rounding in E itself is about ε·‖Δ‖·‖U‖², which matters when E(0) ≈ 0
    let scale = op.geometry.cell_volume() * (1.0 + op.laplacian_norm()) * linalg::vec_norm(&state).powi(2);
    let allowance = ENERGY_TOL * e0 + 1e3 * f64::EPSILON * scale;
    let mut cache: Vec<(f64, CMat)> = Vec::new();
    let mut states = Vec::with_capacity(times.len());
    let mut now = 0.0;
    let mut e_prev = e0;
    for &t in times {
        let delta = t - now;
        if delta > 0.0 {
            let tol = 1e-12 * (1.0 + delta);
            let idx = match cache.iter().position(|(d, _)| (d - delta).abs() <= tol) {
                Some(i) => i,
                None => {
                    cache.push((delta, midpoint_increment(&b, delta, dt_max)));
                    cache.len() - 1
                }
            };
            let inc = linalg::matvec(&cache[idx].1, &state);
            for (s, d) in state.iter_mut().zip(inc) {
                *s += d;
            }
            let e = energy(op, &state);
            if e > e_prev + allowance {
                return Err(Error::EnergyIncrease {
                    t,
                    relative: (e - e_prev) / e0.max(f64::MIN_POSITIVE),
                });
            }
            e_prev = e;
            now = t;
        }
        states.push(state.clone());
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        method: EvolutionMethod::Ode,
    })
}

/// Modal evolution computes the dense spectrum with eigenvectors first.
pub fn evolve(op: &DiscreteOperator, data: &CauchyData, times: &[f64], method: EvolutionMethod) -> Result<Trajectory> {
    match method {
        EvolutionMethod::Modal => {
            let s = solve_spectrum(&linearize(op), true)?;
            evolve_modal(&s, data, times)
        }
        EvolutionMethod::Ode => evolve_ode(op, data, times, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DampingProfile, Geometry};
    use crate::spectral::{assemble_operator, constant_damping_oracle};
    use std::f64::consts::TAU;

    fn circle(n: usize, a0: f64) -> DiscreteOperator {
        assemble_operator(&Geometry::circle(TAU, n), &DampingProfile::constant(a0)).unwrap()
    }

    #[test]
    fn single_mode_follows_oracle() {
        let op = circle(32, 0.1);
        let (tau, _) = constant_damping_oracle(1.0, 0.1);
        let v: Vec<C64> = op.geometry.nodes().iter().map(|x| C64::from_polar(1.0, x[0])).collect();
        let data = CauchyData::new(v.clone(), v.iter().map(|z| tau * z).collect()).unwrap();
        let times = [0.0, 5.0, 10.0];
        let modal = evolve(&op, &data, &times, EvolutionMethod::Modal).unwrap();
        let ode = evolve_ode(&op, &data, &times, Some(1e-4)).unwrap();
        let exact: Vec<C64> = data.state().iter().map(|z| z * (C64::new(0.0, -10.0) * tau).exp()).collect();
        let rel = |a: &[C64]| {
            let d: Vec<C64> = a.iter().zip(&exact).map(|(x, y)| x - y).collect();
            linalg::vec_norm(&d) / linalg::vec_norm(&exact)
        };
        assert!(rel(&modal.states[2]) < 1e-10);
        assert!(rel(&ode.states[2]) < 1e-6, "{}", rel(&ode.states[2]));
    }

    #[test]
    fn constants_are_stationary() {
        let op = circle(16, 0.3);
        let data = CauchyData::constant(16);
        for m in [EvolutionMethod::Modal, EvolutionMethod::Ode] {
            let tr = evolve(&op, &data, &[3.0, 7.0], m).unwrap();
            for s in &tr.states {
                for (a, b) in s.iter().zip(data.state()) {
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let op = circle(16, 0.1);
        let data = CauchyData::constant(16);
        assert!(evolve_ode(&op, &data, &[2.0, 1.0], None).is_err());
        assert!(evolve_ode(&op, &data, &[], None).is_err());
    }
}
