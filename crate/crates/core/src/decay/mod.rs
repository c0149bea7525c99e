//! Damped-wave evolution, energies, decay-rate fits and spectral projectors.
//!
//! States are `U = (u, i∂_t u)` and evolve by `∂_t U = -iBU`.

pub mod energy;
pub mod evolve;
pub mod fit;
pub mod projector;
pub mod report;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::C64;

pub use energy::{energy, energy_series, EnergySeries, SobolevNorms};
pub use evolve::{default_dt, evolve, evolve_modal, evolve_ode, EvolutionMethod, Trajectory};
pub use fit::{fit_decay_rate, window_bound_check, DecayFit};
pub use projector::{
    cluster_eigenvalues, cluster_projectors, contour_projector, mode_expansion, Cluster, Expansion, ModeProjection,
    Region, DEFAULT_QUADRATURE,
};
pub use report::{decay_experiment, DecayOptions, DecayReport};

/// Initial data `(ω₀, ω₁) = (u(0), i∂_t u(0))` on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    pub omega0: Vec<C64>,
    pub omega1: Vec<C64>,
}

impl CauchyData {
    pub fn new(omega0: Vec<C64>, omega1: Vec<C64>) -> Result<Self> {
        if omega0.len() != omega1.len() || omega0.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "cauchy data components have lengths {} and {}",
                omega0.len(),
                omega1.len()
            )));
        }
        if omega0.iter().chain(&omega1).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidArgument("cauchy data must be finite".into()));
        }
        Ok(Self { omega0, omega1 })
    }

    /// From displacement `u(0)` and velocity `∂_t u(0)`.
    pub fn from_velocity(u: Vec<C64>, ut: &[C64]) -> Result<Self> {
        let i = C64::new(0.0, 1.0);
        Self::new(u, ut.iter().map(|v| i * v).collect())
    }

    /// Split a stacked state `(u, i∂_t u)`.
    pub fn from_state(state: &[C64]) -> Result<Self> {
        if state.len() % 2 != 0 {
            return Err(Error::InvalidArgument("state length must be even".into()));
        }
        let n = state.len() / 2;
        Self::new(state[..n].to_vec(), state[n..].to_vec())
    }

    /// `u ≡ 1`, `∂_t u = 0`.
    pub fn constant(n: usize) -> Self {
        Self {
            omega0: vec![C64::new(1.0, 0.0); n],
            omega1: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Real trigonometric data with random coefficients on wavenumbers up to
    /// `kmax` per axis, damped like `(1 + |k|²)^{-1}`.
    pub fn random_smooth(geometry: &Geometry, kmax: usize, seed: u64) -> Result<Self> {
        let (lx, ly, two_d) = match geometry {
            Geometry::Circle { length, .. } => (*length, 1.0, false),
            Geometry::FlatTorus { lx, ly, .. } => (*lx, *ly, true),
            Geometry::MatrixInput { .. } => {
                return Err(Error::Unsupported("random smooth data needs a grid geometry".into()))
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = kmax as i64;
        let ky_range = if two_d { -k..=k } else { 0..=0 };
        let mut terms = Vec::new();
        for kx in -k..=k {
            for ky in ky_range.clone() {
                let w = 1.0 / (1.0 + (kx * kx + ky * ky) as f64);
                let mut g = || rng.gen_range(-1.0..1.0) * w;
                terms.push((kx as f64, ky as f64, g(), g(), g(), g()));
            }
        }
        let nodes = geometry.nodes();
        let mut u = Vec::with_capacity(nodes.len());
        let mut ut = Vec::with_capacity(nodes.len());
        for [x, y] in nodes {
            let (mut a, mut b) = (0.0, 0.0);
            for (kx, ky, c0, s0, c1, s1) in &terms {
                let phase = TAU * (kx * x / lx + ky * y / ly);
                let (s, c) = phase.sin_cos();
                a += c0 * c + s0 * s;
                b += c1 * c + s1 * s;
            }
            u.push(C64::new(a, 0.0));
            ut.push(C64::new(b, 0.0));
        }
        Self::from_velocity(u, &ut)
    }

    pub fn len(&self) -> usize {
        self.omega0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega0.is_empty()
    }

    pub fn state(&self) -> Vec<C64> {
        self.omega0.iter().chain(&self.omega1).copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip() {
        let g = Geometry::circle(TAU, 16);
        let d = CauchyData::random_smooth(&g, 3, 1).unwrap();
        assert_eq!(CauchyData::from_state(&d.state()).unwrap(), d);
        assert!(d.omega0.iter().all(|z| z.im == 0.0));
        assert!(d.omega1.iter().all(|z| z.re == 0.0));
        assert!(CauchyData::new(vec![C64::new(1.0, 0.0)], vec![]).is_err());
    }
}
