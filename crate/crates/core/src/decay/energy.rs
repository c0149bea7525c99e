//! Energy and Sobolev norms on the grid.

use crate::decay::evolve::Trajectory;
use crate::decay::EvolutionMethod;
use crate::error::Result;
use crate::geometry::Geometry;
use crate::linalg::{self, RMat};
use crate::spectral::DiscreteOperator;
use crate::C64;

/// Energy series sampled along a trajectory.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub method: EvolutionMethod,
}

/// `⟨-Δu, u⟩`. On the periodic grids constants span the kernel exactly, so
/// the mean is removed first: `Δ·1` is only zero up to rounding, and that
/// residue would otherwise set an energy floor.
fn dirichlet(op: &DiscreteOperator, u: &[C64]) -> f64 {
    let centered;
    let u = if matches!(op.geometry, Geometry::MatrixInput { .. }) {
        u
    } else {
        let mean = u.iter().sum::<C64>() / u.len() as f64;
        centered = u.iter().map(|z| z - mean).collect::<Vec<_>>();
        &centered
    };
    let lu = linalg::rmatvec(&op.laplacian, u);
    -u.iter().zip(&lu).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
}

/// `E = ½(‖∂_t u‖² + ⟨-Δu, u⟩)` with the grid quadrature weight.
pub fn energy(op: &DiscreteOperator, state: &[C64]) -> f64 {
    let n = op.n();
    let (u, v) = state.split_at(n);
    let kinetic: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (0.5 * op.geometry.cell_volume() * (kinetic + dirichlet(op, u))).max(0.0)
}

pub fn energy_series(op: &DiscreteOperator, traj: &Trajectory) -> EnergySeries {
    EnergySeries {
        times: traj.times.clone(),
        energies: traj.states.iter().map(|s| energy(op, s)).collect(),
        method: traj.method,
    }
}

/// `‖u‖_{H^s} = ‖(1 - Δ)^{s/2} u‖` through the eigenbasis of `-Δ`.
pub struct SobolevNorms {
    eigenvalues: Vec<f64>,
    basis: RMat,
    cell_volume: f64,
}

impl SobolevNorms {
    pub fn new(op: &DiscreteOperator) -> Result<Self> {
        let neg = RMat::from_fn(op.n(), op.n(), |i, j| -op.laplacian[(i, j)]);
        let (values, basis) = linalg::sym_eigen(&neg)?;
        Ok(Self {
            eigenvalues: values.into_iter().map(|v| v.max(0.0)).collect(),
            basis,
            cell_volume: op.geometry.cell_volume(),
        })
    }

    pub fn norm_sq(&self, u: &[C64], s: f64) -> f64 {
        let n = u.len();
        (0..n)
            .map(|k| {
                let col = self.basis.col(k);
                let c: C64 = (0..n).map(|i| u[i] * col[i]).sum();
                (1.0 + self.eigenvalues[k]).powf(s) * c.norm_sqr()
            })
            .sum::<f64>()
            * self.cell_volume
    }

    pub fn norm(&self, u: &[C64], s: f64) -> f64 {
        self.norm_sq(u, s).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DampingProfile, Geometry};
    use crate::spectral::assemble_operator;
    use std::f64::consts::{PI, TAU};

    fn circle(n: usize, a0: f64) -> DiscreteOperator {
        assemble_operator(&Geometry::circle(TAU, n), &DampingProfile::constant(a0)).unwrap()
    }

    #[test]
    fn plane_wave_energy_is_pi() {
        let op = circle(32, 0.0);
        let u: Vec<C64> = Geometry::circle(TAU, 32)
            .nodes()
            .iter()
            .map(|x| C64::from_polar(1.0, x[0]))
            .collect();
        let mut state = u.clone();
        state.extend(vec![C64::new(0.0, 0.0); 32]);
        // the Laplacian is exact only to ε·‖Δ‖
        assert!((energy(&op, &state) - PI).abs() < 1e-11);
        let mut flat = vec![C64::new(1.0, 0.0); 32];
        flat.extend(vec![C64::new(0.0, 0.0); 32]);
        assert_eq!(energy(&op, &flat), 0.0);
    }

    #[test]
    fn sobolev_of_single_mode() {
        let op = circle(32, 0.0);
        let norms = SobolevNorms::new(&op).unwrap();
        let u: Vec<C64> = Geometry::circle(TAU, 32)
            .nodes()
            .iter()
            .map(|x| C64::from_polar(1.0, 3.0 * x[0]))
            .collect();
        // ‖e^{3ix}‖²_{H^s} = 2π·10^s
        for s in [0.0, 0.5, 1.0, 2.0] {
            assert!((norms.norm_sq(&u, s) / (TAU * 10f64.powf(s)) - 1.0).abs() < 1e-10);
        }
    }
}
