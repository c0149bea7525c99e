//! Riesz projectors `Π_j = (2πi)⁻¹∮(τ - B)⁻¹dτ` and the eigenvalue expansion.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decay::CauchyData;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::spectral::{CompanionOperator, Spectrum};
use crate::C64;

pub const DEFAULT_QUADRATURE: usize = 32;
const CLUSTER_GAP: f64 = 1e-6;
const BOUNDARY_TOL: f64 = 1e-6;

/// A group of numerically coincident eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub center: C64,
    pub members: Vec<usize>,
    /// Half the distance from the centre to the nearest other eigenvalue.
    pub radius: f64,
}

/// Single-linkage clusters with gap `1e-6·(1 + |τ|)`.
pub fn cluster_eigenvalues(values: &[C64]) -> Vec<Cluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = CLUSTER_GAP * (1.0 + values[i].norm().max(values[j].norm()));
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
        .into_iter()
        .map(|members| {
            let center = members.iter().map(|&i| values[i]).sum::<C64>() / members.len() as f64;
            let nearest = (0..n)
                .filter(|i| !members.contains(i))
                .map(|i| (values[i] - center).norm())
                .fold(f64::INFINITY, f64::min);
            let radius = if nearest.is_finite() { 0.5 * nearest } else { 1.0 };
            Cluster { center, members, radius }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ModeProjection {
    pub eigenvalue: C64,
    /// Cluster size.
    pub multiplicity: usize,
    /// `Re tr Π`.
    pub rank: f64,
    pub projector: CMat,
    /// `max |Π² - Π|`.
    pub idempotence: f64,
    /// `Π·U(0)` when computed from an expansion.
    pub projected: Option<Vec<C64>>,
}

/// Trapezoidal quadrature of the resolvent on the circle `|τ - center| =
/// radius` with `n_quad` nodes; fails if the trace does not round to
/// `multiplicity`.
pub fn contour_projector(
    b: &CompanionOperator,
    center: C64,
    radius: f64,
    n_quad: usize,
    multiplicity: usize,
) -> Result<ModeProjection> {
    if !(radius > 0.0 && radius.is_finite()) || n_quad < 4 {
        return Err(Error::InvalidArgument(format!(
            "contour needs a positive radius and >= 4 nodes, got {radius} and {n_quad}"
        )));
    }
    let dim = b.dim();
    let terms: Vec<CMat> = (0..n_quad)
        .into_par_iter()
        .map(|k| {
            let w = C64::from_polar(radius, TAU * k as f64 / n_quad as f64);
            let tau = center + w;
            let shifted = CMat::from_fn(dim, dim, |i, j| if i == j { tau } else { C64::new(0.0, 0.0) } - b.matrix[(i, j)]);
            let r = linalg::inverse(&shifted);
            let scale = w / n_quad as f64;
            CMat::from_fn(dim, dim, |i, j| r[(i, j)] * scale)
        })
        .collect();
    let mut p = CMat::zeros(dim, dim);
    for t in &terms {
        p += t;
    }
    let rank: f64 = (0..dim).map(|i| p[(i, i)].re).sum();
    if (rank - multiplicity as f64).abs() > 0.5 {
        return Err(Error::Enclosure {
            center,
            expected: multiplicity,
            rank,
        });
    }
    let idempotence = linalg::max_abs_diff(&(&p * &p), &p);
    Ok(ModeProjection {
        eigenvalue: center,
        multiplicity,
        rank,
        projector: p,
        idempotence,
        projected: None,
    })
}

/// Projectors for every cluster of the spectrum.
pub fn cluster_projectors(b: &CompanionOperator, spectrum: &Spectrum, n_quad: usize) -> Result<Vec<ModeProjection>> {
    cluster_eigenvalues(&spectrum.eigenvalues)
        .iter()
        .map(|c| contour_projector(b, c.center, c.radius, n_quad, c.members.len()))
        .collect()
}

/// `Ω = [-e₀, e₀] + i[im_min, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub e0: f64,
    pub im_min: f64,
}

impl Region {
    pub fn contains(&self, tau: C64) -> bool {
        tau.re.abs() <= self.e0 && tau.im >= self.im_min
    }

    /// Distance from `tau` to the boundary (two vertical rays and the bottom edge).
    pub fn boundary_distance(&self, tau: C64) -> f64 {
        let seg = |x: f64| {
            let dx = tau.re - x;
            let dy = (self.im_min - tau.im).max(0.0);
            dx.hypot(dy)
        };
        let bottom = {
            let dx = (tau.re.abs() - self.e0).max(0.0);
            dx.hypot(tau.im - self.im_min)
        };
        seg(self.e0).min(seg(-self.e0)).min(bottom)
    }
}

pub struct Expansion {
    pub modes: Vec<ModeProjection>,
    /// `(I - ΣΠ_j)·U(0)`.
    pub remainder: Vec<C64>,
}

/// Projections of the data onto every eigenvalue cluster inside `region`,
/// plus the remainder.
pub fn mode_expansion(
    b: &CompanionOperator,
    spectrum: &Spectrum,
    data: &CauchyData,
    region: Region,
    n_quad: usize,
) -> Result<Expansion> {
    if let Some(tau) = spectrum
        .eigenvalues
        .iter()
        .find(|t| region.boundary_distance(**t) < BOUNDARY_TOL)
    {
        return Err(Error::OnBoundary {
            tau: *tau,
            distance: region.boundary_distance(*tau),
        });
    }
    let u0 = data.state();
    let mut remainder = u0.clone();
    let mut modes = Vec::new();
    for c in cluster_eigenvalues(&spectrum.eigenvalues) {
        if !region.contains(c.center) {
            continue;
        }
        let mut m = contour_projector(b, c.center, c.radius, n_quad, c.members.len())?;
        let uj = linalg::matvec(&m.projector, &u0);
        for (r, v) in remainder.iter_mut().zip(&uj) {
            *r -= v;
        }
        m.projected = Some(uj);
        modes.push(m);
    }
    Ok(Expansion { modes, remainder })
}
