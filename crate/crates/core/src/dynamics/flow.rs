//! Geodesic flows on the unit cotangent bundle of the model spaces.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::bolza::Bolza;
use crate::dynamics::sl2::{self, Frame};
use crate::error::{Error, Result};
use crate::geometry::Geometry;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseSpace {
    Circle { length: f64 },
    Torus { lx: f64, ly: f64 },
    /// Unit tangent bundle of the Bolza surface.
    Bolza,
}

impl PhaseSpace {
    pub fn from_geometry(g: &Geometry) -> Result<Self> {
        match g {
            Geometry::Circle { length, .. } => Ok(PhaseSpace::Circle { length: *length }),
            Geometry::FlatTorus { lx, ly, .. } => Ok(PhaseSpace::Torus { lx: *lx, ly: *ly }),
            Geometry::MatrixInput { .. } => Err(Error::Unsupported(
                "matrix input carries no geodesic flow".into(),
            )),
        }
    }

    pub fn is_anosov(&self) -> bool {
        matches!(self, PhaseSpace::Bolza)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhasePoint {
    /// `xi = ±1`.
    Circle { x: f64, xi: f64 },
    Torus { x: [f64; 2], xi: [f64; 2] },
    Hyperbolic { g: Frame },
}

impl PhasePoint {
    /// Position and covector flattened for dumps: `(x..., xi...)`.
    pub fn coordinates(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            PhasePoint::Circle { x, xi } => (vec![*x], vec![*xi]),
            PhasePoint::Torus { x, xi } => (x.to_vec(), xi.to_vec()),
            PhasePoint::Hyperbolic { g } => {
                let (z, theta) = sl2::iwasawa(g);
                (vec![z.re, z.im], vec![theta.cos(), theta.sin()])
            }
        }
    }
}

/// Periodic distance on `R / pZ`.
fn wrap_diff(a: f64, b: f64, p: f64) -> f64 {
    let d = (a - b).rem_euclid(p);
    d.min(p - d)
}

#[derive(Clone, Copy, Debug)]
pub struct GeodesicFlow {
    pub space: PhaseSpace,
}

impl GeodesicFlow {
    pub fn new(space: PhaseSpace) -> Self {
        Self { space }
    }

    pub fn flow(&self, p: &PhasePoint, t: f64) -> Result<PhasePoint> {
        match (self.space, p) {
            (PhaseSpace::Circle { length }, PhasePoint::Circle { x, xi }) => Ok(PhasePoint::Circle {
                x: (x + t * xi).rem_euclid(length),
                xi: *xi,
            }),
            (PhaseSpace::Torus { lx, ly }, PhasePoint::Torus { x, xi }) => Ok(PhasePoint::Torus {
                x: [
                    (x[0] + t * xi[0]).rem_euclid(lx),
                    (x[1] + t * xi[1]).rem_euclid(ly),
                ],
                xi: *xi,
            }),
            (PhaseSpace::Bolza, PhasePoint::Hyperbolic { g }) => {
                // Reduce at least once per unit time so entries stay O(1).
                let steps = t.abs().ceil().max(1.0) as usize;
                let a = sl2::geodesic(t / steps as f64);
                let mut g = *g;
                for _ in 0..steps {
                    g = Bolza::get().reduce(&sl2::renormalize(&sl2::mul(&g, &a)))?;
                }
                Ok(PhasePoint::Hyperbolic { g })
            }
            _ => Err(Error::InvalidArgument(format!(
                "phase point {p:?} does not live on {:?}",
                self.space
            ))),
        }
    }

    /// Distance on the phase space (periodic Euclidean on flat spaces,
    /// left-invariant on frames).
    pub fn distance(&self, a: &PhasePoint, b: &PhasePoint) -> f64 {
        match (self.space, a, b) {
            (PhaseSpace::Circle { length }, PhasePoint::Circle { x: x1, xi: k1 }, PhasePoint::Circle { x: x2, xi: k2 }) => {
                wrap_diff(*x1, *x2, length).hypot(k1 - k2)
            }
            (PhaseSpace::Torus { lx, ly }, PhasePoint::Torus { x: x1, xi: k1 }, PhasePoint::Torus { x: x2, xi: k2 }) => {
                let dx = wrap_diff(x1[0], x2[0], lx);
                let dy = wrap_diff(x1[1], x2[1], ly);
                (dx * dx + dy * dy + (k1[0] - k2[0]).powi(2) + (k1[1] - k2[1]).powi(2)).sqrt()
            }
            (PhaseSpace::Bolza, PhasePoint::Hyperbolic { g }, PhasePoint::Hyperbolic { g: h }) => {
                Bolza::get().distance(g, h)
            }
            _ => f64::INFINITY,
        }
    }

    /// One Liouville-uniform point.
    pub fn sample_one<R: Rng>(&self, rng: &mut R) -> PhasePoint {
        match self.space {
            PhaseSpace::Circle { length } => PhasePoint::Circle {
                x: rng.gen_range(0.0..length),
                xi: if rng.gen::<bool>() { 1.0 } else { -1.0 },
            },
            PhaseSpace::Torus { lx, ly } => {
                let x = [rng.gen_range(0.0..lx), rng.gen_range(0.0..ly)];
                let th: f64 = rng.gen_range(0.0..TAU);
                PhasePoint::Torus {
                    x,
                    xi: [th.cos(), th.sin()],
                }
            }
            PhaseSpace::Bolza => PhasePoint::Hyperbolic {
                g: Bolza::get().sample(rng),
            },
        }
    }
}

/// `n` Liouville-uniform points; deterministic in `seed`.
pub fn sample_phase_points(space: PhaseSpace, n: usize, seed: u64) -> Result<Vec<PhasePoint>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let flow = GeodesicFlow::new(space);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| flow.sample_one(&mut rng)).collect())
}
