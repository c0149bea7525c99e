//! Damping as a function on phase space (pulled back from the base).

use crate::dynamics::flow::{PhasePoint, PhaseSpace};
use crate::error::{Error, Result};
use crate::geometry::{DampingProfile, Geometry, TrigInterpolant};

#[derive(Clone, Debug)]
enum Eval {
    Constant(f64),
    Strip { profile: DampingProfile, period: f64 },
    Interpolated(TrigInterpolant),
}

#[derive(Clone, Debug)]
pub struct DampingField {
    eval: Eval,
    pub space: PhaseSpace,
    /// `‖a‖∞` over the grid samples (constant profiles: the constant).
    pub sup_norm: f64,
    /// Spatial mean of `a`, equal to its Liouville mean on `S*M`.
    pub mean: f64,
    pub profile: DampingProfile,
}

impl DampingField {
    /// Damping on a circle or torus, sampled on the grid of `geometry`.
    pub fn on_geometry(profile: &DampingProfile, geometry: &Geometry) -> Result<Self> {
        let space = PhaseSpace::from_geometry(geometry)?;
        let n = geometry.grid_len().expect("flat geometries know their grid");
        let samples = profile.sample(geometry, n)?;
        let sup_norm = samples.iter().copied().fold(0.0, f64::max);
        let mean = liouville_mean_samples(&samples);
        let eval = match profile {
            DampingProfile::Constant { a0 } => Eval::Constant(*a0),
            DampingProfile::SmoothedStrip { .. } => Eval::Strip {
                profile: profile.clone(),
                period: match geometry {
                    Geometry::Circle { length, .. } => *length,
                    Geometry::FlatTorus { lx, .. } => *lx,
                    Geometry::MatrixInput { .. } => unreachable!(),
                },
            },
            DampingProfile::Samples { .. } => {
                Eval::Interpolated(TrigInterpolant::new(geometry, &samples)?)
            }
        };
        Ok(Self {
            eval,
            space,
            sup_norm,
            mean,
            profile: profile.clone(),
        })
    }

    /// Damping on the Bolza surface; only constant profiles are available
    /// since the surface carries no grid.
    pub fn on_bolza(profile: &DampingProfile) -> Result<Self> {
        profile.validate()?;
        match profile {
            DampingProfile::Constant { a0 } => Ok(Self {
                eval: Eval::Constant(*a0),
                space: PhaseSpace::Bolza,
                sup_norm: *a0,
                mean: *a0,
                profile: profile.clone(),
            }),
            _ => Err(Error::Unsupported(
                "only constant damping is available on the Bolza surface".into(),
            )),
        }
    }

    pub fn value(&self, p: &PhasePoint) -> f64 {
        let (x, y) = match p {
            PhasePoint::Circle { x, .. } => (*x, 0.0),
            PhasePoint::Torus { x, .. } => (x[0], x[1]),
            PhasePoint::Hyperbolic { .. } => (0.0, 0.0),
        };
        match &self.eval {
            Eval::Constant(a) => *a,
            Eval::Strip { profile, period } => profile
                .analytic_value(x, *period)
                .expect("strip profiles evaluate analytically"),
            // interpolation may undershoot between nodes; damping is nonnegative
            Eval::Interpolated(it) => it.eval(x, y).max(0.0),
        }
    }
}

fn liouville_mean_samples(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}
