//! A small abstraction over the dynamical systems fed to the pressure
//! estimators: geodesic flows and the doubling-map fixture.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::bolza::Bolza;
use crate::dynamics::flow::{GeodesicFlow, PhasePoint, PhaseSpace};
use crate::dynamics::sl2;
use crate::error::{Error, Result};

/// Where sample points are drawn from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleRegion {
    /// Liouville-uniform over the whole phase space.
    Global,
    /// Uniform in a coordinate box of the given half-width around a
    /// reference point. For mixing systems the pressure can be read off the
    /// orbit growth of any open set.
    Local { half_width: f64 },
}

pub trait Dynamics: Sync {
    type State: Clone + Send + Sync;

    fn is_map(&self) -> bool;

    /// Time step of the Bowen metric: exact iterates for maps, 0.1 for flows.
    fn bowen_step(&self) -> f64 {
        if self.is_map() {
            1.0
        } else {
            0.1
        }
    }

    fn sample(&self, n: usize, seed: u64, region: SampleRegion) -> Result<Vec<Self::State>>;

    fn advance(&self, s: &Self::State, t: f64) -> Result<Self::State>;

    fn distance(&self, a: &Self::State, b: &Self::State) -> f64;

    fn within(&self, a: &Self::State, b: &Self::State, eps: f64) -> bool {
        self.distance(a, b) <= eps
    }

    /// Coordinates used for spatial hashing and cover cells.
    fn key(&self, s: &Self::State) -> Vec<f64>;

    /// Period of each key coordinate, if any.
    fn key_periods(&self) -> Vec<Option<f64>>;

    /// Constant `L` with `|key(a) - key(b)|∞ ≤ L·d(a, b)` for nearby points.
    fn key_slack(&self) -> f64;

    /// Whether a key point lies in the phase space (used to count cover
    /// cells that no sample visits).
    fn key_in_domain(&self, _key: &[f64]) -> bool {
        true
    }
}

/// `x ↦ 2x mod 1` on the circle `[0, 1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DoublingMap;

impl Dynamics for DoublingMap {
    type State = f64;

    fn is_map(&self) -> bool {
        true
    }

    fn sample(&self, n: usize, seed: u64, region: SampleRegion) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(match region {
            SampleRegion::Global => (0..n).map(|_| rng.gen::<f64>()).collect(),
            SampleRegion::Local { half_width } => (0..n)
                .map(|_| (0.5 + rng.gen_range(-half_width..half_width)).rem_euclid(1.0))
                .collect(),
        })
    }

    fn advance(&self, s: &f64, t: f64) -> Result<f64> {
        if t < 0.0 || t.fract() != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "the doubling map only advances by non-negative integers, got {t}"
            )));
        }
        let mut x = *s;
        for _ in 0..t as usize {
            x = (2.0 * x).fract();
        }
        Ok(x)
    }

    fn distance(&self, a: &f64, b: &f64) -> f64 {
        let d = (a - b).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    fn key(&self, s: &f64) -> Vec<f64> {
        vec![*s]
    }

    fn key_periods(&self) -> Vec<Option<f64>> {
        vec![Some(1.0)]
    }

    fn key_slack(&self) -> f64 {
        1.0
    }
}

impl Dynamics for GeodesicFlow {
    type State = PhasePoint;

    fn is_map(&self) -> bool {
        false
    }

    fn sample(&self, n: usize, seed: u64, region: SampleRegion) -> Result<Vec<PhasePoint>> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match region {
            SampleRegion::Global => Ok((0..n).map(|_| self.sample_one(&mut rng)).collect()),
            SampleRegion::Local { half_width: h } => {
                let mut u = || rng.gen_range(-h..h);
                (0..n)
                    .map(|_| match self.space {
                        PhaseSpace::Circle { length } => Ok(PhasePoint::Circle {
                            x: 0.5 * length + u(),
                            xi: 1.0,
                        }),
                        PhaseSpace::Torus { lx, ly } => {
                            let x = [0.5 * lx + u(), 0.5 * ly + u()];
                            let th: f64 = u();
                            Ok(PhasePoint::Torus {
                                x,
                                xi: [th.cos(), th.sin()],
                            })
                        }
                        PhaseSpace::Bolza => {
                            let c = [u(), u(), u()];
                            let g = sl2::from_horospherical(&sl2::IDENTITY, c);
                            Ok(PhasePoint::Hyperbolic {
                                g: Bolza::get().reduce(&g)?,
                            })
                        }
                    })
                    .collect()
            }
        }
    }

    fn advance(&self, s: &PhasePoint, t: f64) -> Result<PhasePoint> {
        self.flow(s, t)
    }

    fn distance(&self, a: &PhasePoint, b: &PhasePoint) -> f64 {
        GeodesicFlow::distance(self, a, b)
    }

    fn within(&self, a: &PhasePoint, b: &PhasePoint, eps: f64) -> bool {
        match (a, b) {
            (PhasePoint::Hyperbolic { g }, PhasePoint::Hyperbolic { g: h }) => Bolza::get().within(g, h, eps),
            _ => GeodesicFlow::distance(self, a, b) <= eps,
        }
    }

    fn key(&self, s: &PhasePoint) -> Vec<f64> {
        match s {
            PhasePoint::Circle { x, xi } => vec![*x, *xi],
            PhasePoint::Torus { x, xi } => vec![x[0], x[1], xi[1].atan2(xi[0]).rem_euclid(TAU)],
            PhasePoint::Hyperbolic { g } => {
                let (z, theta) = sl2::iwasawa(g);
                let w = sl2::to_disk(z);
                vec![w.re, w.im, theta]
            }
        }
    }

    fn key_periods(&self) -> Vec<Option<f64>> {
        match self.space {
            PhaseSpace::Circle { length } => vec![Some(length), None],
            PhaseSpace::Torus { lx, ly } => vec![Some(lx), Some(ly), Some(TAU)],
            PhaseSpace::Bolza => vec![None, None, Some(TAU)],
        }
    }

    fn key_slack(&self) -> f64 {
        match self.space {
            PhaseSpace::Bolza => 3.0,
            // unit covectors: the angle moves at most ~1.6× the chord
            _ => 1.6,
        }
    }

    fn key_in_domain(&self, key: &[f64]) -> bool {
        match self.space {
            PhaseSpace::Bolza => {
                let w = crate::C64::new(key[0], key[1]);
                w.norm() < 1.0 && Bolza::get().contains(&sl2::frame_at(sl2::from_disk(w), key[2]))
            }
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_iterates() {
        let d = DoublingMap;
        assert_eq!(d.advance(&0.375, 2.0).unwrap(), 0.5);
        assert!(d.advance(&0.1, 0.5).is_err());
        assert!((d.distance(&0.95, &0.05) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn bolza_key_is_lipschitz() {
        let f = GeodesicFlow::new(PhaseSpace::Bolza);
        let pts = f.sample(200, 3, SampleRegion::Global).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in &pts {
            let PhasePoint::Hyperbolic { g } = p else { unreachable!() };
            let c = [rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02)];
            let h = sl2::from_horospherical(g, c);
            if !Bolza::get().contains(&h) {
                continue;
            }
            let q = PhasePoint::Hyperbolic { g: h };
            let d = f.distance(p, &q);
            let (ka, kb) = (f.key(p), f.key(&q));
            for k in 0..3 {
                let mut diff = (ka[k] - kb[k]).abs();
                if k == 2 {
                    diff = diff.min(TAU - diff);
                }
                assert!(diff <= f.key_slack() * d, "coord {k}: {diff} vs {d}");
            }
        }
    }
}
