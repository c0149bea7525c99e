//! The Bolza surface: genus two, curvature −1, regular octagon with
//! opposite sides paired.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::OnceLock;

use rand::Rng;

use crate::dynamics::sl2::{self, Frame, IDENTITY};
use crate::error::{Error, Result};
use crate::C64;

/// Maximum number of generator applications in one reduction.
pub const REDUCTION_CAP: usize = 64;
const TIE: f64 = 1e-12;

pub struct Bolza {
    /// `g_k = K(kπ/4) T K(kπ/4)⁻¹`, `g_{k+4} = g_k⁻¹`.
    pub generators: [Frame; 8],
    /// Identity, generators and two-letter words; used for quotient distances.
    translates: Vec<Frame>,
    /// Disk radius of the octagon vertices.
    pub vertex_radius: f64,
}

impl Bolza {
    fn new() -> Self {
        // cosh(ℓ/2) = 1 + √2
        let half = (1.0 + SQRT_2).acosh();
        let t = sl2::geodesic(2.0 * half);
        let mut generators = [IDENTITY; 8];
        for (k, g) in generators.iter_mut().enumerate() {
            let r = sl2::rotation(k as f64 * PI / 4.0);
            *g = sl2::mul(&r, &sl2::mul(&t, &sl2::inv(&r)));
        }
        let mut translates = vec![IDENTITY];
        translates.extend(generators.iter().copied());
        for (i, a) in generators.iter().enumerate() {
            for (j, b) in generators.iter().enumerate() {
                if (i + 4) % 8 != j {
                    translates.push(sl2::mul(a, b));
                }
            }
        }
        // cosh R = cot²(π/8) for the circumradius
        let cot = 1.0 / (PI / 8.0).tan();
        let big_r = (cot * cot).acosh();
        Self {
            generators,
            translates,
            vertex_radius: (0.5 * big_r).tanh(),
        }
    }

    pub fn get() -> &'static Bolza {
        static B: OnceLock<Bolza> = OnceLock::new();
        B.get_or_init(Bolza::new)
    }

    /// `2(cosh d(g·i, i) - 1)`, monotone in the distance to the centre and
    /// free of the cancellation that the disk radius suffers far out.
    fn radius(g: &Frame) -> f64 {
        let z = sl2::base_point(g);
        (z - C64::new(0.0, 1.0)).norm_sqr() / z.im
    }

    /// Move `g` into the closed fundamental octagon by left multiplication
    /// with generators, always taking the lowest index that strictly
    /// decreases the distance to the centre.
    pub fn reduce(&self, g: &Frame) -> Result<Frame> {
        let mut g = *g;
        let mut r = Self::radius(&g);
        let mut applied = 0;
        'outer: loop {
            for gen in &self.generators {
                let h = sl2::mul(gen, &g);
                let rh = Self::radius(&h);
                if rh < r - TIE * (1.0 + r) {
                    applied += 1;
                    if applied > REDUCTION_CAP {
                        return Err(Error::ReductionCap {
                            cap: REDUCTION_CAP,
                            frame: g,
                        });
                    }
                    g = h;
                    r = rh;
                    continue 'outer;
                }
            }
            return Ok(g);
        }
    }

    pub fn contains(&self, g: &Frame) -> bool {
        let r = Self::radius(g);
        self.generators
            .iter()
            .all(|gen| Self::radius(&sl2::mul(gen, g)) >= r - TIE * (1.0 + r))
    }

    /// Distance on the quotient, approximated by the minimum over a fixed
    /// set of short group words (exact for points closer than the
    /// injectivity radius and away from the vertex cycle).
    pub fn distance(&self, g: &Frame, h: &Frame) -> f64 {
        let direct = sl2::local_distance(g, h);
        self.translates[1..]
            .iter()
            .map(|gamma| sl2::local_distance(g, &sl2::mul(gamma, h)))
            .fold(direct, f64::min)
    }

    /// `min(direct, translates)` but stops early once below `eps`.
    pub fn within(&self, g: &Frame, h: &Frame, eps: f64) -> bool {
        if sl2::local_distance(g, h) <= eps {
            return true;
        }
        self.translates[1..]
            .iter()
            .any(|gamma| sl2::local_distance(g, &sl2::mul(gamma, h)) <= eps)
    }

    /// Liouville-uniform frame in the octagon.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Frame {
        let rmax = self.vertex_radius;
        let peak = 1.0 / (1.0 - rmax * rmax).powi(2);
        loop {
            let w = C64::new(rng.gen_range(-rmax..rmax), rng.gen_range(-rmax..rmax));
            let u: f64 = rng.gen();
            let r2 = w.norm_sqr();
            if r2 >= rmax * rmax {
                continue;
            }
            // hyperbolic area element 4|dw|²/(1-|w|²)²
            if u * peak > 1.0 / (1.0 - r2).powi(2) {
                continue;
            }
            let theta = rng.gen_range(0.0..TAU);
            let g = sl2::frame_at(sl2::from_disk(w), theta);
            if self.contains(&g) {
                return g;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_pair_up() {
        let b = Bolza::get();
        for k in 0..4 {
            let p = sl2::mul(&b.generators[k], &b.generators[k + 4]);
            for (x, y) in p.iter().zip(IDENTITY.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        // translation length ℓ with cosh(ℓ/2) = 1 + √2
        let tr = b.generators[3][0] + b.generators[3][3];
        assert!((tr / 2.0 - (1.0 + SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn reduce_fixes_domain_points_and_undoes_generators() {
        let b = Bolza::get();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let h = b.sample(&mut rng);
            assert_eq!(b.reduce(&h).unwrap(), h);
            let g = sl2::mul(&b.generators[2], &h);
            let back = b.reduce(&g).unwrap();
            assert!(b.distance(&back, &h) < 1e-9);
            assert!(b.contains(&back));
            assert_eq!(b.reduce(&back).unwrap(), back);
        }
    }

    #[test]
    fn cap_triggers_on_far_points() {
        let b = Bolza::get();
        let far = sl2::geodesic(300.0);
        assert!(matches!(b.reduce(&far), Err(Error::ReductionCap { .. })));
    }
}
