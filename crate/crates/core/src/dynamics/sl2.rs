//! `SL(2,R)` frames acting on the upper half-plane.
//!
//! A frame `g = [a, b, c, d]` (row-major) represents the unit tangent vector
//! at `g·i` obtained by pushing forward the upward vector at `i`. The
//! geodesic flow is right multiplication by `diag(e^{t/2}, e^{-t/2})`.

use crate::C64;

pub type Frame = [f64; 4];

pub const IDENTITY: Frame = [1.0, 0.0, 0.0, 1.0];

#[inline]
pub fn mul(x: &Frame, y: &Frame) -> Frame {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

#[inline]
pub fn inv(x: &Frame) -> Frame {
    [x[3], -x[1], -x[2], x[0]]
}

#[inline]
pub fn det(x: &Frame) -> f64 {
    x[0] * x[3] - x[1] * x[2]
}

/// Rescale to determinant one (guards against drift over long runs).
pub fn renormalize(x: &Frame) -> Frame {
    let s = det(x).sqrt();
    [x[0] / s, x[1] / s, x[2] / s, x[3] / s]
}

/// `diag(e^{t/2}, e^{-t/2})`.
pub fn geodesic(t: f64) -> Frame {
    [(0.5 * t).exp(), 0.0, 0.0, (-0.5 * t).exp()]
}

/// Rotation by angle `theta` about `i`.
pub fn rotation(theta: f64) -> Frame {
    let (s, c) = (0.5 * theta).sin_cos();
    [c, s, -s, c]
}

/// `exp(x E_u)`, the unstable horocycle.
pub fn unstable(x: f64) -> Frame {
    [1.0, 0.0, x, 1.0]
}

/// `exp(z E_s)`, the stable horocycle.
pub fn stable(z: f64) -> Frame {
    [1.0, z, 0.0, 1.0]
}

/// Möbius action on the upper half-plane.
pub fn act(g: &Frame, z: C64) -> C64 {
    (g[0] * z + g[1]) / (g[2] * z + g[3])
}

pub fn base_point(g: &Frame) -> C64 {
    act(g, C64::new(0.0, 1.0))
}

/// Cayley transform to the unit disk, `i ↦ 0`.
pub fn to_disk(z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    (z - i) / (z + i)
}

pub fn from_disk(w: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    i * (1.0 + w) / (1.0 - w)
}

/// Frame at `z` pointing in direction `theta` (measured from vertical).
pub fn frame_at(z: C64, theta: f64) -> Frame {
    let sy = z.im.sqrt();
    let p = [sy, z.re / sy, 0.0, 1.0 / sy];
    mul(&p, &rotation(theta))
}

/// Inverse of [`frame_at`]: base point and direction angle in `[0, 2π)`.
pub fn iwasawa(g: &Frame) -> (C64, f64) {
    let z = base_point(g);
    let sy = z.im.sqrt();
    let p_inv = [1.0 / sy, -z.re / sy, 0.0, sy];
    let k = mul(&p_inv, g);
    let theta = (2.0 * k[1].atan2(k[0])).rem_euclid(std::f64::consts::TAU);
    (z, theta)
}

/// Coordinates `(p, q, r)` of `log g = [[p, q], [r, -p]]`, taking the sign
/// of `g` with non-negative trace (frames live in `PSL(2,R)`).
pub fn log(g: &Frame) -> [f64; 3] {
    let g = if g[0] + g[3] < 0.0 { [-g[0], -g[1], -g[2], -g[3]] } else { *g };
    let half = 0.5 * (g[0] + g[3]);
    let m = [g[0] - half, g[1], g[2], g[3] - half];
    // m = X·sinh(θ)/θ (hyperbolic) or X·sin(θ)/θ (elliptic), cosh/cos θ = half.
    let scale = if half > 1.0 {
        let th = half.acosh();
        th / th.sinh()
    } else if half < 1.0 {
        let th = half.acos();
        th / th.sin()
    } else {
        1.0
    };
    [scale * m[0], scale * m[1], scale * m[2]]
}

/// Left-invariant distance proxy `‖log(g⁻¹h)‖` with the flow generator of
/// unit length.
pub fn local_distance(g: &Frame, h: &Frame) -> f64 {
    let [p, q, r] = log(&mul(&inv(g), h));
    (4.0 * p * p + q * q + r * r).sqrt()
}

/// Horospherical coordinates `(x, y, z)` with `g0⁻¹g = U(x) A(y) S(z)`:
/// unstable, flow and stable components.
pub fn horospherical(g0: &Frame, g: &Frame) -> [f64; 3] {
    let m = mul(&inv(g0), g);
    let m11 = m[0];
    [m[2] / m11, 2.0 * m11.abs().ln(), m[1] / m11]
}

pub fn from_horospherical(g0: &Frame, c: [f64; 3]) -> Frame {
    mul(g0, &mul(&unstable(c[0]), &mul(&geodesic(c[1]), &stable(c[2]))))
}
