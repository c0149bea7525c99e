//! Model geometries and damping profiles.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub const MIN_RESOLUTION: usize = 8;
pub const CIRCLE_RESOLUTION_CAP: usize = 2048;
pub const TORUS_RESOLUTION_CAP: usize = 64;

/// A compact boundaryless manifold together with its grid resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// The circle `R / LZ` sampled at `n` equispaced nodes.
    Circle { length: f64, n: usize },
    /// The flat torus `R² / (lx Z × ly Z)` on an `nx × ny` grid.
    FlatTorus {
        lx: f64,
        ly: f64,
        nx: usize,
        ny: usize,
    },
    /// A user-supplied Laplacian in Matrix Market coordinate format.
    MatrixInput { path: PathBuf },
}

impl Geometry {
    pub fn circle(length: f64, n: usize) -> Self {
        Geometry::Circle { length, n }
    }

    pub fn torus(lx: f64, ly: f64, nx: usize, ny: usize) -> Self {
        Geometry::FlatTorus { lx, ly, nx, ny }
    }

    pub fn validate(&self) -> Result<()> {
        let check_len = |name: &str, l: f64| {
            if l.is_finite() && l > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidGeometry(format!("{name} must be positive, got {l}")))
            }
        };
        let check_res = |name: &str, n: usize, cap: usize| {
            if n < MIN_RESOLUTION {
                Err(Error::InvalidGeometry(format!(
                    "{name} = {n} is below the minimum resolution {MIN_RESOLUTION}"
                )))
            } else if n > cap {
                Err(Error::InvalidGeometry(format!("{name} = {n} exceeds the cap {cap}")))
            } else {
                Ok(())
            }
        };
        match self {
            Geometry::Circle { length, n } => {
                check_len("length", *length)?;
                check_res("n", *n, CIRCLE_RESOLUTION_CAP)
            }
            Geometry::FlatTorus { lx, ly, nx, ny } => {
                check_len("lx", *lx)?;
                check_len("ly", *ly)?;
                check_res("nx", *nx, TORUS_RESOLUTION_CAP)?;
                check_res("ny", *ny, TORUS_RESOLUTION_CAP)
            }
            Geometry::MatrixInput { .. } => Ok(()),
        }
    }

    /// Spatial dimension, unknown for matrix input.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Geometry::Circle { .. } => Some(1),
            Geometry::FlatTorus { .. } => Some(2),
            Geometry::MatrixInput { .. } => None,
        }
    }

    /// Number of grid nodes, unknown for matrix input until the file is read.
    pub fn grid_len(&self) -> Option<usize> {
        match self {
            Geometry::Circle { n, .. } => Some(*n),
            Geometry::FlatTorus { nx, ny, .. } => Some(nx * ny),
            Geometry::MatrixInput { .. } => None,
        }
    }

    /// Riemannian volume of the manifold.
    pub fn volume(&self) -> Option<f64> {
        match self {
            Geometry::Circle { length, .. } => Some(*length),
            Geometry::FlatTorus { lx, ly, .. } => Some(lx * ly),
            Geometry::MatrixInput { .. } => None,
        }
    }

    /// Quadrature weight of a single grid node; 1 for matrix input.
    pub fn cell_volume(&self) -> f64 {
        match self {
            Geometry::Circle { length, n } => length / *n as f64,
            Geometry::FlatTorus { lx, ly, nx, ny } => (lx / *nx as f64) * (ly / *ny as f64),
            Geometry::MatrixInput { .. } => 1.0,
        }
    }

    /// Smallest grid spacing.
    pub fn min_spacing(&self) -> f64 {
        match self {
            Geometry::Circle { length, n } => length / *n as f64,
            Geometry::FlatTorus { lx, ly, nx, ny } => (lx / *nx as f64).min(ly / *ny as f64),
            Geometry::MatrixInput { .. } => 1.0,
        }
    }

    /// Node coordinates; torus nodes are ordered with `y` fastest.
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        match self {
            Geometry::Circle { length, n } => (0..*n)
                .map(|j| [j as f64 * length / *n as f64, 0.0])
                .collect(),
            Geometry::FlatTorus { lx, ly, nx, ny } => {
                let mut out = Vec::with_capacity(nx * ny);
                for i in 0..*nx {
                    for j in 0..*ny {
                        out.push([i as f64 * lx / *nx as f64, j as f64 * ly / *ny as f64]);
                    }
                }
                out
            }
            Geometry::MatrixInput { .. } => Vec::new(),
        }
    }

    /// Predicted Weyl count `(λ/2π)^d vol{(x,ξ) : |ξ|² ≤ 1}`.
    pub fn weyl_prediction(&self, lambda: f64) -> Option<f64> {
        match self {
            Geometry::Circle { length, .. } => Some(lambda / (2.0 * PI) * length * 2.0),
            Geometry::FlatTorus { lx, ly, .. } => {
                Some((lambda / (2.0 * PI)).powi(2) * lx * ly * PI)
            }
            Geometry::MatrixInput { .. } => None,
        }
    }

    /// Largest resolved angular wavenumber (the Nyquist frequency of the coarsest axis).
    pub fn nyquist(&self) -> Option<f64> {
        match self {
            Geometry::Circle { length, n } => Some(PI * *n as f64 / length),
            Geometry::FlatTorus { lx, ly, nx, ny } => {
                Some((PI * *nx as f64 / lx).min(PI * *ny as f64 / ly))
            }
            Geometry::MatrixInput { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Geometry::Circle { length, n } => format!("circle(L={length}, n={n})"),
            Geometry::FlatTorus { lx, ly, nx, ny } => {
                format!("torus(lx={lx}, ly={ly}, {nx}x{ny})")
            }
            Geometry::MatrixInput { path } => format!("matrix({})", path.display()),
        }
    }
}

/// Integer wavenumbers of an `n`-point periodic grid; even `n` carries the
/// Nyquist index `n/2` once.
pub fn wavenumbers(n: usize) -> Vec<i64> {
    let n = n as i64;
    let lo = -((n - 1) / 2);
    let hi = n / 2;
    (lo..=hi).collect()
}

/// The damping coefficient `a(x) ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DampingProfile {
    Constant {
        a0: f64,
    },
    /// Mollified indicator of `|x - center| ≤ width/2` (first coordinate
    /// only), with transition layers of thickness `smoothing`.
    SmoothedStrip {
        center: f64,
        width: f64,
        a0: f64,
        smoothing: f64,
    },
    /// Values at the grid nodes.
    Samples {
        values: Vec<f64>,
    },
}

impl DampingProfile {
    pub fn constant(a0: f64) -> Self {
        DampingProfile::Constant { a0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DampingProfile::Constant { a0 } => {
                if !(a0.is_finite() && *a0 >= 0.0) {
                    return Err(Error::InvalidDamping(format!("a0 must be >= 0, got {a0}")));
                }
            }
            DampingProfile::SmoothedStrip {
                center,
                width,
                a0,
                smoothing,
            } => {
                if !(a0.is_finite() && *a0 >= 0.0) {
                    return Err(Error::InvalidDamping(format!("a0 must be >= 0, got {a0}")));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::InvalidDamping(format!("width must be > 0, got {width}")));
                }
                if !(smoothing.is_finite() && *smoothing > 0.0) {
                    return Err(Error::InvalidDamping(format!(
                        "smoothing must be > 0, got {smoothing}"
                    )));
                }
                if !center.is_finite() {
                    return Err(Error::InvalidDamping("center must be finite".into()));
                }
            }
            DampingProfile::Samples { values } => {
                if let Some((i, v)) = values
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
                {
                    return Err(Error::InvalidDamping(format!(
                        "sample {i} is {v}; damping must be nonnegative"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sample the profile on the grid of `geometry`; `len` is the grid size
    /// (needed for matrix input where the geometry does not know it).
    pub fn sample(&self, geometry: &Geometry, len: usize) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            DampingProfile::Constant { a0 } => Ok(vec![*a0; len]),
            DampingProfile::SmoothedStrip { .. } => {
                let period = match geometry {
                    Geometry::Circle { length, .. } => *length,
                    Geometry::FlatTorus { lx, .. } => *lx,
                    Geometry::MatrixInput { .. } => {
                        return Err(Error::Unsupported(
                            "strip damping needs a circle or torus grid".into(),
                        ))
                    }
                };
                Ok(geometry
                    .nodes()
                    .iter()
                    .map(|p| self.strip_value(p[0], period))
                    .collect())
            }
            DampingProfile::Samples { values } => {
                if values.len() != len {
                    return Err(Error::InvalidDamping(format!(
                        "{} samples given for a grid of {} nodes",
                        values.len(),
                        len
                    )));
                }
                Ok(values.clone())
            }
        }
    }

    fn strip_value(&self, x: f64, period: f64) -> f64 {
        match self {
            DampingProfile::SmoothedStrip {
                center,
                width,
                a0,
                smoothing,
            } => {
                let mut d = (x - center).rem_euclid(period);
                if d > period / 2.0 {
                    d = period - d;
                }
                a0 * smooth_step((0.5 * width + 0.5 * smoothing - d) / smoothing)
            }
            _ => unreachable!("strip_value on a non-strip profile"),
        }
    }

    /// Value at a point of a circle or torus of the given first-axis period.
    /// Only meaningful for `Constant` and `SmoothedStrip`.
    pub fn analytic_value(&self, x: f64, period: f64) -> Option<f64> {
        match self {
            DampingProfile::Constant { a0 } => Some(*a0),
            DampingProfile::SmoothedStrip { .. } => Some(self.strip_value(x, period)),
            DampingProfile::Samples { .. } => None,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            DampingProfile::Constant { a0 } => *a0 == 0.0,
            DampingProfile::SmoothedStrip { a0, .. } => *a0 == 0.0,
            DampingProfile::Samples { values } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// Whether the profile depends on the first coordinate only.
    pub fn depends_on_x_only(&self, geometry: &Geometry) -> bool {
        match (self, geometry) {
            (DampingProfile::Constant { .. }, _) => true,
            (DampingProfile::SmoothedStrip { .. }, _) => true,
            (DampingProfile::Samples { values }, Geometry::FlatTorus { nx, ny, .. }) => {
                values.len() == nx * ny
                    && (0..*nx).all(|i| {
                        let row = &values[i * ny..(i + 1) * ny];
                        row.iter().all(|v| *v == row[0])
                    })
            }
            (DampingProfile::Samples { .. }, _) => true,
        }
    }
}

/// `C^∞` step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, `s(t) + s(1-t) = 1`.
pub fn smooth_step(t: f64) -> f64 {
    fn bump(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let (p, q) = (bump(t), bump(1.0 - t));
        p / (p + q)
    }
}

/// Trigonometric interpolant of grid samples on a circle or torus.
#[derive(Clone, Debug)]
pub struct TrigInterpolant {
    periods: [f64; 2],
    kx: Vec<i64>,
    ky: Vec<i64>,
    nyquist: [Option<i64>; 2],
    /// Coefficients indexed `[ix * ky.len() + iy]`.
    coeffs: Vec<C64>,
}

impl TrigInterpolant {
    pub fn new(geometry: &Geometry, values: &[f64]) -> Result<Self> {
        let (periods, nx, ny) = match geometry {
            Geometry::Circle { length, n } => ([*length, 1.0], *n, 1),
            Geometry::FlatTorus { lx, ly, nx, ny } => ([*lx, *ly], *nx, *ny),
            Geometry::MatrixInput { .. } => {
                return Err(Error::Unsupported(
                    "interpolation needs a circle or torus grid".into(),
                ))
            }
        };
        if values.len() != nx * ny {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {}x{} grid",
                values.len(),
                nx,
                ny
            )));
        }
        let kx = wavenumbers(nx);
        let ky = if ny == 1 { vec![0] } else { wavenumbers(ny) };
        let nyq = |n: usize| (n % 2 == 0 && n > 1).then_some(n as i64 / 2);
        // Transform along y first, then along x.
        let mut partial = vec![C64::new(0.0, 0.0); nx * ky.len()];
        for i in 0..nx {
            for (b, &l) in ky.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..ny {
                    let phase = -2.0 * PI * (l * j as i64) as f64 / ny as f64;
                    acc += values[i * ny + j] * C64::from_polar(1.0, phase);
                }
                partial[i * ky.len() + b] = acc / ny as f64;
            }
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); kx.len() * ky.len()];
        for (a, &k) in kx.iter().enumerate() {
            for b in 0..ky.len() {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..nx {
                    let phase = -2.0 * PI * (k * i as i64) as f64 / nx as f64;
                    acc += partial[i * ky.len() + b] * C64::from_polar(1.0, phase);
                }
                coeffs[a * ky.len() + b] = acc / nx as f64;
            }
        }
        Ok(Self {
            periods,
            kx,
            ky,
            nyquist: [nyq(nx), if ny == 1 { None } else { nyq(ny) }],
            coeffs,
        })
    }

    fn basis(k: i64, nyquist: Option<i64>, x: f64, period: f64) -> C64 {
        let theta = 2.0 * PI * k as f64 * x / period;
        if Some(k) == nyquist {
            C64::new(theta.cos(), 0.0)
        } else {
            C64::from_polar(1.0, theta)
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let fy: Vec<C64> = self
            .ky
            .iter()
            .map(|&l| Self::basis(l, self.nyquist[1], y, self.periods[1]))
            .collect();
        let mut acc = C64::new(0.0, 0.0);
        for (a, &k) in self.kx.iter().enumerate() {
            let fx = Self::basis(k, self.nyquist[0], x, self.periods[0]);
            let row = &self.coeffs[a * self.ky.len()..(a + 1) * self.ky.len()];
            let inner: C64 = row.iter().zip(&fy).map(|(c, f)| c * f).sum();
            acc += fx * inner;
        }
        acc.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry() {
        assert!(Geometry::circle(-1.0, 16).validate().is_err());
        assert!(Geometry::circle(1.0, 4).validate().is_err());
        assert!(Geometry::torus(1.0, 1.0, 16, 128).validate().is_err());
        assert!(Geometry::torus(1.0, 2.0, 16, 8).validate().is_ok());
    }

    #[test]
    fn rejects_negative_damping() {
        let p = DampingProfile::Samples {
            values: vec![0.1, -0.2, 0.3],
        };
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("sample 1"), "{err}");
        assert!(DampingProfile::constant(-0.1).validate().is_err());
    }

    #[test]
    fn smooth_step_symmetry() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
        }
        assert_eq!(smooth_step(-0.3), 0.0);
        assert_eq!(smooth_step(1.2), 1.0);
    }

    #[test]
    fn strip_mean_is_width_times_height() {
        let g = Geometry::circle(1.0, 512);
        let p = DampingProfile::SmoothedStrip {
            center: 0.5,
            width: 0.3,
            a0: 0.7,
            smoothing: 0.05,
        };
        let v = p.sample(&g, 512).unwrap();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!((mean - 0.3 * 0.7).abs() < 1e-8, "{mean}");
        assert!(v.iter().all(|x| *x >= 0.0 && *x <= 0.7));
    }

    #[test]
    fn trig_interpolant_reproduces_band_limited_function() {
        let g = Geometry::torus(2.0, 1.0, 16, 12);
        let f = |x: f64, y: f64| 1.0 + (PI * x).sin() * (2.0 * PI * y).cos() + 0.3 * (3.0 * PI * x).cos();
        let vals: Vec<f64> = g.nodes().iter().map(|p| f(p[0], p[1])).collect();
        let it = TrigInterpolant::new(&g, &vals).unwrap();
        for &(x, y) in &[(0.123, 0.77), (1.9, 0.01), (0.5, 0.5)] {
            assert!((it.eval(x, y) - f(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn wavenumber_sets() {
        assert_eq!(wavenumbers(4), vec![-1, 0, 1, 2]);
        assert_eq!(wavenumbers(5), vec![-2, -1, 0, 1, 2]);
    }
}
