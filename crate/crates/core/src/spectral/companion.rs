use crate::linalg::CMat;
use crate::spectral::operator::DiscreteOperator;
use crate::C64;

/// First-order generator `B = [[0, I], [-Δ, -2i·diag(a)]]` acting on
/// `(u, i∂_t u)`.
#[derive(Clone, Debug)]
pub struct CompanionOperator {
    pub matrix: CMat,
    /// Size of the underlying grid; `matrix` is `2n × 2n`.
    pub n: usize,
    /// Max absolute row sum of the Laplacian, used for balancing.
    pub laplacian_norm: f64,
    pub sup_damping: f64,
}

impl CompanionOperator {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Induced infinity norm of `B`.
    pub fn norm(&self) -> f64 {
        crate::linalg::norm_inf(&self.matrix)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        crate::linalg::matvec(&self.matrix, v)
    }
}

pub fn linearize(op: &DiscreteOperator) -> CompanionOperator {
    let n = op.n();
    let matrix = companion_matrix(&op.laplacian, &op.damping, 0.0, 1.0);
    CompanionOperator {
        matrix,
        n,
        laplacian_norm: op.laplacian_norm(),
        sup_damping: op.sup_damping,
    }
}

/// `[[0, σI], [(-Δ + shift)/σ, -2i·a]]`; `σ = 1, shift = 0` is `B` itself.
pub(crate) fn companion_matrix(
    laplacian: &crate::linalg::RMat,
    damping: &[f64],
    shift: f64,
    sigma: f64,
) -> CMat {
    let n = damping.len();
    let zero = C64::new(0.0, 0.0);
    CMat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => zero,
        (true, false) => {
            if j - n == i {
                C64::new(sigma, 0.0)
            } else {
                zero
            }
        }
        (false, true) => {
            let mut v = -laplacian[(i - n, j)];
            if i - n == j {
                v += shift;
            }
            C64::new(v / sigma, 0.0)
        }
        (false, false) => {
            if i == j {
                C64::new(0.0, -2.0 * damping[i - n])
            } else {
                zero
            }
        }
    })
}

/// `τ ↦ P(τ) = -Δ - τ² - 2iaτ`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticPencil<'a> {
    pub op: &'a DiscreteOperator,
}

impl<'a> QuadraticPencil<'a> {
    pub fn new(op: &'a DiscreteOperator) -> Self {
        Self { op }
    }

    pub fn eval(&self, tau: C64) -> CMat {
        let l = &self.op.laplacian;
        let a = &self.op.damping;
        let n = a.len();
        CMat::from_fn(n, n, |i, j| {
            let mut v = C64::new(-l[(i, j)], 0.0);
            if i == j {
                v -= tau * tau + C64::new(0.0, 2.0 * a[i]) * tau;
            }
            v
        })
    }

    /// Semiclassical form `Q(z, ħ) = ħ² P(√(2z)/ħ)`.
    pub fn eval_semiclassical(&self, z: C64, hbar: f64) -> CMat {
        let tau = (2.0 * z).sqrt() / hbar;
        let p = self.eval(tau);
        CMat::from_fn(p.nrows(), p.ncols(), |i, j| p[(i, j)] * (hbar * hbar))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DampingProfile, Geometry};
    use crate::linalg::RMat;
    use crate::spectral::operator::assemble_operator;

    fn toy() -> DiscreteOperator {
        let laplacian = RMat::from_fn(2, 2, |i, j| if i == j && i == 1 { -1.0 } else { 0.0 });
        DiscreteOperator {
            laplacian,
            damping: vec![0.1, 0.1],
            sup_damping: 0.1,
            geometry: Geometry::circle(1.0, 8),
            kernel_residual: 0.0,
        }
    }

    #[test]
    fn block_layout() {
        let b = linearize(&toy());
        let m = &b.matrix;
        let c = |re: f64, im: f64| C64::new(re, im);
        let expected = [
            [c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)],
            [c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
            [c(0., 0.), c(0., 0.), c(0., -0.2), c(0., 0.)],
            [c(0., 0.), c(1., 0.), c(0., 0.), c(0., -0.2)],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], expected[i][j], "({i},{j})");
            }
        }
    }

    #[test]
    fn undamped_companion_is_real() {
        let op = assemble_operator(&Geometry::circle(6.0, 16), &DampingProfile::constant(0.0)).unwrap();
        let b = linearize(&op);
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                assert_eq!(b.matrix[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn pencil_at_zero_is_minus_laplacian() {
        let op = toy();
        let p = QuadraticPencil::new(&op).eval(C64::new(0.0, 0.0));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(p[(i, j)], C64::new(-op.laplacian[(i, j)], 0.0));
            }
        }
    }
}
