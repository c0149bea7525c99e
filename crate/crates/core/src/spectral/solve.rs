//! Dense eigendecomposition of the companion operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::linalg::{self, CMat};
use crate::spectral::companion::{companion_matrix, CompanionOperator};
use crate::spectral::operator::DiscreteOperator;
use crate::C64;

/// Default cap on the companion dimension `2N` for dense solves.
pub const DENSE_CAP: usize = 4096;

/// Eigenvectors with per-eigenvalue condition numbers above this are flagged.
pub const NEAR_DEFECTIVE: f64 = 1e8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub geometry: Option<Geometry>,
    pub dim: usize,
    pub solver: String,
    /// `‖B‖∞` of the unbalanced generator.
    pub b_norm: f64,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Sorted by decreasing `Im τ`, then increasing `Re τ`.
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors `(u, τu)` as unit-norm columns, in eigenvalue order.
    pub vectors: Option<CMat>,
    /// `cond₂(V)` of the eigenvector matrix.
    pub condition: Option<f64>,
    /// Per-eigenvalue condition numbers `‖y_j‖‖x_j‖ / |y_j^* x_j|`.
    pub eigen_condition: Option<Vec<f64>>,
    pub sup_damping: f64,
    pub provenance: Provenance,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Tolerance below which `|τ|` is treated as the zero eigenvalue.
    pub fn zero_tol(&self) -> f64 {
        1e-8 * self.provenance.b_norm.max(1.0)
    }

    pub fn cond_flags(&self) -> Vec<bool> {
        match &self.eigen_condition {
            Some(k) => k.iter().map(|c| !(*c <= NEAR_DEFECTIVE)).collect(),
            None => vec![false; self.len()],
        }
    }

    pub fn is_near_defective(&self) -> bool {
        self.condition.is_some_and(|c| !(c <= NEAR_DEFECTIVE))
    }
}

fn order(a: &C64, b: &C64) -> std::cmp::Ordering {
    b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re))
}

fn balance_factor(laplacian_norm: f64) -> f64 {
    if laplacian_norm > 0.0 {
        laplacian_norm.sqrt()
    } else {
        1.0
    }
}

/// All `2N` eigenvalues of `B` (and eigenvectors on request) by a dense
/// complex Schur decomposition of the diagonally balanced generator.
pub fn solve_spectrum(b: &CompanionOperator, want_vectors: bool) -> Result<Spectrum> {
    solve_spectrum_capped(b, want_vectors, DENSE_CAP, None)
}

pub fn solve_spectrum_capped(
    b: &CompanionOperator,
    want_vectors: bool,
    cap: usize,
    geometry: Option<&Geometry>,
) -> Result<Spectrum> {
    let dim = b.dim();
    if dim > cap {
        return Err(Error::TooLarge { dim, cap });
    }
    let n = b.n;
    let sigma = balance_factor(b.laplacian_norm);
    // Similarity by diag(I, σI) equalizes the off-diagonal block norms.
    let balanced = CMat::from_fn(dim, dim, |i, j| {
        let m = b.matrix[(i, j)];
        match (i < n, j < n) {
            (true, false) => m * sigma,
            (false, true) => m / sigma,
            _ => m,
        }
    });
    let provenance = Provenance {
        geometry: geometry.cloned(),
        dim,
        solver: "dense complex schur (faer), diagonal balancing".into(),
        b_norm: b.norm(),
    };

    if !want_vectors {
        let mut eigenvalues = linalg::eigenvalues(&balanced)?;
        eigenvalues.sort_by(order);
        return Ok(Spectrum {
            eigenvalues,
            vectors: None,
            condition: None,
            eigen_condition: None,
            sup_damping: b.sup_damping,
            provenance,
        });
    }

    let (values, raw) = linalg::eig(&balanced)?;
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.sort_by(|&x, &y| order(&values[x], &values[y]));
    let eigenvalues: Vec<C64> = idx.iter().map(|&k| values[k]).collect();
    let mut vectors = CMat::from_fn(dim, dim, |i, j| {
        let v = raw[(i, idx[j])];
        if i < n {
            v
        } else {
            v * sigma
        }
    });
    for j in 0..dim {
        let norm = (0..dim).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            vectors[(i, j)] /= norm;
        }
    }
    let condition = linalg::condition_number(&vectors)?;
    let eigen_condition = if condition.is_finite() {
        let inv = linalg::inverse(&vectors);
        (0..dim)
            .map(|j| (0..dim).map(|k| inv[(j, k)].norm_sqr()).sum::<f64>().sqrt())
            .collect()
    } else {
        vec![f64::INFINITY; dim]
    };
    Ok(Spectrum {
        eigenvalues,
        vectors: Some(vectors),
        condition: Some(condition),
        eigen_condition: Some(eigen_condition),
        sup_damping: b.sup_damping,
        provenance,
    })
}

/// Eigenvalues of a torus operator whose damping depends on `x` only, by
/// block-diagonalizing in the `y`-Fourier basis: each wavenumber `k_y`
/// contributes the `2nx`-dimensional pencil of `Δ_x - k_y²`.
pub fn solve_spectrum_separable(op: &DiscreteOperator) -> Result<Spectrum> {
    let (dx, ax, ky_sq) = op.x_separable().ok_or_else(|| {
        Error::Unsupported("separable solve needs a torus with x-only damping".into())
    })?;
    let nx = ax.len();
    let dx_norm = (0..nx)
        .map(|i| (0..nx).map(|j| dx[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut eigenvalues = Vec::with_capacity(2 * nx * ky_sq.len());
    for &k2 in &ky_sq {
        let sigma = balance_factor(dx_norm + k2);
        let block = companion_matrix(&dx, &ax, k2, 1.0);
        let balanced = CMat::from_fn(2 * nx, 2 * nx, |i, j| {
            let m = block[(i, j)];
            match (i < nx, j < nx) {
                (true, false) => m * sigma,
                (false, true) => m / sigma,
                _ => m,
            }
        });
        eigenvalues.extend(linalg::eigenvalues(&balanced)?);
    }
    eigenvalues.sort_by(order);
    // ‖B‖∞ without assembling B: the top rows contribute 1.
    let b_norm = (op.laplacian_norm() + 2.0 * op.sup_damping).max(1.0);
    Ok(Spectrum {
        eigenvalues,
        vectors: None,
        condition: None,
        eigen_condition: None,
        sup_damping: op.sup_damping,
        provenance: Provenance {
            geometry: Some(op.geometry.clone()),
            dim: 2 * op.n(),
            solver: "y-Fourier block decomposition, dense complex schur per block".into(),
            b_norm,
        },
    })
}

/// Dense solve when it fits under `cap`, otherwise the separable solve when
/// the damping allows it.
pub fn compute_spectrum(op: &DiscreteOperator, want_vectors: bool, cap: usize) -> Result<Spectrum> {
    let dim = 2 * op.n();
    if dim <= cap {
        let b = crate::spectral::companion::linearize(op);
        return solve_spectrum_capped(&b, want_vectors, cap, Some(&op.geometry));
    }
    if !want_vectors && op.x_separable().is_some() {
        return solve_spectrum_separable(op);
    }
    Err(Error::TooLarge { dim, cap })
}
