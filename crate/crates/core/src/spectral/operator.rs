//! Discretized Laplacian plus diagonal damping.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{wavenumbers, DampingProfile, Geometry};
use crate::linalg::{self, RMat};

/// Grid Laplacian `Δ` and damping samples `a` on the same nodes.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub laplacian: RMat,
    pub damping: Vec<f64>,
    pub sup_damping: f64,
    pub geometry: Geometry,
    /// `‖Δ·1‖∞ / ‖Δ‖` — zero up to rounding on connected grids.
    pub kernel_residual: f64,
}

impl DiscreteOperator {
    pub fn n(&self) -> usize {
        self.damping.len()
    }

    /// Max absolute row sum of the Laplacian.
    pub fn laplacian_norm(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.laplacian[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// For a torus with damping depending on `x` only: the `x`-Laplacian,
    /// the `x`-profile of the damping and the squared `y`-wavenumbers.
    pub fn x_separable(&self) -> Option<(RMat, Vec<f64>, Vec<f64>)> {
        let Geometry::FlatTorus { lx, ly, nx, ny } = self.geometry else {
            return None;
        };
        for i in 0..nx {
            let row = &self.damping[i * ny..(i + 1) * ny];
            if row.iter().any(|v| *v != row[0]) {
                return None;
            }
        }
        let ax = (0..nx).map(|i| self.damping[i * ny]).collect();
        let ky_sq = wavenumbers(ny)
            .into_iter()
            .map(|l| (2.0 * PI * l as f64 / ly).powi(2))
            .collect();
        Some((second_derivative(lx, nx), ax, ky_sq))
    }
}

/// Dense Fourier second-derivative matrix on `n` equispaced nodes of a
/// circle of length `length`. Every resolved mode `e^{iκx}` is an exact
/// eigenvector with eigenvalue `-κ²`.
pub fn second_derivative(length: f64, n: usize) -> RMat {
    let ks = wavenumbers(n);
    let column: Vec<f64> = (0..n)
        .map(|m| {
            let x = m as f64 * length / n as f64;
            ks.iter()
                .map(|&k| {
                    let kappa = 2.0 * PI * k as f64 / length;
                    -kappa * kappa * (kappa * x).cos()
                })
                .sum::<f64>()
                / n as f64
        })
        .collect::<Vec<f64>>();
    // The cosine sums leave Σ column ≈ n·ε·κ_max², a spurious mean mode.
    // Snapping to a grid of spacing ε·Σ|c| makes every partial sum exact, so
    // Δ·1 = 0 in any summation order once the diagonal closes the row.
    let total: f64 = column.iter().map(|c| c.abs()).sum();
    let quantum = 2f64.powi(total.log2().ceil() as i32 - 53);
    let mut column: Vec<f64> = column.iter().map(|c| (c / quantum).round() * quantum).collect();
    column[0] = -column[1..].iter().sum::<f64>();
    RMat::from_fn(n, n, |i, j| column[(i + n - j) % n])
}

fn torus_laplacian(lx: f64, ly: f64, nx: usize, ny: usize) -> RMat {
    let dx = second_derivative(lx, nx);
    let dy = second_derivative(ly, ny);
    let n = nx * ny;
    RMat::from_fn(n, n, |r, c| {
        let (i, j) = (r / ny, r % ny);
        let (k, l) = (c / ny, c % ny);
        let mut v = 0.0;
        if j == l {
            v += dx[(i, k)];
        }
        if i == k {
            v += dy[(j, l)];
        }
        v
    })
}

/// Read a real matrix in Matrix Market coordinate format.
pub fn read_matrix_market(path: &Path) -> Result<RMat> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<RMat> {
    let mm_err = |line: usize, message: &str| Error::MatrixMarket {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| mm_err(1, "empty file"))?;
    let head: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if head.len() < 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" {
        return Err(mm_err(1, "missing %%MatrixMarket matrix header"));
    }
    if head[2] != "coordinate" {
        return Err(mm_err(1, "only coordinate format is supported"));
    }
    if head[3] != "real" && head[3] != "integer" {
        return Err(mm_err(1, "field must be real or integer"));
    }
    let symmetric = match head[4].as_str() {
        "symmetric" => true,
        "general" => false,
        _ => return Err(mm_err(1, "symmetry must be general or symmetric")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut m: Option<RMat> = None;
    let mut seen = 0usize;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(mm_err(line_no, "size line must be `rows cols nnz`"));
                }
                let p = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| mm_err(line_no, "bad integer in size line"))
                };
                let (r, c, nnz) = (p(fields[0])?, p(fields[1])?, p(fields[2])?);
                if r != c {
                    return Err(mm_err(line_no, "matrix must be square"));
                }
                if r == 0 {
                    return Err(mm_err(line_no, "matrix is empty"));
                }
                size = Some((r, c, nnz));
                m = Some(RMat::zeros(r, c));
            }
            Some((r, _, _)) => {
                if fields.len() != 3 {
                    return Err(mm_err(line_no, "entry line must be `row col value`"));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| mm_err(line_no, "bad row index"))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| mm_err(line_no, "bad column index"))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| mm_err(line_no, "bad value"))?;
                if i == 0 || j == 0 || i > r || j > r {
                    return Err(mm_err(line_no, "index out of range"));
                }
                if !v.is_finite() {
                    return Err(mm_err(line_no, "non-finite value"));
                }
                let mat = m.as_mut().expect("allocated with size line");
                mat[(i - 1, j - 1)] += v;
                if symmetric && i != j {
                    mat[(j - 1, i - 1)] += v;
                }
                seen += 1;
            }
        }
    }
    let (_, _, nnz) = size.ok_or_else(|| mm_err(1, "missing size line"))?;
    if seen != nnz {
        return Err(mm_err(
            text.lines().count(),
            &format!("expected {nnz} entries, found {seen}"),
        ));
    }
    Ok(m.expect("allocated with size line"))
}

/// Reject non-symmetric or sign-indefinite Laplacians.
pub fn validate_laplacian(l: &RMat) -> Result<()> {
    let n = l.nrows();
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| l[(i, j)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((l[(i, j)] - l[(j, i)]).abs());
        }
    }
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric {
            asymmetry: asym / scale,
        });
    }
    let top = linalg::sym_eigenvalues(l)?
        .last()
        .copied()
        .unwrap_or(0.0);
    if top > 1e-10 * scale.max(1.0) {
        return Err(Error::NotNegativeSemidefinite {
            max_eigenvalue: top,
        });
    }
    Ok(())
}

/// Assemble `(Δ, a)` on the grid of `geometry`.
pub fn assemble_operator(geometry: &Geometry, damping: &DampingProfile) -> Result<DiscreteOperator> {
    geometry.validate()?;
    damping.validate()?;
    let laplacian = match geometry {
        Geometry::Circle { length, n } => second_derivative(*length, *n),
        Geometry::FlatTorus { lx, ly, nx, ny } => torus_laplacian(*lx, *ly, *nx, *ny),
        Geometry::MatrixInput { path } => {
            let l = read_matrix_market(path)?;
            validate_laplacian(&l)?;
            l
        }
    };
    let n = laplacian.nrows();
    let samples = damping.sample(geometry, n)?;
    let sup_damping = samples.iter().copied().fold(0.0, f64::max);
    let norm = (0..n)
        .map(|i| (0..n).map(|j| laplacian[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let kernel_residual = (0..n)
        .map(|i| (0..n).map(|j| laplacian[(i, j)]).sum::<f64>().abs())
        .fold(0.0, f64::max)
        / norm;
    Ok(DiscreteOperator {
        laplacian,
        damping: samples,
        sup_damping,
        geometry: geometry.clone(),
        kernel_residual,
    })
}
