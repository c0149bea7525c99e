//! Thin wrappers around the dense kernels in `faer`.
//!
//! Everything in the crate goes through these helpers so that the global
//! parallelism setting is fixed once (sequential kernels keep results
//! bit-for-bit reproducible across runs).

use std::sync::Once;

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, Par, Side};

use crate::error::{Error, Result};
use crate::C64;

pub type CMat = Mat<C64>;
pub type RMat = Mat<f64>;

static INIT: Once = Once::new();

fn init() {
    INIT.call_once(|| faer::set_global_parallelism(Par::Seq));
}

/// Eigenvalues and (unit-norm) right eigenvectors of a general complex matrix.
pub fn eig(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    init();
    let n = m.nrows();
    let evd = m.eigen().map_err(|_| Error::NoConvergence {
        stage: "complex schur",
        dim: n,
    })?;
    let s = evd.S().column_vector();
    let values: Vec<C64> = (0..n).map(|i| s[i]).collect();
    let mut vectors = evd.U().to_owned();
    for j in 0..n {
        let norm = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                vectors[(i, j)] /= norm;
            }
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    init();
    m.eigenvalues().map_err(|_| Error::NoConvergence {
        stage: "complex schur",
        dim: m.nrows(),
    })
}

/// Singular values in non-increasing order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    init();
    m.singular_values().map_err(|_| Error::NoConvergence {
        stage: "svd",
        dim: m.nrows().max(m.ncols()),
    })
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn sym_eigenvalues(m: &RMat) -> Result<Vec<f64>> {
    init();
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence {
            stage: "symmetric evd",
            dim: m.nrows(),
        })
}

/// Ascending eigenpairs of a real symmetric matrix (orthonormal columns).
pub fn sym_eigen(m: &RMat) -> Result<(Vec<f64>, RMat)> {
    init();
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence {
            stage: "symmetric evd",
            dim: m.nrows(),
        })?;
    let s = evd.S().column_vector();
    let values = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((values, evd.U().to_owned()))
}

/// Dense inverse through partial-pivoting LU.
pub fn inverse(m: &CMat) -> CMat {
    init();
    m.partial_piv_lu().inverse()
}

/// Solve `m x = rhs` for a matrix right-hand side.
pub fn solve(m: &CMat, rhs: &CMat) -> CMat {
    init();
    m.partial_piv_lu().solve(rhs)
}

/// Reusable LU factorization.
pub struct Lu {
    lu: faer::linalg::solvers::PartialPivLu<C64>,
}

impl Lu {
    pub fn new(m: &CMat) -> Self {
        init();
        Self {
            lu: m.partial_piv_lu(),
        }
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        let b = CMat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve(&self, rhs: &CMat) -> CMat {
        self.lu.solve(rhs)
    }

    pub fn inverse(&self) -> CMat {
        self.lu.inverse()
    }
}

/// Ratio of extreme singular values; `+inf` when the smallest one vanishes.
pub fn condition_number(m: &CMat) -> Result<f64> {
    let s = singular_values(m)?;
    let (max, min) = (s[0], *s.last().unwrap_or(&0.0));
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

pub fn matvec(m: &CMat, v: &[C64]) -> Vec<C64> {
    let (r, c) = (m.nrows(), m.ncols());
    debug_assert_eq!(c, v.len());
    let mut out = vec![C64::new(0.0, 0.0); r];
    for j in 0..c {
        let vj = v[j];
        if vj == C64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(j);
        for i in 0..r {
            out[i] += col[i] * vj;
        }
    }
    out
}

pub fn rmatvec(m: &RMat, v: &[C64]) -> Vec<C64> {
    let (r, c) = (m.nrows(), m.ncols());
    debug_assert_eq!(c, v.len());
    let mut out = vec![C64::new(0.0, 0.0); r];
    for j in 0..c {
        let vj = v[j];
        let col = m.col(j);
        for i in 0..r {
            out[i] += vj * col[i];
        }
    }
    out
}

/// Induced infinity norm (max absolute row sum).
pub fn norm_inf(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn identity(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}


#[cfg(test)]
mod eig_residual {
    use super::*;

    #[test]
    fn general_matrix_eigenpairs() {
        let n = 12;
        let m = CMat::from_fn(n, n, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, if i == j { -0.3 } else { 0.0 }));
        let (vals, vecs) = eig(&m).unwrap();
        for j in 0..n {
            let x: Vec<C64> = (0..n).map(|i| vecs[(i, j)]).collect();
            let mx = matvec(&m, &x);
            let r: f64 = mx.iter().zip(&x).map(|(a, b)| (a - vals[j] * b).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-10, "col {j}: {r}");
        }
    }
}
