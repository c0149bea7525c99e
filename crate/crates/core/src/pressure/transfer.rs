//! Ruelle transfer matrix for subshifts of finite type.

use crate::error::{Error, Result};
use crate::pressure::{PressureEstimate, PressureMethod};

const REL_TOL: f64 = 1e-15;
const ACCEPT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200_000;

fn reachable(adj: &[Vec<u8>], forward: bool) -> Vec<bool> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            let edge = if forward { adj[i][j] } else { adj[j][i] };
            if edge != 0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// `log λ_max` of `M_ij = A_ij e^{w_j}` by power iteration on `M + I`
/// (the shift makes the matrix primitive), stopped on the
/// Collatz–Wielandt bracket.
pub fn pressure_transfer(adjacency: &[Vec<u8>], weights: &[f64]) -> Result<PressureEstimate> {
    let n = adjacency.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty adjacency matrix".into()));
    }
    if weights.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {n} symbols",
            weights.len()
        )));
    }
    for (i, row) in adjacency.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidArgument(format!("adjacency row {i} has length {}", row.len())));
        }
        if let Some(v) = row.iter().find(|v| **v > 1) {
            return Err(Error::InvalidArgument(format!("adjacency entry {v} in row {i} is not 0/1")));
        }
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidArgument(format!("weight {w} is not finite")));
    }
    let fwd = reachable(adjacency, true);
    let bwd = reachable(adjacency, false);
    let unreachable: Vec<usize> = (0..n).filter(|&i| !(fwd[i] && bwd[i])).collect();
    if !unreachable.is_empty() {
        return Err(Error::Reducible { unreachable });
    }

    let wmax = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = weights.iter().map(|w| (w - wmax).exp()).collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| x[i] + (0..n).filter(|&j| adjacency[i][j] != 0).map(|j| scaled[j] * x[j]).sum::<f64>())
            .collect()
    };
    let mut x = vec![1.0; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut warnings = Vec::new();
    for it in 0.. {
        let y = apply(&x);
        lo = f64::INFINITY;
        hi = 0.0;
        for (a, b) in y.iter().zip(&x) {
            let r = a / b;
            lo = f64::min(lo, r);
            hi = f64::max(hi, r);
        }
        let norm = y.iter().copied().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
        if hi - lo <= REL_TOL * hi {
            break;
        }
        if it == MAX_ITER {
            let gap = (hi - lo) / hi;
            if gap > ACCEPT_TOL {
                return Err(Error::NoConvergence {
                    stage: "transfer power iteration",
                    dim: n,
                });
            }
            warnings.push(format!("power iteration stopped at relative bracket {gap:.2e}"));
            break;
        }
    }
    let lambda = 0.5 * (lo + hi) - 1.0;
    Ok(PressureEstimate {
        value: wmax + lambda.ln(),
        method: PressureMethod::Transfer,
        eps: None,
        horizon: None,
        matrix_size: Some(n),
        z_value: None,
        error_bar: (hi - lo) / lambda,
        table: Vec::new(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pressure::log_sum_exp;

    #[test]
    fn full_shift_and_golden_mean() {
        let full = vec![vec![1u8; 3]; 3];
        let v = pressure_transfer(&full, &[-0.7; 3]).unwrap().value;
        assert!((v - (3f64.ln() - 0.7)).abs() < 1e-12);
        let golden = vec![vec![1, 1], vec![1, 0]];
        let v = pressure_transfer(&golden, &[0.0, 0.0]).unwrap().value;
        assert!((v - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-10);
    }

    #[test]
    fn reducible_names_states() {
        let a = vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]];
        match pressure_transfer(&a, &[0.0; 3]) {
            Err(Error::Reducible { unreachable }) => assert_eq!(unreachable, vec![1, 2]),
            other => panic!("{other:?}"),
        }
    }

    /// `(1/T) log Σ_{admissible words} e^{Σ w}` by dynamic programming over
    /// the last symbol, which is the same as enumerating words.
    fn enumerate(a: &[Vec<u8>], w: &[f64], t: usize) -> f64 {
        let n = a.len();
        let mut acc: Vec<f64> = w.to_vec();
        for _ in 1..t {
            acc = (0..n)
                .map(|j| w[j] + log_sum_exp((0..n).filter(|&i| a[i][j] != 0).map(|i| acc[i])))
                .collect();
        }
        log_sum_exp(acc) / t as f64
    }

    #[test]
    fn brute_force_words_bracket_transfer() {
        let a = vec![vec![1, 1, 0, 0], vec![0, 1, 1, 1], vec![1, 0, 0, 1], vec![1, 1, 1, 0]];
        let w = [0.3, -0.2, 0.1, -1.0];
        let p = pressure_transfer(&a, &w).unwrap().value;
        for t in 4..=12 {
            let e = enumerate(&a, &w, t);
            assert!((e - p).abs() <= 2.0 / t as f64 * 4f64.ln(), "T={t}: {e} vs {p}");
        }
    }
}
