use serde::{Deserialize, Serialize};

use crate::spectral::solve::Spectrum;
use crate::C64;

pub const BAND_TOL: f64 = 1e-8;
pub const PAIRING_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylRow {
    pub lambda: f64,
    pub measured: usize,
    pub predicted: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub band_ok: bool,
    pub symmetry_ok: bool,
    /// `min{-Im τ : |τ| > zero_tol}`; `None` when only zero eigenvalues exist.
    pub gap: Option<f64>,
    pub weyl: Vec<WeylRow>,
    pub max_im: f64,
    pub min_im: f64,
    pub zero_present: bool,
    pub zero_tol: f64,
}

/// Whether some `τ'` in `values` pairs with `τ` under `τ ↦ -conj(τ)`.
fn has_partner(values: &[C64], tau: C64) -> bool {
    let target = -tau.conj();
    let tol = PAIRING_TOL * (1.0 + tau.norm());
    values.iter().any(|s| (s - target).norm() <= tol)
}

pub fn symmetry_ok(values: &[C64]) -> bool {
    values.iter().all(|t| has_partner(values, *t))
}

pub fn band_ok(values: &[C64], sup_damping: f64) -> bool {
    values
        .iter()
        .all(|t| t.im <= BAND_TOL && t.im >= -2.0 * sup_damping - BAND_TOL)
}

/// Spectral gap, excluding eigenvalues with `|τ| ≤ zero_tol`.
pub fn spectral_gap(values: &[C64], zero_tol: f64) -> Option<f64> {
    values
        .iter()
        .filter(|t| t.norm() > zero_tol)
        .map(|t| -t.im)
        .reduce(f64::min)
}

/// Number of eigenvalues with `zero_tol < Re τ ≤ λ`.
pub fn weyl_count(values: &[C64], lambda: f64, zero_tol: f64) -> usize {
    values
        .iter()
        .filter(|t| t.re > zero_tol && t.re <= lambda)
        .count()
}

pub fn spectrum_diagnostics(s: &Spectrum, lambdas: &[f64]) -> DiagnosticsReport {
    let values = &s.eigenvalues;
    let zero_tol = s.zero_tol();
    let weyl = lambdas
        .iter()
        .map(|&lambda| WeylRow {
            lambda,
            measured: weyl_count(values, lambda, zero_tol),
            predicted: s
                .provenance
                .geometry
                .as_ref()
                .and_then(|g| g.weyl_prediction(lambda)),
        })
        .collect();
    DiagnosticsReport {
        band_ok: band_ok(values, s.sup_damping),
        symmetry_ok: symmetry_ok(values),
        gap: spectral_gap(values, zero_tol),
        weyl,
        max_im: values.iter().map(|t| t.im).fold(f64::NEG_INFINITY, f64::max),
        min_im: values.iter().map(|t| t.im).fold(f64::INFINITY, f64::min),
        zero_present: values.iter().any(|t| t.norm() <= zero_tol),
        zero_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_skips_zero() {
        let v = [C64::new(0.0, 0.0), C64::new(1.0, -0.1), C64::new(-1.0, -0.1), C64::new(0.0, -0.2)];
        assert_eq!(spectral_gap(&v, 1e-8), Some(0.1));
        assert!(symmetry_ok(&v));
        assert!(band_ok(&v, 0.1));
        assert!(!band_ok(&v, 0.09));
    }

    #[test]
    fn asymmetric_set_is_flagged() {
        let v = [C64::new(1.0, -0.1), C64::new(-1.0, -0.2)];
        assert!(!symmetry_ok(&v));
    }

    #[test]
    fn weyl_counts_positive_real_parts() {
        let v = [C64::new(0.0, 0.0), C64::new(0.5, -0.1), C64::new(1.5, -0.1), C64::new(-0.5, -0.1)];
        assert_eq!(weyl_count(&v, 1.0, 1e-8), 1);
        assert_eq!(weyl_count(&v, 2.0, 1e-8), 2);
    }
}
