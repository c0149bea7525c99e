//! Damped-wave operators, their companion linearization and spectra.

pub mod companion;
pub mod diagnostics;
pub mod operator;
pub mod oracle;
pub mod resolvent;
pub mod solve;

pub use companion::{linearize, CompanionOperator, QuadraticPencil};
pub use diagnostics::{band_ok, spectral_gap, spectrum_diagnostics, symmetry_ok, weyl_count, DiagnosticsReport, WeylRow};
pub use operator::{assemble_operator, DiscreteOperator};
pub use oracle::{constant_damping_oracle, semiclassical_rescale, RescaledEigenvalue};
pub use resolvent::{resolvent_block_check, resolvent_norm, resolvent_sweep, ResolventSweep};
pub use solve::{compute_spectrum, solve_spectrum, solve_spectrum_separable, Provenance, Spectrum, DENSE_CAP, NEAR_DEFECTIVE};
