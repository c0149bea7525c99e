//! Numerical laboratory for the damped wave equation on compact model
//! geometries.
//!
//! The crate is organised around four subsystems:
//!
//! * [`spectral`] assembles the discretized operator `(Δ, a)`, linearizes the
//!   quadratic pencil `P(τ) = -Δ - τ² - 2iaτ` into the first-order generator
//!   `B` and validates its spectrum against closed forms.
//! * [`dynamics`] implements geodesic flows on the circle, the flat torus and
//!   the Bolza surface (constant curvature −1), together with Birkhoff sums,
//!   the pressure weight `a^u` and the dynamical damping means.
//! * [`pressure`] estimates topological pressure from separated sets, from
//!   refined covers and from transfer matrices.
//! * [`decay`] evolves Cauchy data, measures energies, fits decay rates and
//!   builds spectral projectors by contour integration.

pub mod decay;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod pressure;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{DampingProfile, Geometry};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
