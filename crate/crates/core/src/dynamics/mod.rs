//! Geodesic flows, Birkhoff sums and the pressure weight `a^u`.

pub mod averages;
pub mod bolza;
pub mod field;
pub mod flow;
pub mod sl2;
pub mod system;

pub use averages::{
    a_u_weight, au_trajectory, birkhoff_average, birkhoff_average_reversed, damping_integral,
    liouville_mean, min_time_average, AuWeight, DampingStats, TrajectorySample,
};
pub use bolza::Bolza;
pub use field::DampingField;
pub use flow::{sample_phase_points, GeodesicFlow, PhasePoint, PhaseSpace};
pub use system::{DoublingMap, Dynamics, SampleRegion};
