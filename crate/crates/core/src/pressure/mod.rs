//! Topological pressure estimators and the gap predicate `Pr + ε < 0`.

pub mod cover;
pub mod schedule;
pub mod separated;
pub mod transfer;

use serde::{Deserialize, Serialize};

use crate::dynamics::SampleRegion;
use crate::error::{Error, Result};

pub use cover::{pressure_cover, CoverReport, CoverWord};
pub use schedule::pressure_schedule;
pub use separated::pressure_separated;
pub use transfer::pressure_transfer;

/// Observable `f` on the state space of a [`crate::dynamics::Dynamics`].
pub type Observable<'a, S> = &'a (dyn Fn(&S) -> Result<f64> + Sync);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMethod {
    Separated,
    Cover,
    Transfer,
    ClosedForm,
    Schedule,
}

impl PressureMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PressureMethod::Separated => "separated",
            PressureMethod::Cover => "cover",
            PressureMethod::Transfer => "transfer",
            PressureMethod::ClosedForm => "closed_form",
            PressureMethod::Schedule => "schedule",
        }
    }
}

/// How sample points are spread; `Local` boxes scale with `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Global,
    /// Box of half-width `factor · ε` around the reference point.
    Local { factor: f64 },
}

impl RegionSpec {
    pub fn region(&self, eps: f64) -> SampleRegion {
        match self {
            RegionSpec::Global => SampleRegion::Global,
            RegionSpec::Local { factor } => SampleRegion::Local {
                half_width: factor * eps,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureConfig {
    /// Strictly descending.
    pub epsilons: Vec<f64>,
    /// Strictly ascending.
    pub horizons: Vec<usize>,
    /// Energy-shell half-width (metadata; estimators sample `S*M`).
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
    pub region: RegionSpec,
    /// Relative enlargement of cover cells.
    pub cover_margin: f64,
}

impl PressureConfig {
    /// Defaults for flows: `T ∈ {2,4,6,8}`, `ε ∈ {0.2, 0.1, 0.05}`.
    pub fn flow_defaults() -> Self {
        Self {
            epsilons: vec![0.2, 0.1, 0.05],
            horizons: vec![2, 4, 6, 8],
            delta: 0.25,
            samples: 20_000,
            seed: 0,
            region: RegionSpec::Local { factor: 0.25 },
            cover_margin: 0.1,
        }
    }

    /// Defaults for maps: `T ∈ {4,6,8,10}`.
    pub fn map_defaults() -> Self {
        Self {
            horizons: vec![4, 6, 8, 10],
            samples: 1 << 20,
            region: RegionSpec::Global,
            ..Self::flow_defaults()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.epsilons.is_empty() || self.horizons.is_empty() {
            return bad("epsilon and horizon lists must be non-empty".into());
        }
        if self.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return bad("epsilons must be positive".into());
        }
        if self.epsilons.windows(2).any(|w| w[0] <= w[1]) {
            return bad("epsilons must be strictly descending".into());
        }
        if self.horizons.iter().any(|t| *t == 0) {
            return bad("horizons must be positive".into());
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return bad("horizons must be strictly ascending".into());
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return bad(format!("delta must lie in (0, 1/2), got {}", self.delta));
        }
        if self.samples < 1000 {
            return bad(format!("sample budget must be >= 1000, got {}", self.samples));
        }
        if !(self.cover_margin >= 0.0 && self.cover_margin < 0.5) {
            return bad(format!("cover margin must lie in [0, 1/2), got {}", self.cover_margin));
        }
        if let RegionSpec::Local { factor } = self.region {
            if !(factor > 0.0 && factor.is_finite()) {
                return bad("local region factor must be positive".into());
            }
        }
        Ok(())
    }
}

/// One `(ε, T)` cell of an estimator table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureRow {
    pub method: PressureMethod,
    pub eps: f64,
    pub horizon: usize,
    pub value: f64,
    /// `log Z / T` before normalization.
    pub z_value: f64,
    /// Size of the separated set or of the selected subcover.
    pub set_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    pub value: f64,
    pub method: PressureMethod,
    pub eps: Option<f64>,
    pub horizon: Option<usize>,
    pub matrix_size: Option<usize>,
    pub z_value: Option<f64>,
    pub error_bar: f64,
    pub table: Vec<PressureRow>,
    pub warnings: Vec<String>,
}

impl PressureEstimate {
    pub fn closed_form(value: f64) -> Self {
        Self {
            value,
            method: PressureMethod::ClosedForm,
            eps: None,
            horizon: None,
            matrix_size: None,
            z_value: None,
            error_bar: 0.0,
            table: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapVerdict {
    pub pressure: f64,
    pub margin: f64,
    pub threshold: f64,
    pub satisfied: bool,
}

/// `threshold = Pr + ε`, satisfied iff it is negative.
pub fn gap_condition(pressure: f64, margin: f64) -> Result<GapVerdict> {
    if !pressure.is_finite() {
        return Err(Error::InvalidArgument(format!("pressure must be finite, got {pressure}")));
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::InvalidArgument(format!("margin must be positive, got {margin}")));
    }
    let threshold = pressure + margin;
    Ok(GapVerdict {
        pressure,
        margin,
        threshold,
        satisfied: threshold < 0.0,
    })
}

/// `log Σ exp(x_i)` without overflow.
pub(crate) fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
