use serde::{Deserialize, Serialize};

use crate::C64;

/// Roots of `τ² + 2i·a0·τ - k² = 0`, ordered by descending `Im`, then
/// descending `Re`.
pub fn constant_damping_oracle(k_sq: f64, a0: f64) -> (C64, C64) {
    let d = k_sq - a0 * a0;
    if d >= 0.0 {
        let s = d.sqrt();
        (C64::new(s, -a0), C64::new(-s, -a0))
    } else {
        let r = (-d).sqrt();
        (C64::new(0.0, -(a0 - r)), C64::new(0.0, -(a0 + r)))
    }
}

/// `τ = λ/ħ`, `z = λ²/2`, `z = ½ + ħζ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaledEigenvalue {
    pub hbar: f64,
    pub lambda: C64,
    pub z: C64,
    pub zeta: C64,
    tau: C64,
}

impl RescaledEigenvalue {
    /// The original eigenvalue (kept verbatim so the round trip is exact).
    pub fn tau(&self) -> C64 {
        self.tau
    }
}

pub fn semiclassical_rescale(tau: C64, hbar: f64) -> crate::Result<RescaledEigenvalue> {
    if !(hbar > 0.0 && hbar <= 1.0) {
        return Err(crate::Error::InvalidArgument(format!(
            "hbar must lie in (0, 1], got {hbar}"
        )));
    }
    let lambda = tau * hbar;
    let z = lambda * lambda / 2.0;
    let zeta = (z - 0.5) / hbar;
    Ok(RescaledEigenvalue {
        hbar,
        lambda,
        z,
        zeta,
        tau,
    })
}
