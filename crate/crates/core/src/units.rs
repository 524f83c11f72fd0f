//! Physical unit scales.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair (ħ, ω) that sets the action and frequency scales.
///
/// Energies are ħ·ω·(dimensionless), times are 1/ω·(dimensionless). Both
/// default to one.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub omega: f64,
}

impl Default for Units {
    fn default() -> Self { Self { hbar: 1.0, omega: 1.0 } }
}

impl Units {
    pub fn new(hbar: f64, omega: f64) -> Result<Self> {
        let units = Self { hbar, omega };
        units.validate()?;
        Ok(units)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive and finite, got {}", self.hbar)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::Config(format!("omega must be positive and finite, got {}", self.omega)));
        }
        Ok(())
    }

    /// The energy quantum ħω.
    pub fn energy_scale(&self) -> f64 { self.hbar * self.omega }
}
