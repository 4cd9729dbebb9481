use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pass/fail thresholds for the verification battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `| |T|² + |R|² - 1 |`
    pub unitarity: f64,
    /// Relative agreement of closed-form and generic Klein amplitudes.
    pub closed_form: f64,
    /// Max component error of the RK4 chain against the closed form.
    pub oracle: f64,
    /// Analytic component-relation and second-order residuals.
    pub residual: f64,
    /// Dirac residual of the basis families.
    pub dirac: f64,
    /// Relative `|𝔸|² - |𝔹|²` at bound states.
    pub flux_balance: f64,
    /// Wall currents relative to the inside flux scale.
    pub wall_current: f64,
    /// Minimum violation off the spectrum (flux or wall current).
    pub off_spectrum: f64,
    /// Relative variation of `J` within a region.
    pub current_region: f64,
    /// `J` jump across a wall.
    pub current_wall: f64,
    /// Bisection root vs closed form.
    pub root_match: f64,
    /// Spinor continuity at the walls.
    pub continuity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-12,
            closed_form: 1e-11,
            oracle: 1e-8,
            residual: 1e-13,
            dirac: 1e-12,
            flux_balance: 1e-10,
            wall_current: 1e-10,
            off_spectrum: 1e-3,
            current_region: 1e-10,
            current_wall: 1e-11,
            root_match: 1e-10,
            continuity: 1e-12,
        }
    }
}

impl Tolerances {
    /// Applies `key=value` overrides separated by commas, e.g.
    /// `unitarity=1e-10,oracle=1e-7`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("expected key=value, got '{item}'"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("tolerance '{key}' is not a number: '{value}'"))
            })?;
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "tolerance '{key}' must be positive, got {value}"
                )));
            }
            let slot = match key.trim() {
                "unitarity" => &mut self.unitarity,
                "closed_form" => &mut self.closed_form,
                "oracle" => &mut self.oracle,
                "residual" => &mut self.residual,
                "dirac" => &mut self.dirac,
                "flux_balance" => &mut self.flux_balance,
                "wall_current" => &mut self.wall_current,
                "off_spectrum" => &mut self.off_spectrum,
                "current_region" => &mut self.current_region,
                "current_wall" => &mut self.current_wall,
                "root_match" => &mut self.root_match,
                "continuity" => &mut self.continuity,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown tolerance '{other}'"
                    )))
                }
            };
            *slot = value;
        }
        Ok(self)
    }
}
