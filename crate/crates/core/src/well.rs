use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative edge tolerance; multiplied by the mass it gives the absolute
/// window in which an energy is treated as sitting on a zone edge.
pub const EDGE_TOLERANCE: f64 = 1e-12;

/// Square well of depth `V` and width `a` for a particle of mass `m`.
///
/// The potential is `-V` on `[0, a]` and zero elsewhere. Energies and the
/// mass share units; the width has inverse-energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellParams {
    mass: f64,
    depth: f64,
    width: f64,
    has_klein_zone: bool,
}

impl WellParams {
    pub fn new(mass: f64, depth: f64, width: f64) -> Result<Self> {
        for (name, value) in [("m", mass), ("V", depth), ("a", width)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and positive, got {value}"
                )));
            }
        }
        Ok(Self {
            mass,
            depth,
            width,
            has_klein_zone: depth > 2.0 * mass,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// True iff `V > 2m`, i.e. the window `-V+m < E < -m` is nonempty.
    pub fn has_klein_zone(&self) -> bool {
        self.has_klein_zone
    }

    /// Absolute tolerance used to detect zone edges.
    pub fn edge_tolerance(&self) -> f64 {
        EDGE_TOLERANCE * self.mass
    }

    /// Potential energy at `x`: `-V` on the closed interval `[0, a]`.
    pub fn potential(&self, x: f64) -> f64 {
        if (0.0..=self.width).contains(&x) {
            -self.depth
        } else {
            0.0
        }
    }

    /// Open Klein zone `(-V+m, -m)`, if nonempty.
    pub fn klein_zone(&self) -> Option<(f64, f64)> {
        self.has_klein_zone
            .then(|| (-self.depth + self.mass, -self.mass))
    }

    /// Largest `n` for which both Klein branches stay inside the zone:
    /// `floor((m a / π) sqrt((V/m - 1)^2 - 1))`.
    pub fn n_max(&self) -> Option<u32> {
        if !self.has_klein_zone {
            return None;
        }
        let ratio = self.depth / self.mass - 1.0;
        let bound = self.mass * self.width / std::f64::consts::PI * (ratio * ratio - 1.0).sqrt();
        Some(bound.floor() as u32)
    }
}
