use serde::{Deserialize, Serialize};

use crate::basis::Arrow;
use crate::error::{Error, Result};
use crate::regime::edge_at;
use crate::well::WellParams;

/// Energy-dependent quantities entering the spinor basis.
///
/// `k` and `α` describe the field-free region, `p` and `β` the inside of
/// the well where the local kinetic energy is `E + V`. Both ratios use the
/// magnitude of the local energy, `sqrt(| |ε| - m | / (|ε| + m))`, which is
/// the form that makes every basis family an exact solution in all zones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub energy: f64,
    pub k: f64,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `|E| > m`
    pub osc_outside: bool,
    /// `|E + V| > m`
    pub osc_inside: bool,
}

impl Kinematics {
    /// Fails with [`Error::EdgeEnergy`] when `|E| = m` or `|E + V| = m`,
    /// where a wave number vanishes and the spinor ratio degenerates.
    pub fn new(energy: f64, params: &WellParams) -> Result<Self> {
        let m = params.mass();
        let tol = params.edge_tolerance();
        let inside = energy + params.depth();
        if (energy.abs() - m).abs() <= tol || (inside.abs() - m).abs() <= tol {
            let edge = edge_at(energy, params)
                .map(|e| e.to_string())
                .unwrap_or_else(|| "|E| = m or |E+V| = m".to_owned());
            return Err(Error::EdgeEnergy { energy, edge });
        }
        Ok(Self::unchecked(energy, params))
    }

    /// Same as [`Kinematics::new`] but without the edge check.
    pub fn unchecked(energy: f64, params: &WellParams) -> Self {
        let m = params.mass();
        let inside = energy + params.depth();
        Self {
            energy,
            k: (energy * energy - m * m).abs().sqrt(),
            p: (inside * inside - m * m).abs().sqrt(),
            alpha: spinor_ratio(energy, m),
            beta: spinor_ratio(inside, m),
            osc_outside: energy.abs() > m,
            osc_inside: inside.abs() > m,
        }
    }

    pub fn outside_arrow(&self) -> Arrow {
        Arrow::of_energy(self.energy)
    }

    /// Sign of `E + V`.
    pub fn inside_arrow(&self, params: &WellParams) -> Arrow {
        Arrow::of_energy(self.energy + params.depth())
    }
}

fn spinor_ratio(local_energy: f64, m: f64) -> f64 {
    let e = local_energy.abs();
    ((e - m) / (e + m)).abs().sqrt()
}
