//! Independent check of the closed-form solutions.
//!
//! The first-order system is integrated directly,
//!
//! ```text
//! dψ⁺/dx = (m + E - V(x)) ψ⁻
//! dψ⁻/dx = (m - E + V(x)) ψ⁺
//! ```
//!
//! with a fixed-step classical RK4 scheme that never steps across a wall.
//! Nothing here touches the basis families or the matching code except
//! as an optional reference to compare against.

use serde::{Deserialize, Serialize};

use crate::basis::{Arrow, BasisKind, Region};
use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::matching::{Piece, Wavefunction};
use crate::spinor::Spinor;
use crate::well::WellParams;

pub const DEFAULT_STEPS: usize = 10_000;
pub const RICHARDSON_TOLERANCE: f64 = 1e-8;
/// Default minimum steps per radian of phase (or e-fold) in a region.
pub const DEFAULT_STEPS_PER_RADIAN: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Minimum number of steps per call.
    pub steps: usize,
    /// Raises the step count to `steps_per_radian · |q| · (x1 - x0)`, with
    /// `q` the local wavenumber or decay rate.
    pub steps_per_radian: f64,
    /// Repeat with `2 * steps` and fail if the endpoints differ by more
    /// than `richardson_tolerance`.
    pub richardson: bool,
    pub richardson_tolerance: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            steps_per_radian: DEFAULT_STEPS_PER_RADIAN,
            richardson: true,
            richardson_tolerance: RICHARDSON_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationReport {
    /// Max component-wise `|Ψ_numeric - Ψ_closed|` over the grid; zero
    /// when no reference was given.
    pub max_component_error: f64,
    pub endpoint_spinor: Spinor,
    pub step: f64,
    pub method_order: u32,
    /// `|Ψ_h(x1) - Ψ_{h/2}(x1)|`, when the check ran.
    pub richardson_difference: Option<f64>,
}

/// Potential on a region that does not contain a wall in its interior.
fn region_potential(params: &WellParams, x0: f64, x1: f64) -> Result<f64> {
    let a = params.width();
    if !(x0 < x1) || !x0.is_finite() || !x1.is_finite() {
        return Err(Error::BadInterval { x0, x1 });
    }
    let crosses = |wall: f64| x0 < wall && wall < x1;
    if crosses(0.0) || crosses(a) {
        return Err(Error::BadInterval { x0, x1 });
    }
    Ok(params.potential(0.5 * (x0 + x1)))
}

fn rhs(mass: f64, local_energy: f64, psi: Spinor) -> Spinor {
    Spinor::new(
        psi.lower * (mass + local_energy),
        psi.upper * (mass - local_energy),
    )
}

fn rk4_step(mass: f64, local_energy: f64, psi: Spinor, h: f64) -> Spinor {
    let k1 = rhs(mass, local_energy, psi);
    let k2 = rhs(mass, local_energy, psi + k1 * (0.5 * h));
    let k3 = rhs(mass, local_energy, psi + k2 * (0.5 * h));
    let k4 = rhs(mass, local_energy, psi + k3 * h);
    psi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn run(
    mass: f64,
    local_energy: f64,
    psi0: Spinor,
    x0: f64,
    x1: f64,
    steps: usize,
    mut observe: impl FnMut(f64, &Spinor),
) -> Spinor {
    let h = (x1 - x0) / steps as f64;
    let mut psi = psi0;
    observe(x0, &psi);
    for i in 0..steps {
        psi = rk4_step(mass, local_energy, psi, h);
        let x = if i + 1 == steps {
            x1
        } else {
            x0 + h * (i + 1) as f64
        };
        observe(x, &psi);
    }
    psi
}

/// Integrates from `x0` to `x1` within one region using default options.
pub fn integrate_dirac(
    energy: f64,
    params: &WellParams,
    psi0: Spinor,
    x0: f64,
    x1: f64,
) -> Result<IntegrationReport> {
    integrate_dirac_with(
        energy,
        params,
        psi0,
        x0,
        x1,
        &IntegrationOptions::default(),
        None,
    )
}

/// Integrates from `x0` to `x1` and, if `reference` is given, tracks the
/// largest deviation from it (evaluated in the piece that owns the
/// interval).
pub fn integrate_dirac_with(
    energy: f64,
    params: &WellParams,
    psi0: Spinor,
    x0: f64,
    x1: f64,
    opts: &IntegrationOptions,
    reference: Option<&Wavefunction>,
) -> Result<IntegrationReport> {
    if !psi0.is_finite() {
        return Err(Error::InvalidArgument(
            "initial spinor is not finite".into(),
        ));
    }
    let local_energy = energy - region_potential(params, x0, x1)?;
    let mass = params.mass();
    let phase = (local_energy * local_energy - mass * mass).abs().sqrt() * (x1 - x0);
    let steps = opts
        .steps
        .max((opts.steps_per_radian * phase).ceil() as usize)
        .max(1);
    let piece = reference.map(|wf| wf.piece_of(0.5 * (x0 + x1)));

    let mut max_error: f64 = 0.0;
    let endpoint = run(mass, local_energy, psi0, x0, x1, steps, |x, psi| {
        if let (Some(wf), Some(piece)) = (reference, piece) {
            max_error = max_error.max(psi.max_abs_diff(&wf.eval_piece(piece, x)));
        }
    });

    let richardson_difference = if opts.richardson {
        let fine = run(mass, local_energy, psi0, x0, x1, 2 * steps, |_, _| {});
        let difference = fine.max_abs_diff(&endpoint);
        if difference > opts.richardson_tolerance {
            return Err(Error::StepTooCoarse {
                difference,
                tolerance: opts.richardson_tolerance,
            });
        }
        Some(difference)
    } else {
        None
    };

    Ok(IntegrationReport {
        max_component_error: max_error,
        endpoint_spinor: endpoint,
        step: (x1 - x0) / steps as f64,
        method_order: 4,
        richardson_difference,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub regions: [IntegrationReport; 3],
    pub max_component_error: f64,
}

/// Integrates across `[-extent, 0]`, `[0, a]`, `[a, a + extent]`, starting
/// from the closed form at `-extent` and feeding each region's numeric
/// endpoint into the next. Compares against `wf` throughout.
pub fn chain_regions(
    wf: &Wavefunction,
    extent: f64,
    opts: &IntegrationOptions,
) -> Result<ChainReport> {
    let params = *wf.params();
    let energy = wf.kinematics().energy;
    let a = params.width();
    let start = wf.eval_piece(Piece::Left, -extent);
    let left = integrate_dirac_with(energy, &params, start, -extent, 0.0, opts, Some(wf))?;
    let inside = integrate_dirac_with(
        energy,
        &params,
        left.endpoint_spinor,
        0.0,
        a,
        opts,
        Some(wf),
    )?;
    let right = integrate_dirac_with(
        energy,
        &params,
        inside.endpoint_spinor,
        a,
        a + extent,
        opts,
        Some(wf),
    )?;
    let max_component_error = left
        .max_component_error
        .max(inside.max_component_error)
        .max(right.max_component_error);
    Ok(ChainReport {
        regions: [left, inside, right],
        max_component_error,
    })
}

/// Integrates each region separately from its own closed-form starting
/// value. Used where the closed form is not continuous across the walls
/// (a bound-type row away from its eigenvalues).
pub fn per_region(
    wf: &Wavefunction,
    extent: f64,
    opts: &IntegrationOptions,
) -> Result<ChainReport> {
    let params = *wf.params();
    let energy = wf.kinematics().energy;
    let a = params.width();
    let mut reports = Vec::with_capacity(3);
    for (piece, x0, x1) in [
        (Piece::Left, -extent, 0.0),
        (Piece::Inside, 0.0, a),
        (Piece::Right, a, a + extent),
    ] {
        let start = wf.eval_piece(piece, x0);
        reports.push(integrate_dirac_with(
            energy,
            &params,
            start,
            x0,
            x1,
            opts,
            Some(wf),
        )?);
    }
    let max_component_error = reports
        .iter()
        .map(|r| r.max_component_error)
        .fold(0.0, f64::max);
    Ok(ChainReport {
        regions: [reports[0], reports[1], reports[2]],
        max_component_error,
    })
}

fn local_energy_of(kind: BasisKind, energy: f64, params: &WellParams) -> f64 {
    match kind.region {
        Region::Outside => energy,
        Region::Inside => energy + params.depth(),
    }
}

/// `|ψ∓ - (m ± ε)⁻¹ dψ±/dx|` for a basis family, where `ε` is the local
/// energy of the family's region. The sign follows the family's arrow:
/// `↑` uses `ψ⁻ = ψ⁺'/(m+ε)`, `↓` uses `ψ⁺ = ψ⁻'/(m-ε)`.
pub fn residual_first_order(
    energy: f64,
    params: &WellParams,
    family: BasisKind,
    x: f64,
) -> Result<f64> {
    let kin = Kinematics::new(energy, params)?;
    let local = local_energy_of(family, energy, params);
    let m = params.mass();
    let psi = family.eval(x, &kin);
    let d = family.derivative(x, &kin);
    Ok(match family.arrow {
        Arrow::Up => (psi.lower - d.upper / (m + local)).norm(),
        Arrow::Down => (psi.upper - d.lower / (m - local)).norm(),
    })
}

/// `max |ψ'' + (ε² - m²) ψ|` over both components.
pub fn residual_second_order(
    energy: f64,
    params: &WellParams,
    family: BasisKind,
    x: f64,
) -> Result<f64> {
    let kin = Kinematics::new(energy, params)?;
    let local = local_energy_of(family, energy, params);
    let m = params.mass();
    let psi = family.eval(x, &kin);
    let dd = family.second_derivative(x, &kin);
    let r = dd + psi * (local * local - m * m);
    Ok(r.upper.norm().max(r.lower.norm()))
}

/// Residual of the first-order system for a basis family with analytic
/// derivatives: `max` over both rows.
pub fn dirac_residual(energy: f64, params: &WellParams, family: BasisKind, x: f64) -> Result<f64> {
    let kin = Kinematics::new(energy, params)?;
    let local = local_energy_of(family, energy, params);
    let m = params.mass();
    let psi = family.eval(x, &kin);
    let d = family.derivative(x, &kin);
    let top = (d.upper - psi.lower * (m + local)).norm();
    let bottom = (d.lower - psi.upper * (m - local)).norm();
    Ok(top.max(bottom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Direction;

    fn params() -> WellParams {
        WellParams::new(1.0, 5.0, 1.0).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let r = integrate_dirac(-2.0, &params(), Spinor::ZERO, 0.0, 1.0).unwrap();
        assert_eq!(r.endpoint_spinor, Spinor::ZERO);
    }

    #[test]
    fn free_plane_wave() {
        let p = params();
        let kin = Kinematics::new(2.0, &p).unwrap();
        let kind = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Up);
        let r = integrate_dirac(2.0, &p, kind.eval(-3.0, &kin), -3.0, -0.5).unwrap();
        assert!(r.endpoint_spinor.max_abs_diff(&kind.eval(-0.5, &kin)) < 1e-8);
        assert_eq!(r.method_order, 4);
    }

    #[test]
    fn wall_crossing_rejected() {
        let p = params();
        let psi = Spinor::real(1.0, 0.0);
        assert!(matches!(
            integrate_dirac(-2.0, &p, psi, -1.0, 0.5),
            Err(Error::BadInterval { .. })
        ));
        assert!(matches!(
            integrate_dirac(-2.0, &p, psi, 0.5, 1.5),
            Err(Error::BadInterval { .. })
        ));
        assert!(matches!(
            integrate_dirac(-2.0, &p, psi, 0.5, 0.5),
            Err(Error::BadInterval { .. })
        ));
    }

    #[test]
    fn coarse_step_detected() {
        let p = params();
        let opts = IntegrationOptions {
            steps: 4,
            steps_per_radian: 0.0,
            ..Default::default()
        };
        let r = integrate_dirac_with(-2.0, &p, Spinor::real(1.0, 0.0), 0.0, 1.0, &opts, None);
        assert!(matches!(r, Err(Error::StepTooCoarse { .. })));
    }

    #[test]
    fn first_order_sign_rule() {
        let p = params();
        let up = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Up);
        let down = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Down);
        assert!(residual_first_order(2.0, &p, up, 0.37).unwrap() < 1e-13);
        assert!(residual_first_order(-2.0, &p, down, 0.37).unwrap() < 1e-13);
        // Positive-energy family at a negative energy.
        assert!(residual_first_order(-2.0, &p, up, 0.37).unwrap() > 0.1);
    }

    #[test]
    fn second_order_evanescent() {
        let p = params();
        let theta = BasisKind::theta(Region::Outside, Direction::Plus, Arrow::Up);
        assert!(residual_second_order(0.5, &p, theta, 0.8).unwrap() < 1e-13);
        assert!(matches!(
            residual_second_order(1.0, &p, theta, 0.8),
            Err(Error::EdgeEnergy { .. })
        ));
    }
}
