//! Bound-state energies.
//!
//! In the Klein zone the bound-state condition reduces to
//! `cos((p+k)a) = cos((p-k)a)`, i.e. `sin(ka) sin(pa) = 0`, with two
//! closed-form branches:
//!
//! - outside-quantised, `ka = nπ`: `E = -m sqrt(1 + (nπ/ma)²)`, independent
//!   of the depth;
//! - inside-quantised, `pa = nπ`: `E = -V + m sqrt(1 + (nπ/ma)²)`,
//!
//! for `n = 0..=n_max`. The two wall relations `Ψ(a) = ±σ₃Ψ(0)` and
//! `Ψ(a) = ±Ψ(0)` each select one branch.
//!
//! For `|E| < m` there is no closed form; those energies are found by
//! bracketing sign changes of the real homogeneous-system determinant.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::matching::{bound_least_squares, bound_surrogate, solve_regime, Piece, RegimeSolution};
use crate::regime::{classify, EnergyRegime};
use crate::spinor::Spinor;
use crate::well::WellParams;

/// Relative tolerance of the wall-relation checks.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Root-polishing target, relative to the mass.
pub const BISECTION_TOLERANCE: f64 = 1e-12;

/// Two closed-form roots closer than this (relative to the mass) are the
/// same state.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `k a = nπ`
    OutsideQuantized,
    /// `p a = nπ`
    InsideQuantized,
    /// `|E| < m`, from the continuity determinant.
    Conventional,
}

/// Wall relations that single out one Klein branch each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// `Ψ(a) = ±σ₃ Ψ(0)`, sign `(-1)^{n+1}`; selects the outside branch.
    Sigma3,
    /// `Ψ(a) = ±Ψ(0)`; selects the inside branch.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub n: u32,
    pub energy: f64,
    pub branch: Branch,
    /// Sign of the wall relation the state satisfies: `(-1)^{n+1}` for the
    /// outside branch (σ₃ relation), `(-1)^n` for the inside branch (plain
    /// relation), and the measured σ₃ sign for conventional states.
    pub parity: i8,
    pub k: f64,
    pub p: f64,
    /// The energy sits on a zone edge (`n = 0`, or `n = n_max` when the
    /// bound is an integer).
    pub edge: bool,
    /// Set when the other Klein branch has a root at the same energy.
    pub coincident: Option<Branch>,
}

impl BoundState {
    /// Which wall relation selects this state, if any.
    pub fn selected_by(&self) -> Option<BoundaryCondition> {
        match self.branch {
            Branch::OutsideQuantized => Some(BoundaryCondition::Sigma3),
            Branch::InsideQuantized => Some(BoundaryCondition::Plain),
            Branch::Conventional => None,
        }
    }

    fn sigma3_sign(&self) -> f64 {
        match self.branch {
            Branch::Conventional => f64::from(self.parity),
            _ => alternating(self.n + 1),
        }
    }
}

fn alternating(n: u32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn require_klein(energy: f64, params: &WellParams) -> Result<()> {
    match classify(energy, params) {
        EnergyRegime::KleinZone => Ok(()),
        EnergyRegime::Edge(edge) => Err(Error::EdgeEnergy {
            energy,
            edge: edge.to_string(),
        }),
        other => Err(Error::WrongRegime {
            expected: "KleinZone",
            found: other,
        }),
    }
}

/// `cos((p+k)a) - cos((p-k)a)`; zero exactly at the Klein bound states.
pub fn klein_condition(energy: f64, params: &WellParams) -> Result<f64> {
    require_klein(energy, params)?;
    let kin = Kinematics::new(energy, params)?;
    let a = params.width();
    Ok(((kin.p + kin.k) * a).cos() - ((kin.p - kin.k) * a).cos())
}

fn klein_state(params: &WellParams, branch: Branch, n: u32) -> BoundState {
    let (m, v, a) = (params.mass(), params.depth(), params.width());
    let x = f64::from(n) * PI / (m * a);
    let rest = m * (1.0 + x * x).sqrt();
    let (energy, parity) = match branch {
        Branch::OutsideQuantized => (-rest, alternating(n + 1)),
        _ => (-v + rest, alternating(n)),
    };
    let inside = energy + v;
    BoundState {
        n,
        energy,
        branch,
        parity: parity as i8,
        k: (energy * energy - m * m).abs().sqrt(),
        p: (inside * inside - m * m).abs().sqrt(),
        edge: classify(energy, params).is_edge(),
        coincident: None,
    }
}

/// Closed-form Klein-zone states `n = 0..=n_max` of one branch.
pub fn klein_spectrum(params: &WellParams, branch: Branch) -> Result<Vec<BoundState>> {
    if branch == Branch::Conventional {
        return Err(Error::InvalidArgument(
            "klein_spectrum takes a Klein branch".into(),
        ));
    }
    let n_max = params.n_max().ok_or(Error::NoKleinZone {
        mass: params.mass(),
        depth: params.depth(),
    })?;
    Ok((0..=n_max)
        .map(|n| klein_state(params, branch, n))
        .collect())
}

/// Both Klein branches with coincident energies cross-labelled.
pub fn klein_states(params: &WellParams) -> Result<Vec<BoundState>> {
    let mut outside = klein_spectrum(params, Branch::OutsideQuantized)?;
    let mut inside = klein_spectrum(params, Branch::InsideQuantized)?;
    let tol = COINCIDENCE_TOLERANCE * params.mass();
    for o in outside.iter_mut() {
        for i in inside.iter_mut() {
            if (o.energy - i.energy).abs() <= tol {
                o.coincident = Some(Branch::InsideQuantized);
                i.coincident = Some(Branch::OutsideQuantized);
            }
        }
    }
    outside.extend(inside);
    Ok(outside)
}

/// Bisects `f` on `[lo, hi]` (opposite signs at the ends) down to `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign changes of `f` on the open interval `(lo, hi)` sampled at
/// `points` interior grid points, each polished by bisection.
fn scan_roots(
    f: impl Fn(f64) -> Option<f64>,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Vec<f64> {
    let n = points.max(2) + 1;
    let step = (hi - lo) / n as f64;
    let grid: Vec<(f64, f64)> = (1..n)
        .filter_map(|i| {
            let e = lo + step * i as f64;
            f(e).map(|v| (e, v))
        })
        .collect();
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let ((e0, f0), (e1, f1)) = (w[0], w[1]);
        if f0 == 0.0 {
            roots.push(e0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            roots.push(bisect(|e| f(e).unwrap_or(f64::NAN), e0, e1, tol));
        }
    }
    if let Some(&(e, v)) = grid.last() {
        if v == 0.0 {
            roots.push(e);
        }
    }
    roots
}

/// Zeros of [`klein_condition`] in the open Klein zone, found by a dense
/// sign-change scan. Double roots (coincident branches) do not change
/// sign and are not reported.
pub fn scan_klein_roots(params: &WellParams, points: usize) -> Result<Vec<f64>> {
    let (lo, hi) = params.klein_zone().ok_or(Error::NoKleinZone {
        mass: params.mass(),
        depth: params.depth(),
    })?;
    let tol = BISECTION_TOLERANCE * params.mass();
    Ok(scan_roots(
        |e| klein_condition(e, params).ok(),
        lo,
        hi,
        points,
        tol,
    ))
}

/// Grid size that resolves both Klein branches: a few hundred points per
/// expected root.
pub fn default_klein_points(params: &WellParams) -> usize {
    let n = params.n_max().unwrap_or(0) as usize;
    (400 * (2 * n + 2)).max(4000)
}

/// Checks a wall relation on the solution at `state.energy`.
pub fn verify_boundary_condition(
    state: &BoundState,
    params: &WellParams,
    which: BoundaryCondition,
) -> bool {
    let Ok(RegimeSolution::Solved(sol)) = solve_regime(state.energy, params) else {
        return false;
    };
    let wf = &sol.wavefunction;
    let psi0 = wf.eval_piece(Piece::Inside, 0.0);
    let psia = wf.eval_piece(Piece::Inside, params.width());
    let scale = psi0.norm().max(psia.norm());
    if scale == 0.0 {
        return false;
    }
    let holds = |target: Spinor| psia.max_abs_diff(&target) <= BOUNDARY_TOLERANCE * scale;
    match which {
        BoundaryCondition::Sigma3 => holds(psi0.sigma3() * state.sigma3_sign()),
        BoundaryCondition::Plain => holds(psi0) || holds(-psi0),
    }
}

/// Energies in `(-m, m)` (and above the well floor `m - V`) at which the
/// homogeneous continuity system is singular.
pub fn conventional_spectrum(params: &WellParams) -> Vec<BoundState> {
    let (m, v, a) = (params.mass(), params.depth(), params.width());
    let lo = (-m).max(m - v);
    let hi = m;
    if lo >= hi {
        return Vec::new();
    }
    let pa_max = ((m + v).powi(2) - m * m).sqrt() * a;
    let points = ((20.0 * (1.0 + pa_max / PI)).ceil() as usize).max(400);
    let roots = scan_roots(
        |e| bound_surrogate(e, params).ok(),
        lo,
        hi,
        points,
        BISECTION_TOLERANCE * m,
    );
    roots
        .into_iter()
        .filter_map(|energy| {
            let sol = bound_least_squares(energy, params).ok()?;
            if sol.residual >= crate::matching::BOUND_RESIDUAL_TOLERANCE {
                return None;
            }
            let wf = &sol.wavefunction;
            let psi0 = wf.eval_piece(Piece::Inside, 0.0);
            let psia = wf.eval_piece(Piece::Inside, a);
            let plus = psia.max_abs_diff(&psi0.sigma3());
            let minus = psia.max_abs_diff(&-psi0.sigma3());
            let kin = Kinematics::unchecked(energy, params);
            Some(BoundState {
                n: 0,
                energy,
                branch: Branch::Conventional,
                parity: if plus <= minus { 1 } else { -1 },
                k: kin.k,
                p: kin.p,
                edge: classify(energy, params).is_edge(),
                coincident: None,
            })
        })
        .enumerate()
        .map(|(n, state)| BoundState {
            n: n as u32,
            ..state
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonRelativistic {
    pub n: u32,
    /// `|E_n| - m` for the outside-quantised state.
    pub binding: f64,
    /// `n²π²/(2ma²)`
    pub nonrelativistic: f64,
    pub rel_error: f64,
}

/// Compares the outside-quantised level `n` with the particle-in-a-box
/// level `n²π²/(2ma²)`.
pub fn nonrelativistic_limit(params: &WellParams, n: u32) -> Result<NonRelativistic> {
    let n_max = params.n_max().ok_or(Error::NoKleinZone {
        mass: params.mass(),
        depth: params.depth(),
    })?;
    if n > n_max {
        return Err(Error::InvalidArgument(format!(
            "level {n} exceeds n_max = {n_max}"
        )));
    }
    let (m, a) = (params.mass(), params.width());
    let x = f64::from(n) * PI / (m * a);
    // m (sqrt(1+x²) - 1) without the cancellation.
    let binding = m * x * x / ((1.0 + x * x).sqrt() + 1.0);
    let nonrelativistic = f64::from(n * n) * PI * PI / (2.0 * m * a * a);
    let rel_error = if nonrelativistic == 0.0 {
        binding.abs()
    } else {
        (binding - nonrelativistic).abs() / nonrelativistic
    };
    Ok(NonRelativistic {
        n,
        binding,
        nonrelativistic,
        rel_error,
    })
}

/// All bound states: both Klein branches (when `V > 2m`) and the
/// conventional ones, each sorted by energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub n_max: Option<u32>,
    pub klein: Vec<BoundState>,
    pub conventional: Vec<BoundState>,
}

pub fn full_spectrum(params: &WellParams) -> Spectrum {
    let mut klein = klein_states(params).unwrap_or_default();
    klein.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Spectrum {
        n_max: params.n_max(),
        klein,
        conventional: conventional_spectrum(params),
    }
}
