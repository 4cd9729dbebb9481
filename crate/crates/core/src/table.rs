//! Whole-table queries: one energy at a time, or a uniform sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::matching::{
    bound_least_squares, bound_surrogate, solve_left_incidence, solve_regime,
    solve_right_incidence, Ansatz, RegimeSolution, SolutionSet,
};
use crate::regime::{classify, edge_at, EnergyRegime};
use crate::spectrum::klein_condition;
use crate::well::WellParams;

#[derive(Debug, Clone, PartialEq)]
pub struct FullSolution {
    pub regime: EnergyRegime,
    pub ansatz: String,
    /// The row solution: left incidence above `+m`, the bound-type result
    /// for `|E| < m`, the superposition below `-m`.
    pub primary: RegimeSolution,
    /// Left- and right-incidence parts of a two-sided row.
    pub left: Option<SolutionSet>,
    pub right: Option<SolutionSet>,
}

/// Ansatz text for the row containing `energy`.
pub fn ansatz_for(energy: f64, params: &WellParams) -> Result<(EnergyRegime, String)> {
    let regime = classify(energy, params);
    if let EnergyRegime::Edge(edge) = regime {
        return Err(Error::EdgeEnergy {
            energy,
            edge: edge.to_string(),
        });
    }
    let kin = Kinematics::new(energy, params)?;
    let ansatz = Ansatz::from_kinematics(&kin, params);
    Ok((regime, ansatz.describe(regime.is_two_sided())))
}

pub fn full_solution(energy: f64, params: &WellParams) -> Result<FullSolution> {
    let (regime, ansatz) = ansatz_for(energy, params)?;
    let primary = solve_regime(energy, params)?;
    let (left, right) = if regime.is_two_sided() {
        (
            Some(solve_left_incidence(energy, params)?),
            Some(solve_right_incidence(energy, params)?),
        )
    } else {
        (None, None)
    };
    Ok(FullSolution {
        regime,
        ansatz,
        primary,
        left,
        right,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
    /// Keep grid points that land on an edge instead of nudging them.
    pub include_edges: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nudge {
    pub index: usize,
    pub requested: f64,
    pub sampled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    #[serde(flatten)]
    pub spec: SweepSpec,
    pub step: f64,
    /// Grid points moved by half a step off an edge.
    pub nudged: Vec<Nudge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub energy: f64,
    pub regime: EnergyRegime,
    pub row: Option<u8>,
    /// `|R|²` for left incidence.
    pub reflection: Option<f64>,
    /// `|T|²` for left incidence.
    pub transmission: Option<f64>,
    pub unitarity_sum: Option<f64>,
    /// `|𝔸|²` of the superposition.
    pub flux_right: Option<f64>,
    /// `|𝔹|²` of the superposition.
    pub flux_left: Option<f64>,
    pub klein_condition: Option<f64>,
    /// `|det|` of the continuity matrix.
    pub determinant_abs: Option<f64>,
    /// Real determinant used for bound-state bracketing (`|E| < m`).
    pub bound_determinant: Option<f64>,
    pub note: Option<String>,
}

impl SweepPoint {
    fn empty(energy: f64, regime: EnergyRegime) -> Self {
        Self {
            energy,
            regime,
            row: regime.row(),
            reflection: None,
            transmission: None,
            unitarity_sum: None,
            flux_right: None,
            flux_left: None,
            klein_condition: None,
            determinant_abs: None,
            bound_determinant: None,
            note: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub params: WellParams,
    pub grid: GridInfo,
    pub points: Vec<SweepPoint>,
}

/// Per-energy summary used by sweeps and the `scatter` command.
pub fn sample_point(energy: f64, params: &WellParams) -> SweepPoint {
    let regime = classify(energy, params);
    let mut point = SweepPoint::empty(energy, regime);
    if regime.is_edge() {
        point.note = Some("edge energy".into());
        return point;
    }
    if regime.is_scattering() {
        match solve_left_incidence(energy, params) {
            Ok(sol) => {
                point.reflection = sol.reflection();
                point.transmission = sol.transmission();
                point.unitarity_sum = sol.unitarity_sum();
                point.determinant_abs = Some(sol.determinant.norm());
            }
            Err(e) => point.note = Some(e.to_string()),
        }
        if regime.is_two_sided() {
            match solve_regime(energy, params).and_then(RegimeSolution::into_solution) {
                Ok(sup) => {
                    let (a, b) = sup.inside_amplitudes();
                    point.flux_right = Some(a.norm_sqr());
                    point.flux_left = Some(b.norm_sqr());
                }
                Err(e) => point.note = Some(e.to_string()),
            }
        }
        if regime == EnergyRegime::KleinZone {
            point.klein_condition = klein_condition(energy, params).ok();
        }
    } else {
        if let Ok(sol) = bound_least_squares(energy, params) {
            point.determinant_abs = Some(sol.determinant.norm());
        }
        point.bound_determinant = bound_surrogate(energy, params).ok();
    }
    point
}

/// Samples `n_points` uniformly spaced energies on `[e_min, e_max]`.
///
/// Unless `include_edges` is set, a grid point on an edge is moved half a
/// step inward (towards larger energy, or smaller for the last point) and
/// recorded in [`GridInfo::nudged`].
pub fn sweep(params: &WellParams, spec: SweepSpec) -> Result<SweepResult> {
    if !(spec.e_min < spec.e_max) || !spec.e_min.is_finite() || !spec.e_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sweep needs e_min < e_max, got [{}, {}]",
            spec.e_min, spec.e_max
        )));
    }
    if spec.n_points < 2 {
        return Err(Error::InvalidArgument(
            "sweep needs at least 2 points".into(),
        ));
    }
    let step = (spec.e_max - spec.e_min) / (spec.n_points - 1) as f64;
    let mut nudged = Vec::new();
    let energies: Vec<f64> = (0..spec.n_points)
        .map(|i| {
            let requested = if i + 1 == spec.n_points {
                spec.e_max
            } else {
                spec.e_min + step * i as f64
            };
            if spec.include_edges || edge_at(requested, params).is_none() {
                return requested;
            }
            let sampled = if i + 1 == spec.n_points {
                requested - 0.5 * step
            } else {
                requested + 0.5 * step
            };
            nudged.push(Nudge {
                index: i,
                requested,
                sampled,
            });
            sampled
        })
        .collect();
    let points = energies.iter().map(|&e| sample_point(e, params)).collect();
    Ok(SweepResult {
        params: *params,
        grid: GridInfo { spec, step, nudged },
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> WellParams {
        WellParams::new(1.0, 5.0, 1.0).unwrap()
    }

    #[test]
    fn two_point_sweep() {
        let r = sweep(
            &params(),
            SweepSpec {
                e_min: 2.0,
                e_max: 3.0,
                n_points: 2,
                include_edges: false,
            },
        )
        .unwrap();
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.points[0].energy, 2.0);
        assert_eq!(r.points[1].energy, 3.0);
    }

    #[test]
    fn endpoints_on_edges_are_nudged() {
        let r = sweep(
            &params(),
            SweepSpec {
                e_min: -4.0,
                e_max: -1.0,
                n_points: 31,
                include_edges: false,
            },
        )
        .unwrap();
        assert_eq!(r.grid.nudged.len(), 2);
        assert!((r.points[0].energy + 3.95).abs() < 1e-12);
        assert!((r.points[30].energy + 1.05).abs() < 1e-12);
        assert!(r.points.iter().all(|p| !p.regime.is_edge()));
        assert!(r.points.windows(2).all(|w| w[0].energy < w[1].energy));
    }

    #[test]
    fn edges_kept_on_request() {
        let r = sweep(
            &params(),
            SweepSpec {
                e_min: -4.0,
                e_max: -1.0,
                n_points: 4,
                include_edges: true,
            },
        )
        .unwrap();
        assert!(r.points[0].regime.is_edge());
        assert!(r.grid.nudged.is_empty());
    }

    #[test]
    fn invalid_specs() {
        let bad = |e_min, e_max, n_points| {
            sweep(
                &params(),
                SweepSpec {
                    e_min,
                    e_max,
                    n_points,
                    include_edges: false,
                },
            )
            .is_err()
        };
        assert!(bad(1.0, 1.0, 10));
        assert!(bad(2.0, 1.0, 10));
        assert!(bad(1.0, 2.0, 1));
    }

    #[test]
    fn row_seven_full_solution() {
        let full = full_solution(-6.5, &params()).unwrap();
        assert_eq!(full.regime, EnergyRegime::ScatterBelow);
        assert!(full.ansatz.contains("𝔸φ⁺₊↓+𝔹φ⁺₋↓"), "{}", full.ansatz);
        assert!(full.left.is_some() && full.right.is_some());
    }
}
