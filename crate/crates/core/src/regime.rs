//! Energy-zone classification.
//!
//! For `V > 2m` the real line splits into seven open intervals, each with
//! its own combination of oscillatory/evanescent behaviour outside and
//! inside the well. Shallower wells (`V ≤ 2m`) additionally produce
//! windows where the solution is evanescent on both sides; those are
//! tagged [`EnergyRegime::Gap`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::well::WellParams;

/// The six energies where the character of the solution changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Edge {
    /// `E = +m`
    PlusMass,
    /// `E = 0`
    Zero,
    /// `E = -m`
    MinusMass,
    /// `E = -V + m`
    KleinFloor,
    /// `E = -V`
    WellBottom,
    /// `E = -V - m`
    BelowWell,
}

impl Edge {
    pub const ALL: [Edge; 6] = [
        Edge::PlusMass,
        Edge::Zero,
        Edge::MinusMass,
        Edge::KleinFloor,
        Edge::WellBottom,
        Edge::BelowWell,
    ];

    pub fn energy(self, params: &WellParams) -> f64 {
        let (m, v) = (params.mass(), params.depth());
        match self {
            Edge::PlusMass => m,
            Edge::Zero => 0.0,
            Edge::MinusMass => -m,
            Edge::KleinFloor => -v + m,
            Edge::WellBottom => -v,
            Edge::BelowWell => -v - m,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Edge::PlusMass => "+m",
            Edge::Zero => "0",
            Edge::MinusMass => "-m",
            Edge::KleinFloor => "-V+m",
            Edge::WellBottom => "-V",
            Edge::BelowWell => "-V-m",
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergyRegime {
    /// `E > +m`
    ScatterAbove,
    /// `+m > E > 0`
    BoundUpper,
    /// `0 > E > -m`
    BoundLower,
    /// `-m > E > -V + m`
    KleinZone,
    /// `-V + m > E > -V`
    EvanescentInside,
    /// `-V > E > -V - m`
    EvanescentInsideLower,
    /// `E < -V - m`
    ScatterBelow,
    /// Evanescent both inside and outside; only occurs for `V ≤ 2m`.
    Gap,
    Edge(Edge),
}

impl EnergyRegime {
    /// The seven open intervals in descending energy order.
    pub const ROWS: [EnergyRegime; 7] = [
        EnergyRegime::ScatterAbove,
        EnergyRegime::BoundUpper,
        EnergyRegime::BoundLower,
        EnergyRegime::KleinZone,
        EnergyRegime::EvanescentInside,
        EnergyRegime::EvanescentInsideLower,
        EnergyRegime::ScatterBelow,
    ];

    /// One-based row index in the solution table, `None` for `Gap`/`Edge`.
    pub fn row(self) -> Option<u8> {
        Self::ROWS
            .iter()
            .position(|r| *r == self)
            .map(|i| i as u8 + 1)
    }

    pub fn from_row(row: u8) -> Option<Self> {
        Self::ROWS.get(usize::from(row).checked_sub(1)?).copied()
    }

    pub fn is_edge(self) -> bool {
        matches!(self, EnergyRegime::Edge(_))
    }

    /// Rows whose outside solution is a pair of travelling waves on both
    /// sides, so left and right incidence can be superposed.
    pub fn is_two_sided(self) -> bool {
        matches!(
            self,
            EnergyRegime::KleinZone
                | EnergyRegime::EvanescentInside
                | EnergyRegime::EvanescentInsideLower
                | EnergyRegime::ScatterBelow
        )
    }

    /// Rows with oscillatory waves outside the well.
    pub fn is_scattering(self) -> bool {
        self == EnergyRegime::ScatterAbove || self.is_two_sided()
    }

    /// Rows with decaying tails on both sides (quantised energies only).
    pub fn is_bound_type(self) -> bool {
        matches!(
            self,
            EnergyRegime::BoundUpper | EnergyRegime::BoundLower | EnergyRegime::Gap
        )
    }

    /// Interval in the `V > 2m` ordering; open ends are `±∞`.
    pub fn interval(self, params: &WellParams) -> Option<(f64, f64)> {
        let e = |edge: Edge| edge.energy(params);
        let bounds = match self {
            EnergyRegime::ScatterAbove => (e(Edge::PlusMass), f64::INFINITY),
            EnergyRegime::BoundUpper => (e(Edge::Zero), e(Edge::PlusMass)),
            EnergyRegime::BoundLower => (e(Edge::MinusMass), e(Edge::Zero)),
            EnergyRegime::KleinZone => (e(Edge::KleinFloor), e(Edge::MinusMass)),
            EnergyRegime::EvanescentInside => (e(Edge::WellBottom), e(Edge::KleinFloor)),
            EnergyRegime::EvanescentInsideLower => (e(Edge::BelowWell), e(Edge::WellBottom)),
            EnergyRegime::ScatterBelow => (f64::NEG_INFINITY, e(Edge::BelowWell)),
            EnergyRegime::Gap | EnergyRegime::Edge(_) => return None,
        };
        Some(bounds)
    }
}

impl fmt::Display for EnergyRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyRegime::Edge(edge) => write!(f, "Edge({edge})"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Returns the edge `energy` sits on, if any, within the edge tolerance.
pub fn edge_at(energy: f64, params: &WellParams) -> Option<Edge> {
    let tol = params.edge_tolerance();
    Edge::ALL
        .into_iter()
        .find(|edge| (energy - edge.energy(params)).abs() <= tol)
}

/// Classifies `energy` into its zone. Total: every finite energy maps to
/// exactly one tag.
pub fn classify(energy: f64, params: &WellParams) -> EnergyRegime {
    if let Some(edge) = edge_at(energy, params) {
        return EnergyRegime::Edge(edge);
    }
    let m = params.mass();
    let local_inside = energy + params.depth();
    let osc_outside = energy.abs() > m;
    let osc_inside = local_inside.abs() > m;
    let up_outside = energy > 0.0;
    let up_inside = local_inside > 0.0;

    match (osc_outside, up_outside, osc_inside, up_inside) {
        (true, true, _, _) => EnergyRegime::ScatterAbove,
        (false, true, true, _) => EnergyRegime::BoundUpper,
        (false, false, true, _) => EnergyRegime::BoundLower,
        (true, false, true, true) => EnergyRegime::KleinZone,
        (true, false, false, true) => EnergyRegime::EvanescentInside,
        (true, false, false, false) => EnergyRegime::EvanescentInsideLower,
        (true, false, true, false) => EnergyRegime::ScatterBelow,
        (false, _, false, _) => EnergyRegime::Gap,
    }
}
