use num_complex::Complex64;
use thiserror::Error;

use crate::regime::EnergyRegime;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid well parameters: {0}")]
    InvalidParams(String),

    #[error("energy {energy} lies on a zone edge ({edge})")]
    EdgeEnergy { energy: f64, edge: String },

    #[error(
        "continuity system is singular at E = {energy} (|det| = {det_abs:.3e}, scale {scale:.3e})"
    )]
    SingularMatching {
        energy: f64,
        det_abs: f64,
        scale: f64,
    },

    #[error("no Klein zone (V ≤ 2m): V = {depth}, m = {mass}")]
    NoKleinZone { mass: f64, depth: f64 },

    #[error("solutions are at different energies: {left} vs {right}")]
    MismatchedEnergy { left: f64, right: f64 },

    #[error("operation requires {expected}, got {found:?}")]
    WrongRegime {
        expected: &'static str,
        found: EnergyRegime,
    },

    #[error("no bound state at E = {energy}: determinant {determinant}")]
    NoBoundState { energy: f64, determinant: Complex64 },

    #[error("step too coarse: Richardson difference {difference:.3e} exceeds {tolerance:.3e}")]
    StepTooCoarse { difference: f64, tolerance: f64 },

    #[error("integration interval [{x0}, {x1}] is empty or crosses a wall")]
    BadInterval { x0: f64, x1: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}
