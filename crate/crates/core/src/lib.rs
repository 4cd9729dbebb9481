//! Complete stationary solution space of the one-dimensional Dirac equation
//! with a square-well vector potential.
//!
//! The well occupies `[0, a]` with potential `-V` inside and zero outside,
//! in natural units (ħ = c = 1). The crate covers
//!
//! - energy-zone classification and the kinematic quantities `k, p, α, β`,
//! - the spinor basis families (oscillatory `φ` and evanescent `θ`),
//! - continuity matching at both walls for every zone, including left and
//!   right incidence and their superposition in the Klein zone,
//! - bound-state spectra (both closed-form Klein branches and the
//!   conventional `|E| < m` states found by root bracketing),
//! - probability currents and flux balance,
//! - an RK4 integrator of the raw first-order system used as an
//!   independent oracle for all of the above.
//!
//! ```
//! use diracwell::{spectrum, Branch, WellParams};
//!
//! let params = WellParams::new(1.0, 5.0, 1.0).unwrap();
//! let states = spectrum::klein_spectrum(&params, Branch::OutsideQuantized).unwrap();
//! let e1 = states[1].energy;
//! assert!((e1 + (1.0 + std::f64::consts::PI.powi(2)).sqrt()).abs() < 1e-12);
//! ```

pub mod basis;
pub mod closed_form;
pub mod error;
pub mod kinematics;
pub mod matching;
pub mod observables;
pub mod oracle;
pub mod regime;
pub mod spectrum;
pub mod spinor;
pub mod table;
pub mod tolerances;
pub mod verify;
pub mod well;

pub use basis::{Arrow, BasisKind, Character, Direction, Propagation, Region};
pub use error::{Error, Result};
pub use kinematics::Kinematics;
pub use matching::{Coef, Incidence, RegimeSolution, SolutionSet, Term, Wavefunction};
pub use regime::{Edge, EnergyRegime};
pub use spectrum::{BoundState, Branch};
pub use spinor::Spinor;
pub use tolerances::Tolerances;
pub use well::WellParams;
