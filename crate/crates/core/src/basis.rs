//! Spinor basis families.
//!
//! Each family is a normalised column times an exponential:
//!
//! ```text
//! φ_{±↑} = (1, ±i r) e^{±iqx} / sqrt(1+r²)     θ_{±↑} = (1, ±r) e^{±qx} / sqrt(1+r²)
//! φ_{±↓} = (±i r, 1) e^{±iqx} / sqrt(1+r²)     θ_{±↓} = (±r, 1) e^{±qx} / sqrt(1+r²)
//! ```
//!
//! with `(q, r) = (k, α)` outside the well and `(p, β)` inside. The arrow
//! must match the sign of the local energy for the family to solve the
//! Dirac equation.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::kinematics::Kinematics;
use crate::spinor::Spinor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Inside,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Character {
    /// `φ`, complex exponential.
    Oscillatory,
    /// `θ`, real exponential.
    Evanescent,
}

/// The `±` subscript: sign of the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Plus => Direction::Minus,
            Direction::Minus => Direction::Plus,
        }
    }
}

/// Positive (`Up`) or negative (`Down`) energy family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arrow {
    Up,
    Down,
}

impl Arrow {
    /// `Up` for `E ≥ 0`.
    pub fn of_energy(energy: f64) -> Self {
        if energy >= 0.0 {
            Arrow::Up
        } else {
            Arrow::Down
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    PlusX,
    MinusX,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisKind {
    pub region: Region,
    pub character: Character,
    pub direction: Direction,
    pub arrow: Arrow,
}

impl BasisKind {
    pub const fn new(
        region: Region,
        character: Character,
        direction: Direction,
        arrow: Arrow,
    ) -> Self {
        Self {
            region,
            character,
            direction,
            arrow,
        }
    }

    pub const fn phi(region: Region, direction: Direction, arrow: Arrow) -> Self {
        Self::new(region, Character::Oscillatory, direction, arrow)
    }

    pub const fn theta(region: Region, direction: Direction, arrow: Arrow) -> Self {
        Self::new(region, Character::Evanescent, direction, arrow)
    }

    /// Same family with the opposite exponent sign.
    pub fn reversed(self) -> Self {
        Self {
            direction: self.direction.flip(),
            ..self
        }
    }

    /// Travel direction of an oscillatory family: a positive-energy wave
    /// `e^{±iqx}` moves towards `±x`, a negative-energy one towards `∓x`.
    pub fn propagation(self) -> Propagation {
        if self.character == Character::Evanescent {
            return Propagation::None;
        }
        match (self.arrow, self.direction) {
            (Arrow::Up, Direction::Plus) | (Arrow::Down, Direction::Minus) => Propagation::PlusX,
            (Arrow::Up, Direction::Minus) | (Arrow::Down, Direction::Plus) => Propagation::MinusX,
        }
    }

    /// Wave number and spinor ratio for this family's region.
    fn scales(self, kin: &Kinematics) -> (f64, f64) {
        match self.region {
            Region::Outside => (kin.k, kin.alpha),
            Region::Inside => (kin.p, kin.beta),
        }
    }

    /// Multiplier `λ` with `d/dx basis = λ · basis`.
    pub fn growth_rate(self, kin: &Kinematics) -> Complex64 {
        let (q, _) = self.scales(kin);
        let s = self.direction.sign();
        match self.character {
            Character::Oscillatory => Complex64::new(0.0, s * q),
            Character::Evanescent => Complex64::new(s * q, 0.0),
        }
    }

    /// The position-independent column, normalised to unit length.
    pub fn column(self, kin: &Kinematics) -> Spinor {
        let (_, r) = self.scales(kin);
        self.column_with_ratio(r)
    }

    pub(crate) fn column_with_ratio(self, r: f64) -> Spinor {
        let s = self.direction.sign();
        let norm = 1.0 / (1.0 + r * r).sqrt();
        let off = match self.character {
            Character::Oscillatory => Complex64::new(0.0, s * r),
            Character::Evanescent => Complex64::new(s * r, 0.0),
        };
        let one = Complex64::new(1.0, 0.0);
        let column = match self.arrow {
            Arrow::Up => Spinor::new(one, off),
            Arrow::Down => Spinor::new(off, one),
        };
        column * norm
    }

    /// Evaluates the family at `x`.
    pub fn eval(self, x: f64, kin: &Kinematics) -> Spinor {
        basis_spinor(self, x, kin)
    }

    /// Analytic first derivative at `x`.
    pub fn derivative(self, x: f64, kin: &Kinematics) -> Spinor {
        basis_spinor(self, x, kin) * self.growth_rate(kin)
    }

    /// Analytic second derivative at `x`.
    pub fn second_derivative(self, x: f64, kin: &Kinematics) -> Spinor {
        let rate = self.growth_rate(kin);
        basis_spinor(self, x, kin) * (rate * rate)
    }
}

impl fmt::Display for BasisKind {
    /// Renders e.g. `φ⁻₊↑` (superscript: `⁺` inside, `⁻` outside).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbol = match self.character {
            Character::Oscillatory => 'φ',
            Character::Evanescent => 'θ',
        };
        let region = match self.region {
            Region::Inside => '⁺',
            Region::Outside => '⁻',
        };
        let sign = match self.direction {
            Direction::Plus => '₊',
            Direction::Minus => '₋',
        };
        let arrow = match self.arrow {
            Arrow::Up => '↑',
            Arrow::Down => '↓',
        };
        write!(f, "{symbol}{region}{sign}{arrow}")
    }
}

/// Evaluates basis family `kind` at position `x`.
///
/// The caller is responsible for using the family in its own region.
pub fn basis_spinor(kind: BasisKind, x: f64, kin: &Kinematics) -> Spinor {
    kind.column(kin) * (kind.growth_rate(kin) * x).exp()
}

/// Propagation direction of a basis family.
pub fn phase_velocity_direction(kind: BasisKind) -> Propagation {
    kind.propagation()
}
