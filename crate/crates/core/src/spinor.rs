use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Two-component spinor `(ψ⁺, ψ⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Spinor {
    pub upper: Complex64,
    pub lower: Complex64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        upper: Complex64::new(0.0, 0.0),
        lower: Complex64::new(0.0, 0.0),
    };

    pub fn new(upper: Complex64, lower: Complex64) -> Self {
        Self { upper, lower }
    }

    pub fn real(upper: f64, lower: f64) -> Self {
        Self::new(Complex64::new(upper, 0.0), Complex64::new(lower, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `σ₃ ψ = (ψ⁺, -ψ⁻)`.
    pub fn sigma3(&self) -> Self {
        Self::new(self.upper, -self.lower)
    }

    /// Largest component-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Spinor) -> f64 {
        (self.upper - other.upper)
            .norm()
            .max((self.lower - other.lower).norm())
    }

    pub fn is_finite(&self) -> bool {
        self.upper.is_finite() && self.lower.is_finite()
    }

    pub fn components(&self) -> [Complex64; 2] {
        [self.upper, self.lower]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.upper + rhs.upper, self.lower + rhs.lower)
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, rhs: Spinor) {
        self.upper += rhs.upper;
        self.lower += rhs.lower;
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.upper - rhs.upper, self.lower - rhs.lower)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.upper, -self.lower)
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: Complex64) -> Spinor {
        Spinor::new(self.upper * rhs, self.lower * rhs)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: f64) -> Spinor {
        Spinor::new(self.upper * rhs, self.lower * rhs)
    }
}
