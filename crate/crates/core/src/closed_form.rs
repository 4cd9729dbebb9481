//! Closed-form Klein-zone amplitudes.
//!
//! With `r = (αβ - 1)/(αβ + 1)` and `Δ = e^{2ipa} r² - 1`:
//!
//! ```text
//! A = 2iα/(αβ+1) · sqrt((1+β²)/(1+α²)) / Δ         B = r e^{2ipa} A
//! B̂ = -2iα/(αβ+1) · sqrt((1+β²)/(1+α²)) e^{i(k+p)a} / Δ    Â = r B̂
//! ```
//!
//! These are kept independent of [`crate::matching`], which solves the
//! continuity system generically; the two are compared in tests and by
//! the verification battery.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::regime::{classify, EnergyRegime};
use crate::well::WellParams;

/// `|Δ|` below this is reported rather than divided through.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KleinAmplitudes {
    /// Coefficient of the right-moving inside family.
    pub plus: Complex64,
    /// Coefficient of the left-moving inside family.
    pub minus: Complex64,
}

struct Shared {
    kin: Kinematics,
    ratio: f64,
    prefactor: Complex64,
    phase_2pa: Complex64,
}

fn shared(energy: f64, params: &WellParams) -> Result<Shared> {
    let kin = Kinematics::new(energy, params)?;
    let regime = classify(energy, params);
    if regime != EnergyRegime::KleinZone {
        return Err(Error::WrongRegime {
            expected: "KleinZone",
            found: regime,
        });
    }
    let (alpha, beta) = (kin.alpha, kin.beta);
    let ab = alpha * beta;
    let ratio = (ab - 1.0) / (ab + 1.0);
    let phase_2pa = Complex64::from_polar(1.0, 2.0 * kin.p * params.width());
    let denominator = phase_2pa * ratio * ratio - 1.0;
    if denominator.norm() < DENOMINATOR_TOLERANCE {
        return Err(Error::SingularMatching {
            energy,
            det_abs: denominator.norm(),
            scale: 1.0,
        });
    }
    let norm = ((1.0 + beta * beta) / (1.0 + alpha * alpha)).sqrt();
    let prefactor = Complex64::new(0.0, 2.0 * alpha / (ab + 1.0) * norm) / denominator;
    Ok(Shared {
        kin,
        ratio,
        prefactor,
        phase_2pa,
    })
}

/// `(A, B)` for a unit beam incident from the left.
pub fn left_incidence(energy: f64, params: &WellParams) -> Result<KleinAmplitudes> {
    let s = shared(energy, params)?;
    let plus = s.prefactor;
    Ok(KleinAmplitudes {
        plus,
        minus: s.phase_2pa * s.ratio * plus,
    })
}

/// `(Â, B̂)` for a unit beam incident from the right.
pub fn right_incidence(energy: f64, params: &WellParams) -> Result<KleinAmplitudes> {
    let s = shared(energy, params)?;
    let phase = Complex64::from_polar(1.0, (s.kin.k + s.kin.p) * params.width());
    let minus = -s.prefactor * phase;
    Ok(KleinAmplitudes {
        plus: s.ratio * minus,
        minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_of_right_amplitudes() {
        let params = WellParams::new(1.0, 5.0, 1.0).unwrap();
        let amp = right_incidence(-2.0, &params).unwrap();
        let ratio = amp.plus / amp.minus;
        assert!((ratio.re + (7.0 - 2.0 * 6f64.sqrt()) / 5.0).abs() < 1e-12);
        assert!(ratio.im.abs() < 1e-15);
    }

    #[test]
    fn outside_klein_zone_rejected() {
        let params = WellParams::new(1.0, 5.0, 1.0).unwrap();
        assert!(matches!(
            left_incidence(2.0, &params),
            Err(Error::WrongRegime { .. })
        ));
    }
}
