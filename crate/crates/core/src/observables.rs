//! Probability current `J = -i Ψ† σ₃σ₁ Ψ = 2 Im(ψ⁺* ψ⁻)` and the
//! flux-balance / current-quench tests for Klein-zone superpositions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{Incidence, Piece, SolutionSet, Wavefunction};
use crate::spinor::Spinor;
use crate::well::WellParams;

/// Relative tolerance for `|𝔸|² = |𝔹|²`.
pub const FLUX_BALANCE_TOLERANCE: f64 = 1e-10;

/// Default number of samples per region for current profiles.
pub const DEFAULT_SAMPLES_PER_REGION: usize = 1001;

/// `-i Ψ† σ₃σ₁ Ψ` as a complex number; the imaginary part is round-off.
pub fn current_complex(psi: &Spinor) -> Complex64 {
    // σ₃σ₁ = [[0, 1], [-1, 0]]
    let i = Complex64::new(0.0, 1.0);
    -i * (psi.upper.conj() * psi.lower - psi.lower.conj() * psi.upper)
}

pub fn current(psi: &Spinor) -> f64 {
    2.0 * (psi.upper.conj() * psi.lower).im
}

pub fn density(psi: &Spinor) -> f64 {
    psi.norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxBalance {
    /// `|𝔸|²`, flux to the right.
    pub rightward: f64,
    /// `|𝔹|²`, flux to the left.
    pub leftward: f64,
    pub balanced: bool,
}

impl FluxBalance {
    pub fn relative_imbalance(&self) -> f64 {
        let scale = self.rightward.max(self.leftward);
        if scale == 0.0 {
            0.0
        } else {
            (self.rightward - self.leftward).abs() / scale
        }
    }
}

fn require_superposed(sol: &SolutionSet) -> Result<()> {
    if sol.incidence != Incidence::Superposed {
        return Err(Error::WrongRegime {
            expected: "a superposed two-sided solution",
            found: sol.regime,
        });
    }
    Ok(())
}

pub fn flux_balance(sol: &SolutionSet) -> Result<FluxBalance> {
    require_superposed(sol)?;
    let (a, b) = sol.inside_amplitudes();
    let (rightward, leftward) = (a.norm_sqr(), b.norm_sqr());
    let scale = rightward.max(leftward);
    Ok(FluxBalance {
        rightward,
        leftward,
        balanced: (rightward - leftward).abs() <= FLUX_BALANCE_TOLERANCE * scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallCurrents {
    pub at_zero: f64,
    pub at_width: f64,
    /// `max(|𝔸|², |𝔹|²) · 2β/(1+β²)`: the current one inside wave alone
    /// would carry.
    pub scale: f64,
}

impl WallCurrents {
    pub fn max_relative(&self) -> f64 {
        let worst = self.at_zero.abs().max(self.at_width.abs());
        if self.scale == 0.0 {
            worst
        } else {
            worst / self.scale
        }
    }

    pub fn quenched(&self, tolerance: f64) -> bool {
        self.max_relative() <= tolerance
    }
}

/// Current at both walls from the inside expression of a superposition.
pub fn wall_current_quench(sol: &SolutionSet, params: &WellParams) -> Result<WallCurrents> {
    require_superposed(sol)?;
    let wf = &sol.wavefunction;
    let at_zero = current(&wf.eval_piece(Piece::Inside, 0.0));
    let at_width = current(&wf.eval_piece(Piece::Inside, params.width()));
    let (a, b) = sol.inside_amplitudes();
    let beta = wf.kinematics().beta;
    let scale = a.norm_sqr().max(b.norm_sqr()) * 2.0 * beta / (1.0 + beta * beta);
    Ok(WallCurrents {
        at_zero,
        at_width,
        scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentProfile {
    /// `(x, J(x))`, left region, then inside, then right.
    pub samples: Vec<(f64, f64)>,
    /// Mean current in the left, inside and right regions.
    pub piecewise_means: [f64; 3],
    /// Largest deviation from the mean in each region.
    pub piecewise_spread: [f64; 3],
    pub wall_values: (f64, f64),
    /// Largest `|Im(-iΨ†σ₃σ₁Ψ)|` seen.
    pub max_imaginary: f64,
}

/// Samples `J` on `[-extent, 0]`, `[0, a]` and `[a, a + extent]`, with
/// `points` samples per region.
pub fn current_profile(wf: &Wavefunction, extent: f64, points: usize) -> CurrentProfile {
    let a = wf.params().width();
    let points = points.max(2);
    let regions = [
        (Piece::Left, -extent, 0.0),
        (Piece::Inside, 0.0, a),
        (Piece::Right, a, a + extent),
    ];
    let mut samples = Vec::with_capacity(3 * points);
    let mut means = [0.0; 3];
    let mut spread = [0.0; 3];
    let mut max_imaginary: f64 = 0.0;
    for (slot, (piece, lo, hi)) in regions.into_iter().enumerate() {
        let step = (hi - lo) / (points - 1) as f64;
        let values: Vec<(f64, f64)> = (0..points)
            .map(|i| {
                let x = if i == points - 1 {
                    hi
                } else {
                    lo + step * i as f64
                };
                let psi = wf.eval_piece(piece, x);
                let j = current_complex(&psi);
                max_imaginary = max_imaginary.max(j.im.abs());
                (x, j.re)
            })
            .collect();
        let mean = values.iter().map(|v| v.1).sum::<f64>() / points as f64;
        means[slot] = mean;
        spread[slot] = values
            .iter()
            .map(|v| (v.1 - mean).abs())
            .fold(0.0, f64::max);
        samples.extend(values);
    }
    let wall_values = (
        current(&wf.eval_piece(Piece::Inside, 0.0)),
        current(&wf.eval_piece(Piece::Inside, a)),
    );
    CurrentProfile {
        samples,
        piecewise_means: means,
        piecewise_spread: spread,
        wall_values,
        max_imaginary,
    }
}

/// One-sided currents at both walls: `(J(0⁻), J(0⁺), J(a⁻), J(a⁺))`.
pub fn wall_limits(wf: &Wavefunction) -> (f64, f64, f64, f64) {
    let a = wf.params().width();
    (
        current(&wf.eval_piece(Piece::Left, 0.0)),
        current(&wf.eval_piece(Piece::Inside, 0.0)),
        current(&wf.eval_piece(Piece::Inside, a)),
        current(&wf.eval_piece(Piece::Right, a)),
    )
}

/// Composite-Simpson estimate of `∫|Ψ|² dx` over `[x_min, x_max]`, with
/// the walls as break points.
pub fn l2_norm_sqr(wf: &Wavefunction, x_min: f64, x_max: f64, intervals: usize) -> f64 {
    let a = wf.params().width();
    let mut cuts = vec![x_min];
    for wall in [0.0, a] {
        if wall > x_min && wall < x_max {
            cuts.push(wall);
        }
    }
    cuts.push(x_max);
    cuts.windows(2)
        .map(|w| {
            let piece = wf.piece_of(0.5 * (w[0] + w[1]));
            simpson(|x| density(&wf.eval_piece(piece, x)), w[0], w[1], intervals)
        })
        .sum()
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (hi - lo) / n as f64;
    let interior: f64 = (1..n)
        .map(|i| {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            w * f(lo + h * i as f64)
        })
        .sum();
    h / 3.0 * (f(lo) + interior + f(hi))
}

/// Rescales `sol` so that `∫|Ψ|² = 1` over `[x_min, x_max]`.
pub fn l2_normalized(sol: &SolutionSet, x_min: f64, x_max: f64, intervals: usize) -> SolutionSet {
    let norm = l2_norm_sqr(&sol.wavefunction, x_min, x_max, intervals);
    if norm == 0.0 {
        return sol.clone();
    }
    sol.scaled(Complex64::new(1.0 / norm.sqrt(), 0.0))
}
