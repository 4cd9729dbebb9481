//! Continuity matching at the two walls.
//!
//! Every row of the solution table is solved as one 4×4 complex linear
//! system in the unknowns `[left piece, A, B, right piece]`: two spinor
//! equations at `x = 0` and two at `x = a`. Scattering rows carry a unit
//! incident amplitude on the right-hand side; bound-type rows are
//! homogeneous and only admit a nontrivial solution where the determinant
//! vanishes.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{Arrow, BasisKind, Character, Direction, Region};
use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::regime::{classify, EnergyRegime};
use crate::spinor::Spinor;
use crate::well::WellParams;

/// `|det| ≤ SINGULAR_TOLERANCE · Π‖column‖` is reported as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Relative least-squares residual below which a homogeneous row counts as
/// a bound state.
pub const BOUND_RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Relative tolerance for two solutions to count as the same energy.
pub const ENERGY_MATCH_TOLERANCE: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Coef {
    R,
    T,
    A,
    B,
    C,
    D,
    #[serde(rename = "R_hat")]
    RHat,
    #[serde(rename = "T_hat")]
    THat,
    #[serde(rename = "A_hat")]
    AHat,
    #[serde(rename = "B_hat")]
    BHat,
    /// `𝔸 = A + Â`
    #[serde(rename = "A_total")]
    ATotal,
    /// `𝔹 = B + B̂`
    #[serde(rename = "B_total")]
    BTotal,
}

impl Coef {
    /// ASCII name, as used in serialized output.
    pub fn name(self) -> &'static str {
        match self {
            Coef::R => "R",
            Coef::T => "T",
            Coef::A => "A",
            Coef::B => "B",
            Coef::C => "C",
            Coef::D => "D",
            Coef::RHat => "R_hat",
            Coef::THat => "T_hat",
            Coef::AHat => "A_hat",
            Coef::BHat => "B_hat",
            Coef::ATotal => "A_total",
            Coef::BTotal => "B_total",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Coef::R => "R",
            Coef::T => "T",
            Coef::A => "A",
            Coef::B => "B",
            Coef::C => "C",
            Coef::D => "D",
            Coef::RHat => "R̂",
            Coef::THat => "T̂",
            Coef::AHat => "Â",
            Coef::BHat => "B̂",
            Coef::ATotal => "𝔸",
            Coef::BTotal => "𝔹",
        }
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Incidence {
    /// Unit-amplitude beam arriving from `x < 0`.
    Left,
    /// Unit-amplitude beam arriving from `x > a`.
    Right,
    /// Sum of a left- and a right-incidence solution.
    Superposed,
    /// Homogeneous solution with decaying tails on both sides.
    Bound,
}

/// One term `amplitude · basis(x)` of a piecewise wavefunction. `coef` is
/// `None` for the fixed incident wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: Option<Coef>,
    pub amplitude: Complex64,
    pub kind: BasisKind,
}

impl Term {
    fn eval(&self, x: f64, kin: &Kinematics) -> Spinor {
        self.kind.eval(x, kin) * self.amplitude
    }

    fn derivative(&self, x: f64, kin: &Kinematics) -> Spinor {
        self.kind.derivative(x, kin) * self.amplitude
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Piece {
    Left,
    Inside,
    Right,
}

/// Piecewise spinor field over `(-∞, 0]`, `[0, a]` and `[a, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavefunction {
    params: WellParams,
    kin: Kinematics,
    left: Vec<Term>,
    inside: Vec<Term>,
    right: Vec<Term>,
}

impl Wavefunction {
    pub fn new(
        params: WellParams,
        kin: Kinematics,
        left: Vec<Term>,
        inside: Vec<Term>,
        right: Vec<Term>,
    ) -> Self {
        Self {
            params,
            kin,
            left,
            inside,
            right,
        }
    }

    pub fn params(&self) -> &WellParams {
        &self.params
    }

    pub fn kinematics(&self) -> &Kinematics {
        &self.kin
    }

    pub fn terms(&self, piece: Piece) -> &[Term] {
        match piece {
            Piece::Left => &self.left,
            Piece::Inside => &self.inside,
            Piece::Right => &self.right,
        }
    }

    /// Piece owning `x`; the walls belong to the inside.
    pub fn piece_of(&self, x: f64) -> Piece {
        if x < 0.0 {
            Piece::Left
        } else if x > self.params.width() {
            Piece::Right
        } else {
            Piece::Inside
        }
    }

    /// Evaluates the expression of `piece` at `x`, regardless of whether
    /// `x` lies in that piece. Used for one-sided wall limits.
    pub fn eval_piece(&self, piece: Piece, x: f64) -> Spinor {
        self.terms(piece)
            .iter()
            .fold(Spinor::ZERO, |acc, t| acc + t.eval(x, &self.kin))
    }

    pub fn derivative_piece(&self, piece: Piece, x: f64) -> Spinor {
        self.terms(piece)
            .iter()
            .fold(Spinor::ZERO, |acc, t| acc + t.derivative(x, &self.kin))
    }

    pub fn eval(&self, x: f64) -> Spinor {
        self.eval_piece(self.piece_of(x), x)
    }

    /// Largest mismatch between the one-sided limits at either wall.
    pub fn continuity_error(&self) -> f64 {
        let a = self.params.width();
        let at_zero = self
            .eval_piece(Piece::Left, 0.0)
            .max_abs_diff(&self.eval_piece(Piece::Inside, 0.0));
        let at_a = self
            .eval_piece(Piece::Inside, a)
            .max_abs_diff(&self.eval_piece(Piece::Right, a));
        at_zero.max(at_a)
    }

    fn scaled(&self, factor: Complex64) -> Self {
        let scale = |terms: &[Term]| {
            terms
                .iter()
                .map(|t| Term {
                    amplitude: t.amplitude * factor,
                    ..*t
                })
                .collect()
        };
        Self {
            params: self.params,
            kin: self.kin,
            left: scale(&self.left),
            inside: scale(&self.inside),
            right: scale(&self.right),
        }
    }
}

/// Basis families used by one row of the solution table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ansatz {
    pub outside_character: Character,
    pub outside_arrow: Arrow,
    pub inside_character: Character,
    pub inside_arrow: Arrow,
}

impl Ansatz {
    pub fn from_kinematics(kin: &Kinematics, params: &WellParams) -> Self {
        let character = |osc: bool| {
            if osc {
                Character::Oscillatory
            } else {
                Character::Evanescent
            }
        };
        Self {
            outside_character: character(kin.osc_outside),
            outside_arrow: kin.outside_arrow(),
            inside_character: character(kin.osc_inside),
            inside_arrow: kin.inside_arrow(params),
        }
    }

    /// Ansatz of a table row; `None` for `Gap` and edges, whose families
    /// depend on the depth.
    pub fn for_regime(regime: EnergyRegime) -> Option<Self> {
        use Arrow::*;
        use Character::*;
        let (oc, oa, ic, ia) = match regime {
            EnergyRegime::ScatterAbove => (Oscillatory, Up, Oscillatory, Up),
            EnergyRegime::BoundUpper => (Evanescent, Up, Oscillatory, Up),
            EnergyRegime::BoundLower => (Evanescent, Down, Oscillatory, Up),
            EnergyRegime::KleinZone => (Oscillatory, Down, Oscillatory, Up),
            EnergyRegime::EvanescentInside => (Oscillatory, Down, Evanescent, Up),
            EnergyRegime::EvanescentInsideLower => (Oscillatory, Down, Evanescent, Down),
            EnergyRegime::ScatterBelow => (Oscillatory, Down, Oscillatory, Down),
            EnergyRegime::Gap | EnergyRegime::Edge(_) => return None,
        };
        Some(Self {
            outside_character: oc,
            outside_arrow: oa,
            inside_character: ic,
            inside_arrow: ia,
        })
    }

    pub fn inside(&self, direction: Direction) -> BasisKind {
        BasisKind::new(
            Region::Inside,
            self.inside_character,
            direction,
            self.inside_arrow,
        )
    }

    fn outside(&self, direction: Direction) -> BasisKind {
        BasisKind::new(
            Region::Outside,
            self.outside_character,
            direction,
            self.outside_arrow,
        )
    }

    /// Outside travelling wave moving towards `+x`.
    pub fn rightward(&self) -> BasisKind {
        match self.outside_arrow {
            Arrow::Up => self.outside(Direction::Plus),
            Arrow::Down => self.outside(Direction::Minus),
        }
    }

    pub fn leftward(&self) -> BasisKind {
        self.rightward().reversed()
    }

    /// Tail decaying towards `-∞`.
    pub fn left_tail(&self) -> BasisKind {
        self.outside(Direction::Plus)
    }

    /// Tail decaying towards `+∞`.
    pub fn right_tail(&self) -> BasisKind {
        self.outside(Direction::Minus)
    }

    pub fn is_bound_type(&self) -> bool {
        self.outside_character == Character::Evanescent
    }

    /// Human-readable ansatz `left | inside | right`, e.g.
    /// `Cθ⁻₊↓ | Aφ⁺₊↑+Bφ⁺₋↑ | Dθ⁻₋↓`.
    pub fn describe(&self, two_sided: bool) -> String {
        let plus = self.inside(Direction::Plus);
        let minus = self.inside(Direction::Minus);
        if self.is_bound_type() {
            return format!(
                "C{} | A{plus}+B{minus} | D{}",
                self.left_tail(),
                self.right_tail()
            );
        }
        let (inc, refl) = (self.rightward(), self.leftward());
        if two_sided {
            format!("{inc}+R{refl}, T̂{refl} | 𝔸{plus}+𝔹{minus} | T{inc}, {refl}+R̂{inc}")
        } else {
            format!("{inc}+R{refl} | A{plus}+B{minus} | T{inc}")
        }
    }
}

/// Fault-injection knobs for the self-test battery. The default leaves the
/// matching untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOptions {
    /// Multiplies `β` in the inside columns evaluated at `x = a` only.
    pub right_wall_beta_scale: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            right_wall_beta_scale: 1.0,
        }
    }
}

/// Continuity system for unknowns `[left, A, B, right]`.
struct System {
    matrix: Matrix4<Complex64>,
    rhs: Vector4<Complex64>,
}

struct Layout {
    left_unknown: BasisKind,
    right_unknown: BasisKind,
    left_known: Option<BasisKind>,
    right_known: Option<BasisKind>,
}

fn set_column(matrix: &mut Matrix4<Complex64>, col: usize, row: usize, s: Spinor) {
    matrix[(row, col)] = s.upper;
    matrix[(row + 1, col)] = s.lower;
}

fn build_system(
    kin: &Kinematics,
    params: &WellParams,
    ansatz: &Ansatz,
    layout: &Layout,
    opts: &MatchOptions,
) -> System {
    let a = params.width();
    let mut matrix = Matrix4::from_element(ZERO);
    let mut rhs = Vector4::from_element(ZERO);

    let plus = ansatz.inside(Direction::Plus);
    let minus = ansatz.inside(Direction::Minus);

    set_column(&mut matrix, 0, 0, -layout.left_unknown.eval(0.0, kin));
    set_column(&mut matrix, 1, 0, plus.eval(0.0, kin));
    set_column(&mut matrix, 2, 0, minus.eval(0.0, kin));

    let wall_column = |kind: BasisKind| {
        if opts.right_wall_beta_scale == 1.0 {
            kind.eval(a, kin)
        } else {
            let column = kind.column_with_ratio(kin.beta * opts.right_wall_beta_scale);
            column * (kind.growth_rate(kin) * a).exp()
        }
    };
    set_column(&mut matrix, 1, 2, wall_column(plus));
    set_column(&mut matrix, 2, 2, wall_column(minus));
    set_column(&mut matrix, 3, 2, -layout.right_unknown.eval(a, kin));

    if let Some(kind) = layout.left_known {
        let s = kind.eval(0.0, kin);
        rhs[0] = s.upper;
        rhs[1] = s.lower;
    }
    if let Some(kind) = layout.right_known {
        let s = kind.eval(a, kin);
        rhs[2] = s.upper;
        rhs[3] = s.lower;
    }
    System { matrix, rhs }
}

/// Hadamard bound `Π‖column‖ ≥ |det|`.
fn column_scale(matrix: &Matrix4<Complex64>) -> f64 {
    matrix.column_iter().map(|c| c.norm()).product()
}

fn solve_system(system: &System, energy: f64) -> Result<(Vector4<Complex64>, Complex64, f64)> {
    let lu = system.matrix.lu();
    let det = lu.determinant();
    let scale = column_scale(&system.matrix);
    if !(det.norm() > SINGULAR_TOLERANCE * scale) {
        return Err(Error::SingularMatching {
            energy,
            det_abs: det.norm(),
            scale,
        });
    }
    let x = lu.solve(&system.rhs).ok_or(Error::SingularMatching {
        energy,
        det_abs: det.norm(),
        scale,
    })?;
    let residual = (system.matrix * x - system.rhs).norm();
    Ok((x, det, residual))
}

/// Coefficients plus the piecewise wavefunction they define.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub regime: EnergyRegime,
    pub energy: f64,
    pub incidence: Incidence,
    pub coefficients: BTreeMap<Coef, Complex64>,
    pub wavefunction: Wavefunction,
    /// Determinant of the continuity matrix that produced the solution.
    pub determinant: Complex64,
    /// `‖Mx - b‖` for driven solves; `σ_min/σ_max` for homogeneous ones.
    pub residual: f64,
}

impl SolutionSet {
    pub fn coef(&self, which: Coef) -> Option<Complex64> {
        self.coefficients.get(&which).copied()
    }

    /// `|R|²` (left incidence) or `|R̂|²` (right incidence).
    pub fn reflection(&self) -> Option<f64> {
        match self.incidence {
            Incidence::Left => self.coef(Coef::R).map(|c| c.norm_sqr()),
            Incidence::Right => self.coef(Coef::RHat).map(|c| c.norm_sqr()),
            _ => None,
        }
    }

    pub fn transmission(&self) -> Option<f64> {
        match self.incidence {
            Incidence::Left => self.coef(Coef::T).map(|c| c.norm_sqr()),
            Incidence::Right => self.coef(Coef::THat).map(|c| c.norm_sqr()),
            _ => None,
        }
    }

    /// `|T|² + |R|²` for single-sided scattering solutions.
    pub fn unitarity_sum(&self) -> Option<f64> {
        Some(self.reflection()? + self.transmission()?)
    }

    /// Inside amplitudes `(A, B)`, or `(𝔸, 𝔹)` for a superposition.
    pub fn inside_amplitudes(&self) -> (Complex64, Complex64) {
        let (a, b) = match self.incidence {
            Incidence::Superposed => (Coef::ATotal, Coef::BTotal),
            Incidence::Right => (Coef::AHat, Coef::BHat),
            Incidence::Left | Incidence::Bound => (Coef::A, Coef::B),
        };
        (self.coef(a).unwrap_or(ZERO), self.coef(b).unwrap_or(ZERO))
    }

    /// Multiplies every amplitude, incident waves included, by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .map(|(k, v)| (*k, v * factor))
                .collect(),
            wavefunction: self.wavefunction.scaled(factor),
            ..self.clone()
        }
    }

    /// Rescales so that the inside amplitudes satisfy
    /// `|A|² + |B|² = constant`. Ratios such as `R/incident` are
    /// unchanged, so the physical solution is the same.
    pub fn normalized_inside(&self, constant: f64) -> Self {
        let (a, b) = self.inside_amplitudes();
        let current = a.norm_sqr() + b.norm_sqr();
        if current == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new((constant / current).sqrt(), 0.0))
    }
}

/// Either a solved row or, for a bound-type row at a non-quantised
/// energy, the determinant that root finding drives to zero.
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeSolution {
    Solved(SolutionSet),
    NoBoundState {
        regime: EnergyRegime,
        energy: f64,
        determinant: Complex64,
        surrogate: f64,
        residual: f64,
    },
}

impl RegimeSolution {
    pub fn solution(&self) -> Option<&SolutionSet> {
        match self {
            RegimeSolution::Solved(s) => Some(s),
            RegimeSolution::NoBoundState { .. } => None,
        }
    }

    pub fn into_solution(self) -> Result<SolutionSet> {
        match self {
            RegimeSolution::Solved(s) => Ok(s),
            RegimeSolution::NoBoundState {
                energy,
                determinant,
                ..
            } => Err(Error::NoBoundState {
                energy,
                determinant,
            }),
        }
    }
}

fn scattering_setup(
    energy: f64,
    params: &WellParams,
) -> Result<(EnergyRegime, Kinematics, Ansatz)> {
    let kin = Kinematics::new(energy, params)?;
    let regime = classify(energy, params);
    if !regime.is_scattering() {
        return Err(Error::WrongRegime {
            expected: "a scattering row (E > m or E < -m)",
            found: regime,
        });
    }
    Ok((regime, kin, Ansatz::from_kinematics(&kin, params)))
}

fn term(coef: Option<Coef>, amplitude: Complex64, kind: BasisKind) -> Term {
    Term {
        coef,
        amplitude,
        kind,
    }
}

/// Unit beam incident from the left.
pub fn solve_left_incidence(energy: f64, params: &WellParams) -> Result<SolutionSet> {
    solve_left_incidence_with(energy, params, &MatchOptions::default())
}

pub fn solve_left_incidence_with(
    energy: f64,
    params: &WellParams,
    opts: &MatchOptions,
) -> Result<SolutionSet> {
    let (regime, kin, ansatz) = scattering_setup(energy, params)?;
    let layout = Layout {
        left_unknown: ansatz.leftward(),
        right_unknown: ansatz.rightward(),
        left_known: Some(ansatz.rightward()),
        right_known: None,
    };
    let system = build_system(&kin, params, &ansatz, &layout, opts);
    let (x, determinant, residual) = solve_system(&system, energy)?;
    let (r, a, b, t) = (x[0], x[1], x[2], x[3]);

    let coefficients = BTreeMap::from([(Coef::R, r), (Coef::T, t), (Coef::A, a), (Coef::B, b)]);
    let wavefunction = Wavefunction::new(
        *params,
        kin,
        vec![
            term(None, ONE, ansatz.rightward()),
            term(Some(Coef::R), r, ansatz.leftward()),
        ],
        vec![
            term(Some(Coef::A), a, ansatz.inside(Direction::Plus)),
            term(Some(Coef::B), b, ansatz.inside(Direction::Minus)),
        ],
        vec![term(Some(Coef::T), t, ansatz.rightward())],
    );
    Ok(SolutionSet {
        regime,
        energy,
        incidence: Incidence::Left,
        coefficients,
        wavefunction,
        determinant,
        residual,
    })
}

/// Unit beam incident from the right; the incident wave is the leftward
/// family with unit coefficient, i.e. phase `e^{±iqa}` at the wall.
pub fn solve_right_incidence(energy: f64, params: &WellParams) -> Result<SolutionSet> {
    solve_right_incidence_with(energy, params, &MatchOptions::default())
}

pub fn solve_right_incidence_with(
    energy: f64,
    params: &WellParams,
    opts: &MatchOptions,
) -> Result<SolutionSet> {
    let (regime, kin, ansatz) = scattering_setup(energy, params)?;
    let layout = Layout {
        left_unknown: ansatz.leftward(),
        right_unknown: ansatz.rightward(),
        left_known: None,
        right_known: Some(ansatz.leftward()),
    };
    let system = build_system(&kin, params, &ansatz, &layout, opts);
    let (x, determinant, residual) = solve_system(&system, energy)?;
    let (t, a, b, r) = (x[0], x[1], x[2], x[3]);

    let coefficients = BTreeMap::from([
        (Coef::RHat, r),
        (Coef::THat, t),
        (Coef::AHat, a),
        (Coef::BHat, b),
    ]);
    let wavefunction = Wavefunction::new(
        *params,
        kin,
        vec![term(Some(Coef::THat), t, ansatz.leftward())],
        vec![
            term(Some(Coef::AHat), a, ansatz.inside(Direction::Plus)),
            term(Some(Coef::BHat), b, ansatz.inside(Direction::Minus)),
        ],
        vec![
            term(None, ONE, ansatz.leftward()),
            term(Some(Coef::RHat), r, ansatz.rightward()),
        ],
    );
    Ok(SolutionSet {
        regime,
        energy,
        incidence: Incidence::Right,
        coefficients,
        wavefunction,
        determinant,
        residual,
    })
}

/// Adds a left- and a right-incidence solution: `𝔸 = A + Â`, `𝔹 = B + B̂`.
/// Outside, the incident, reflected and transmitted pieces of both are
/// kept side by side.
pub fn superpose(left: &SolutionSet, right: &SolutionSet) -> Result<SolutionSet> {
    let scale = left
        .energy
        .abs()
        .max(right.energy.abs())
        .max(f64::MIN_POSITIVE);
    if (left.energy - right.energy).abs() > ENERGY_MATCH_TOLERANCE * scale {
        return Err(Error::MismatchedEnergy {
            left: left.energy,
            right: right.energy,
        });
    }
    if left.incidence != Incidence::Left || right.incidence != Incidence::Right {
        return Err(Error::InvalidArgument(
            "superpose expects a left-incidence and a right-incidence solution".into(),
        ));
    }
    if !left.regime.is_two_sided() {
        return Err(Error::WrongRegime {
            expected: "a two-sided row (E < -m)",
            found: left.regime,
        });
    }
    let get = |s: &SolutionSet, c: Coef| s.coef(c).unwrap_or(ZERO);
    let a_total = get(left, Coef::A) + get(right, Coef::AHat);
    let b_total = get(left, Coef::B) + get(right, Coef::BHat);

    let mut coefficients = BTreeMap::new();
    for c in [Coef::R, Coef::T] {
        coefficients.insert(c, get(left, c));
    }
    for c in [Coef::RHat, Coef::THat] {
        coefficients.insert(c, get(right, c));
    }
    coefficients.insert(Coef::ATotal, a_total);
    coefficients.insert(Coef::BTotal, b_total);

    let lw = &left.wavefunction;
    let rw = &right.wavefunction;
    let inside_plus = lw.inside[0].kind;
    let inside_minus = lw.inside[1].kind;
    let concat = |a: &[Term], b: &[Term]| a.iter().chain(b).copied().collect::<Vec<_>>();
    let wavefunction = Wavefunction::new(
        lw.params,
        lw.kin,
        concat(&lw.left, &rw.left),
        vec![
            term(Some(Coef::ATotal), a_total, inside_plus),
            term(Some(Coef::BTotal), b_total, inside_minus),
        ],
        concat(&lw.right, &rw.right),
    );
    Ok(SolutionSet {
        regime: left.regime,
        energy: left.energy,
        incidence: Incidence::Superposed,
        coefficients,
        wavefunction,
        determinant: left.determinant,
        residual: left.residual.max(right.residual),
    })
}

fn bound_layout(ansatz: &Ansatz) -> Layout {
    Layout {
        left_unknown: ansatz.left_tail(),
        right_unknown: ansatz.right_tail(),
        left_known: None,
        right_known: None,
    }
}

fn bound_setup(energy: f64, params: &WellParams) -> Result<(Kinematics, Ansatz)> {
    let kin = Kinematics::new(energy, params)?;
    let ansatz = Ansatz::from_kinematics(&kin, params);
    if !ansatz.is_bound_type() {
        return Err(Error::WrongRegime {
            expected: "a bound-type row (|E| < m)",
            found: classify(energy, params),
        });
    }
    Ok((kin, ansatz))
}

/// Determinant of the homogeneous continuity system for `|E| < m`.
pub fn bound_determinant(energy: f64, params: &WellParams) -> Result<Complex64> {
    let (kin, ansatz) = bound_setup(energy, params)?;
    let system = build_system(
        &kin,
        params,
        &ansatz,
        &bound_layout(&ansatz),
        &MatchOptions::default(),
    );
    Ok(system.matrix.determinant())
}

/// Real-valued determinant for root bracketing in `|E| < m`.
///
/// Rewriting the inside pair as `cos/sin` combinations makes every column
/// real; that change of basis multiplies the determinant by `i/2`. The
/// sign is also flipped for `E < 0` because `θ₋↓ = -θ₋↑` at `E = 0`, so
/// the surrogate is continuous across zero.
pub fn bound_surrogate(energy: f64, params: &WellParams) -> Result<f64> {
    let (kin, ansatz) = bound_setup(energy, params)?;
    let system = build_system(
        &kin,
        params,
        &ansatz,
        &bound_layout(&ansatz),
        &MatchOptions::default(),
    );
    let det = system.matrix.determinant();
    let real = match ansatz.inside_character {
        Character::Oscillatory => -0.5 * det.im,
        Character::Evanescent => det.re,
    };
    Ok(match ansatz.outside_arrow {
        Arrow::Up => real,
        Arrow::Down => -real,
    })
}

/// Null-space solution of the homogeneous system, whether or not the
/// energy is quantised. `residual` is `σ_min/σ_max`.
pub fn bound_least_squares(energy: f64, params: &WellParams) -> Result<SolutionSet> {
    let (kin, ansatz) = bound_setup(energy, params)?;
    let system = build_system(
        &kin,
        params,
        &ansatz,
        &bound_layout(&ansatz),
        &MatchOptions::default(),
    );
    let determinant = system.matrix.determinant();
    let svd = system.matrix.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let (min_index, sigma_min) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("four singular values");
    let sigma_max = svd.singular_values.max();
    let mut v: Vector4<Complex64> = v_t.row(min_index).adjoint();
    // Fix the global phase: largest component real and positive.
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    if pivot.norm() > 0.0 {
        let phase = pivot / pivot.norm();
        v /= phase;
    }
    let (c, a, b, d) = (v[0], v[1], v[2], v[3]);
    let coefficients = BTreeMap::from([(Coef::C, c), (Coef::A, a), (Coef::B, b), (Coef::D, d)]);
    let wavefunction = Wavefunction::new(
        *params,
        kin,
        vec![term(Some(Coef::C), c, ansatz.left_tail())],
        vec![
            term(Some(Coef::A), a, ansatz.inside(Direction::Plus)),
            term(Some(Coef::B), b, ansatz.inside(Direction::Minus)),
        ],
        vec![term(Some(Coef::D), d, ansatz.right_tail())],
    );
    Ok(SolutionSet {
        regime: classify(energy, params),
        energy,
        incidence: Incidence::Bound,
        coefficients,
        wavefunction,
        determinant,
        residual: if sigma_max > 0.0 {
            sigma_min / sigma_max
        } else {
            0.0
        },
    })
}

/// Solves the table row that `energy` falls in.
///
/// - `E > m`: left incidence.
/// - `E < -m`: left and right incidence, superposed.
/// - `|E| < m`: the homogeneous system; [`RegimeSolution::NoBoundState`]
///   unless the least-squares residual is below
///   [`BOUND_RESIDUAL_TOLERANCE`].
pub fn solve_regime(energy: f64, params: &WellParams) -> Result<RegimeSolution> {
    let regime = classify(energy, params);
    match regime {
        EnergyRegime::Edge(edge) => Err(Error::EdgeEnergy {
            energy,
            edge: edge.to_string(),
        }),
        EnergyRegime::ScatterAbove => {
            solve_left_incidence(energy, params).map(RegimeSolution::Solved)
        }
        r if r.is_two_sided() => {
            let left = solve_left_incidence(energy, params)?;
            let right = solve_right_incidence(energy, params)?;
            superpose(&left, &right).map(RegimeSolution::Solved)
        }
        _ => {
            let solution = bound_least_squares(energy, params)?;
            if solution.residual < BOUND_RESIDUAL_TOLERANCE {
                Ok(RegimeSolution::Solved(solution))
            } else {
                Ok(RegimeSolution::NoBoundState {
                    regime,
                    energy,
                    determinant: solution.determinant,
                    surrogate: bound_surrogate(energy, params)?,
                    residual: solution.residual,
                })
            }
        }
    }
}
