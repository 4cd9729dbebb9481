//! Property battery behind the `verify` command.
//!
//! Every check is self-contained: it samples its own energies from a seeded
//! generator, compares two independent computations, and reports the worst
//! deviation against its tolerance.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisKind, Character, Direction, Region};
use crate::closed_form;
use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::matching::{
    bound_least_squares, solve_left_incidence, solve_left_incidence_with, solve_regime,
    solve_right_incidence_with, Coef, MatchOptions, RegimeSolution, SolutionSet, Wavefunction,
};
use crate::observables::{current_profile, flux_balance, wall_current_quench, wall_limits};
use crate::oracle::{
    chain_regions, dirac_residual, per_region, residual_first_order, residual_second_order,
    ChainReport, IntegrationOptions,
};
use crate::regime::{classify, EnergyRegime};
use crate::spectrum::{
    conventional_spectrum, default_klein_points, klein_spectrum, klein_states,
    nonrelativistic_limit, scan_klein_roots, verify_boundary_condition, BoundState,
    BoundaryCondition, Branch,
};
use crate::tolerances::Tolerances;
use crate::well::WellParams;

/// Coarsest grid of the convergence-order check: at least this many steps
/// per region, and at least this many per radian of phase.
pub const CONVERGENCE_BASE: (usize, f64) = (32, 4.0);
/// Number of grids in the convergence check, each halving the step.
pub const CONVERGENCE_LEVELS: u32 = 5;
/// Accepted band for the observed order `log2(e_h / e_{h/2})`.
pub const CONVERGENCE_ORDER_BAND: (f64, f64) = (3.75, 4.25);
/// Relative margin kept between sampled energies and zone edges.
pub const EDGE_MARGIN: f64 = 0.02;
/// Off-spectrum energies must fail a bound-state condition by this much.
pub const OFF_SPECTRUM_VIOLATION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest deviation observed (or smallest, for checks that require a
    /// violation).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, worst: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: worst <= tolerance,
            worst,
            tolerance,
            detail,
        }
    }

    fn failed(name: impl Into<String>, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: false,
            worst: f64::NAN,
            tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Relative perturbation of `β` at the right wall (fault injection).
    pub perturb_beta: Option<f64>,
    /// Restrict the run to the oracle checks of one row (1 to 7).
    pub row: Option<u8>,
    /// Energies per row for the oracle and current checks.
    pub samples: usize,
    pub unitarity_samples: usize,
    pub closed_form_samples: usize,
    pub off_spectrum_samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            perturb_beta: None,
            row: None,
            samples: 3,
            unitarity_samples: 1000,
            closed_form_samples: 100,
            off_spectrum_samples: 20,
            seed: 0x5eed,
            tolerances: Tolerances::default(),
        }
    }
}

impl VerifyOptions {
    fn match_options(&self) -> MatchOptions {
        MatchOptions {
            right_wall_beta_scale: 1.0 + self.perturb_beta.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: WellParams,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs the battery. With `opts.row` set only that row's oracle checks run.
pub fn run_battery(params: &WellParams, opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let tol = &opts.tolerances;
    let mut checks = Vec::new();

    if let Some(row) = opts.row {
        let regime = EnergyRegime::from_row(row)
            .ok_or_else(|| Error::InvalidArgument(format!("row must be 1 to 7, got {row}")))?;
        checks.push(check_oracle_row(
            params,
            regime,
            opts.samples,
            &mut rng,
            tol,
        ));
        checks.push(check_convergence_row(params, regime, &mut rng));
        return Ok(VerifyReport {
            params: *params,
            checks,
        });
    }

    checks.push(check_unitarity(
        params,
        opts.unitarity_samples,
        &opts.match_options(),
        &mut rng,
        tol,
    ));
    if params.has_klein_zone() {
        checks.push(check_klein_closed_form(params, tol));
        checks.push(check_root_count(params, tol));
        checks.push(check_closed_form_amplitudes(
            params,
            opts.closed_form_samples,
            &opts.match_options(),
            &mut rng,
            tol,
        ));
        checks.push(check_bound_conditions(params, tol));
        checks.push(check_off_spectrum(
            params,
            opts.off_spectrum_samples,
            &mut rng,
        ));
        checks.push(check_boundary_selection(params));
    }
    checks.push(check_depth_independence(params.mass(), params.width()));
    checks.push(check_nonrelativistic(
        &WellParams::new(1000.0, 5000.0, 1.0)?,
        &[1, 2, 3],
        1e-4,
    ));
    for regime in EnergyRegime::ROWS {
        checks.push(check_oracle_row(
            params,
            regime,
            opts.samples,
            &mut rng,
            tol,
        ));
    }
    for regime in EnergyRegime::ROWS {
        checks.push(check_convergence_row(params, regime, &mut rng));
    }
    checks.push(check_residuals(params, 10, &mut rng, tol));
    checks.push(check_current_conservation(
        params,
        opts.samples,
        &mut rng,
        tol,
    ));
    Ok(VerifyReport {
        params: *params,
        checks,
    })
}

/// Sampling window for a row: its interval with infinite ends capped and
/// a relative margin removed at both sides. `None` if the row is empty for
/// these parameters.
pub fn row_window(regime: EnergyRegime, params: &WellParams) -> Option<(f64, f64)> {
    let (m, v) = (params.mass(), params.depth());
    let (mut lo, mut hi) = regime.interval(params)?;
    let span = 2.0 * v.max(2.0 * m);
    if hi.is_infinite() {
        hi = lo + span;
    }
    if lo.is_infinite() {
        lo = hi - span;
    }
    if !(lo < hi) {
        return None;
    }
    let margin = EDGE_MARGIN * (hi - lo);
    let (lo, hi) = (lo + margin, hi - margin);
    let inside = |e: f64| classify(e, params) == regime;
    (inside(lo) && inside(hi) && inside(0.5 * (lo + hi))).then_some((lo, hi))
}

/// Uniform random energies in the row, all classified into it.
pub fn sample_row(
    regime: EnergyRegime,
    params: &WellParams,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let Some((lo, hi)) = row_window(regime, params) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e = rng.gen_range(lo..hi);
        if classify(e, params) == regime {
            out.push(e);
        }
    }
    out
}

fn relative(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale
}

pub fn check_unitarity(
    params: &WellParams,
    samples: usize,
    match_opts: &MatchOptions,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> CheckResult {
    let name = "unitarity |T|²+|R|²=1";
    let rows: Vec<EnergyRegime> = [
        EnergyRegime::ScatterAbove,
        EnergyRegime::KleinZone,
        EnergyRegime::ScatterBelow,
    ]
    .into_iter()
    .filter(|r| row_window(*r, params).is_some())
    .collect();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for i in 0..samples {
        let regime = rows[i % rows.len()];
        let e = sample_row(regime, params, 1, rng)[0];
        match solve_left_incidence_with(e, params, match_opts) {
            Ok(sol) => {
                let sum = sol.unitarity_sum().unwrap_or(f64::NAN);
                worst = worst.max((sum - 1.0).abs());
                if sum.is_nan() {
                    worst = f64::INFINITY;
                }
                count += 1;
            }
            Err(err) => return CheckResult::failed(name, tol.unitarity, format!("E={e}: {err}")),
        }
    }
    CheckResult::at_most(
        name,
        worst,
        tol.unitarity,
        format!("{count} energies over {} rows", rows.len()),
    )
}

/// Outside-branch energies against `-sqrt(m² + (nπ/a)²)` and both branches
/// against bisection roots of the Klein condition.
pub fn check_klein_closed_form(params: &WellParams, tol: &Tolerances) -> CheckResult {
    let name = "Klein spectrum closed form vs bisection";
    let (m, a) = (params.mass(), params.width());
    let states = match klein_states(params) {
        Ok(s) => s,
        Err(err) => return CheckResult::failed(name, tol.root_match, err.to_string()),
    };
    let roots = match scan_klein_roots(params, default_klein_points(params)) {
        Ok(r) => r,
        Err(err) => return CheckResult::failed(name, tol.root_match, err.to_string()),
    };
    let mut worst_formula: f64 = 0.0;
    let mut worst_root: f64 = 0.0;
    let mut unmatched = 0;
    for s in states.iter().filter(|s| !s.edge) {
        let scale = m.max(s.energy.abs());
        if s.branch == Branch::OutsideQuantized {
            let exact = -(m * m + (f64::from(s.n) * PI / a).powi(2)).sqrt();
            worst_formula = worst_formula.max(relative(s.energy, exact, scale));
        }
        match roots
            .iter()
            .map(|r| (r - s.energy).abs())
            .min_by(f64::total_cmp)
        {
            Some(d) => worst_root = worst_root.max(d / scale),
            None => unmatched += 1,
        }
    }
    let formula_ok = worst_formula <= 1e-12;
    let mut result = CheckResult::at_most(
        name,
        worst_root,
        tol.root_match,
        format!(
            "formula deviation {worst_formula:.3e} (limit 1e-12), {} states, {} roots",
            states.iter().filter(|s| !s.edge).count(),
            roots.len()
        ),
    );
    result.passed &= formula_ok && unmatched == 0;
    result
}

/// The scan over the open zone finds exactly one root per non-edge state.
pub fn check_root_count(params: &WellParams, tol: &Tolerances) -> CheckResult {
    let name = "Klein root count matches n_max";
    let n_max = params.n_max().unwrap_or(0);
    let (states, roots) = match (
        klein_states(params),
        scan_klein_roots(params, default_klein_points(params)),
    ) {
        (Ok(s), Ok(r)) => (s, r),
        (Err(err), _) | (_, Err(err)) => return CheckResult::failed(name, 0.0, err.to_string()),
    };
    let per_branch = |b: Branch| states.iter().filter(|s| s.branch == b && !s.edge).count();
    let outside = per_branch(Branch::OutsideQuantized);
    let inside = per_branch(Branch::InsideQuantized);
    let mut expected: Vec<f64> = states
        .iter()
        .filter(|s| !s.edge)
        .map(|s| s.energy)
        .collect();
    expected.sort_by(f64::total_cmp);
    expected.dedup_by(|a, b| (*a - *b).abs() <= tol.root_match * params.mass().max(a.abs()));
    let extra = roots.len() as i64 - expected.len() as i64;
    let passed = extra == 0 && outside <= n_max as usize && inside <= n_max as usize;
    CheckResult {
        name: name.into(),
        passed,
        worst: extra.unsigned_abs() as f64,
        tolerance: 0.0,
        detail: format!(
            "n_max={n_max}; non-edge states: outside {outside}, inside {inside}; \
             distinct energies {}, roots found {}",
            expected.len(),
            roots.len()
        ),
    }
}

pub fn check_closed_form_amplitudes(
    params: &WellParams,
    samples: usize,
    match_opts: &MatchOptions,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> CheckResult {
    let name = "closed-form vs generic Klein amplitudes";
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for e in sample_row(EnergyRegime::KleinZone, params, samples, rng) {
        let pair = (
            closed_form::left_incidence(e, params),
            closed_form::right_incidence(e, params),
            solve_left_incidence_with(e, params, match_opts),
            solve_right_incidence_with(e, params, match_opts),
        );
        let (Ok(cl), Ok(cr), Ok(gl), Ok(gr)) = pair else {
            skipped += 1;
            continue;
        };
        let comparisons = [
            (cl.plus, gl.coef(Coef::A)),
            (cl.minus, gl.coef(Coef::B)),
            (cr.plus, gr.coef(Coef::AHat)),
            (cr.minus, gr.coef(Coef::BHat)),
        ];
        for (closed, generic) in comparisons {
            let Some(generic) = generic else {
                return CheckResult::failed(name, tol.closed_form, "missing coefficient".into());
            };
            let scale = closed.norm().max(generic.norm()).max(f64::MIN_POSITIVE);
            worst = worst.max((closed - generic).norm() / scale);
        }
    }
    let mut result = CheckResult::at_most(
        name,
        worst,
        tol.closed_form,
        format!("{samples} energies, {skipped} near-singular skipped"),
    );
    result.passed &= skipped == 0;
    result
}

fn superposed(energy: f64, params: &WellParams) -> Result<SolutionSet> {
    solve_regime(energy, params)?.into_solution()
}

/// `(relative flux imbalance, wall current / inside flux scale)`.
pub fn bound_condition_violation(energy: f64, params: &WellParams) -> Result<(f64, f64)> {
    let sol = superposed(energy, params)?;
    let flux = flux_balance(&sol)?;
    let walls = wall_current_quench(&sol, params)?;
    Ok((flux.relative_imbalance(), walls.max_relative()))
}

pub fn check_bound_conditions(params: &WellParams, tol: &Tolerances) -> CheckResult {
    let name = "flux balance and wall quench at Klein states";
    let states = klein_states(params).unwrap_or_default();
    let mut worst_flux: f64 = 0.0;
    let mut worst_wall: f64 = 0.0;
    let mut count = 0;
    for s in states.iter().filter(|s| !s.edge) {
        match bound_condition_violation(s.energy, params) {
            Ok((f, w)) => {
                worst_flux = worst_flux.max(f);
                worst_wall = worst_wall.max(w);
                count += 1;
            }
            Err(err) => {
                return CheckResult::failed(
                    name,
                    tol.flux_balance,
                    format!("E={}: {err}", s.energy),
                )
            }
        }
    }
    let passed = worst_flux <= tol.flux_balance && worst_wall <= tol.wall_current;
    CheckResult {
        name: name.into(),
        passed,
        worst: worst_flux.max(worst_wall),
        tolerance: tol.flux_balance.min(tol.wall_current),
        detail: format!(
            "{count} states; flux imbalance {worst_flux:.3e}, wall current {worst_wall:.3e}"
        ),
    }
}

/// Random Klein energies away from the spectrum must violate a condition.
pub fn check_off_spectrum(params: &WellParams, samples: usize, rng: &mut impl Rng) -> CheckResult {
    let name = "bound-state conditions fail off the spectrum";
    let states = klein_states(params).unwrap_or_default();
    let Some((lo, hi)) = params.klein_zone() else {
        return CheckResult::failed(name, OFF_SPECTRUM_VIOLATION, "no Klein zone".into());
    };
    let gap = 1e-3 * (hi - lo);
    let mut smallest = f64::INFINITY;
    let mut count = 0;
    for e in sample_row(EnergyRegime::KleinZone, params, samples * 4, rng) {
        if count == samples {
            break;
        }
        if states.iter().any(|s| (s.energy - e).abs() < gap) {
            continue;
        }
        let Ok((f, w)) = bound_condition_violation(e, params) else {
            continue;
        };
        smallest = smallest.min(f.max(w));
        count += 1;
    }
    CheckResult {
        name: name.into(),
        passed: count == samples && smallest > OFF_SPECTRUM_VIOLATION,
        worst: smallest,
        tolerance: OFF_SPECTRUM_VIOLATION,
        detail: format!("{count} energies; smallest violation {smallest:.3e} (must exceed)"),
    }
}

/// σ₃ relation picks out the outside branch, the plain relation the inside
/// branch, and neither accepts the other's states.
pub fn check_boundary_selection(params: &WellParams) -> CheckResult {
    let name = "wall relations select one branch each";
    let states = klein_states(params).unwrap_or_default();
    let mut wrong = Vec::new();
    let mut count = 0;
    for s in states.iter().filter(|s| !s.edge && s.coincident.is_none()) {
        let sigma3 = verify_boundary_condition(s, params, BoundaryCondition::Sigma3);
        let plain = verify_boundary_condition(s, params, BoundaryCondition::Plain);
        let expected = match s.branch {
            Branch::OutsideQuantized => (true, false),
            Branch::InsideQuantized => (false, true),
            Branch::Conventional => continue,
        };
        count += 1;
        if (sigma3, plain) != expected {
            wrong.push(format!("{:?} n={}", s.branch, s.n));
        }
    }
    CheckResult {
        name: name.into(),
        passed: wrong.is_empty(),
        worst: wrong.len() as f64,
        tolerance: 0.0,
        detail: if wrong.is_empty() {
            format!("{count} states")
        } else {
            format!("{count} states; wrong: {}", wrong.join(", "))
        },
    }
}

/// Outside-branch energies for `V/m ∈ {2.5, 5, 50, 500}` agree bitwise.
pub fn check_depth_independence(mass: f64, width: f64) -> CheckResult {
    let name = "outside-branch energies independent of V";
    let lists: Vec<Vec<f64>> = [2.5, 5.0, 50.0, 500.0]
        .iter()
        .filter_map(|ratio| WellParams::new(mass, ratio * mass, width).ok())
        .filter_map(|p| klein_spectrum(&p, Branch::OutsideQuantized).ok())
        .map(|states| states.iter().map(|s| s.energy).collect())
        .collect();
    let mut mismatches = 0;
    for pair in lists.windows(2) {
        let n = pair[0].len().min(pair[1].len());
        mismatches += (0..n)
            .filter(|&i| pair[0][i].to_bits() != pair[1][i].to_bits())
            .count();
    }
    CheckResult {
        name: name.into(),
        passed: mismatches == 0 && lists.len() == 4,
        worst: mismatches as f64,
        tolerance: 0.0,
        detail: format!(
            "levels per depth: {:?}",
            lists.iter().map(Vec::len).collect::<Vec<_>>()
        ),
    }
}

pub fn check_nonrelativistic(params: &WellParams, levels: &[u32], tolerance: f64) -> CheckResult {
    let name = format!(
        "nonrelativistic limit (m={}, V={}, a={})",
        params.mass(),
        params.depth(),
        params.width()
    );
    let mut worst: f64 = 0.0;
    for &n in levels {
        match nonrelativistic_limit(params, n) {
            Ok(r) => worst = worst.max(r.rel_error),
            Err(err) => return CheckResult::failed(name, tolerance, err.to_string()),
        }
    }
    CheckResult::at_most(name, worst, tolerance, format!("levels {levels:?}"))
}

/// Distance the closed form is compared over outside the well: one width,
/// shortened where the outside tail decays fast enough that integrating it
/// outward would amplify round-off.
pub fn oracle_extent(wf: &Wavefunction) -> f64 {
    let kin = wf.kinematics();
    let a = wf.params().width();
    if kin.osc_outside || kin.k == 0.0 {
        a
    } else {
        a.min(4.0 / kin.k)
    }
}

/// One energy's oracle comparison: chained when the closed form is
/// continuous at the walls, otherwise region by region.
pub struct OracleSample {
    pub energy: f64,
    pub chained: bool,
    pub report: ChainReport,
}

fn oracle_target(energy: f64, params: &WellParams) -> Result<(SolutionSet, bool)> {
    match solve_regime(energy, params)? {
        RegimeSolution::Solved(sol) => Ok((sol, true)),
        RegimeSolution::NoBoundState { .. } => Ok((bound_least_squares(energy, params)?, false)),
    }
}

pub fn oracle_sample(
    energy: f64,
    params: &WellParams,
    opts: &IntegrationOptions,
) -> Result<OracleSample> {
    let (sol, chained) = oracle_target(energy, params)?;
    let wf = &sol.wavefunction;
    let extent = oracle_extent(wf);
    let report = if chained {
        chain_regions(wf, extent, opts)?
    } else {
        per_region(wf, extent, opts)?
    };
    Ok(OracleSample {
        energy,
        chained,
        report,
    })
}

/// Energies used for a row's oracle check: bound states first for the
/// bound-type rows, topped up with random energies.
pub fn oracle_energies(
    params: &WellParams,
    regime: EnergyRegime,
    samples: usize,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let mut energies: Vec<f64> = if regime.is_bound_type() {
        conventional_spectrum(params)
            .into_iter()
            .filter(|s: &BoundState| classify(s.energy, params) == regime)
            .map(|s| s.energy)
            .take(samples)
            .collect()
    } else {
        Vec::new()
    };
    let missing = samples - energies.len();
    energies.extend(sample_row(regime, params, missing, rng));
    energies
}

pub fn check_oracle_row(
    params: &WellParams,
    regime: EnergyRegime,
    samples: usize,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> CheckResult {
    let row = regime.row().unwrap_or(0);
    let name = format!("oracle agreement, row {row} ({regime})");
    if row_window(regime, params).is_none() {
        return CheckResult {
            name,
            passed: true,
            worst: 0.0,
            tolerance: tol.oracle,
            detail: "row empty for these parameters; skipped".into(),
        };
    }
    let opts = IntegrationOptions {
        richardson_tolerance: tol.oracle,
        ..IntegrationOptions::default()
    };
    let mut worst: f64 = 0.0;
    let mut chained = 0;
    let mut regionwise = 0;
    for e in oracle_energies(params, regime, samples, rng) {
        match oracle_sample(e, params, &opts) {
            Ok(s) => {
                worst = worst.max(s.report.max_component_error);
                if s.chained {
                    chained += 1;
                } else {
                    regionwise += 1;
                }
            }
            Err(err) => return CheckResult::failed(name, tol.oracle, format!("E={e}: {err}")),
        }
    }
    CheckResult::at_most(
        name,
        worst,
        tol.oracle,
        format!("{chained} chained across walls, {regionwise} region by region (no bound state)"),
    )
}

/// Observed RK4 order from `levels` successive step halvings at one energy.
pub fn convergence_orders(energy: f64, params: &WellParams, levels: u32) -> Result<Vec<f64>> {
    let (base_steps, base_per_radian) = CONVERGENCE_BASE;
    let errors: Vec<f64> = (0..levels)
        .map(|level| {
            let factor = 1usize << level;
            let opts = IntegrationOptions {
                steps: base_steps * factor,
                steps_per_radian: base_per_radian * factor as f64,
                richardson: false,
                ..IntegrationOptions::default()
            };
            oracle_sample(energy, params, &opts).map(|s| s.report.max_component_error)
        })
        .collect::<Result<_>>()?;
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

pub fn check_convergence_row(
    params: &WellParams,
    regime: EnergyRegime,
    rng: &mut impl Rng,
) -> CheckResult {
    let row = regime.row().unwrap_or(0);
    let name = format!("RK4 fourth-order convergence, row {row}");
    let (lo_band, hi_band) = CONVERGENCE_ORDER_BAND;
    let Some(&e) = oracle_energies(params, regime, 1, rng).first() else {
        return CheckResult {
            name,
            passed: true,
            worst: 0.0,
            tolerance: hi_band - 4.0,
            detail: "row empty for these parameters; skipped".into(),
        };
    };
    match convergence_orders(e, params, CONVERGENCE_LEVELS) {
        Ok(orders) => {
            let worst = orders.iter().map(|o| (o - 4.0).abs()).fold(0.0, f64::max);
            let passed = orders.iter().all(|o| (lo_band..=hi_band).contains(o));
            CheckResult {
                name,
                passed,
                worst,
                tolerance: hi_band - 4.0,
                detail: format!(
                    "E={e:.6}, {CONVERGENCE_LEVELS} grids, orders {:?}",
                    orders
                        .iter()
                        .map(|o| (o * 100.0).round() / 100.0)
                        .collect::<Vec<_>>()
                ),
            }
        }
        Err(err) => CheckResult::failed(name, hi_band - 4.0, format!("E={e}: {err}")),
    }
}

/// Every basis family valid at `energy`: both directions, outside and
/// inside, with the character and arrow the local energy dictates.
pub fn applicable_families(kin: &Kinematics, params: &WellParams) -> Vec<BasisKind> {
    let mut out = Vec::new();
    for (region, osc, arrow) in [
        (Region::Outside, kin.osc_outside, kin.outside_arrow()),
        (Region::Inside, kin.osc_inside, kin.inside_arrow(params)),
    ] {
        let character = if osc {
            Character::Oscillatory
        } else {
            Character::Evanescent
        };
        for direction in [Direction::Plus, Direction::Minus] {
            out.push(BasisKind::new(region, character, direction, arrow));
        }
    }
    out
}

/// Component relation, second-order equation and first-order system for
/// every applicable family, one random energy per row, at random `x`.
/// Each residual is divided by `max(1, |ψ(x)|)` and by the size of the
/// operator it tests: 1 for the component relation, `max(1, |ε² - m²|)`
/// for the second-order equation, `max(1, m + |ε|)` for the first-order
/// system, with `ε` the local energy.
pub fn check_residuals(
    params: &WellParams,
    points: usize,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> CheckResult {
    let name = "analytic residuals of the basis families";
    let a = params.width();
    let mut worst: f64 = 0.0;
    let mut evaluations = 0;
    for regime in EnergyRegime::ROWS {
        for e in sample_row(regime, params, 1, rng) {
            let Ok(kin) = Kinematics::new(e, params) else {
                continue;
            };
            for family in applicable_families(&kin, params) {
                let local = match family.region {
                    Region::Outside => e,
                    Region::Inside => e + params.depth(),
                };
                let m = params.mass();
                let operator = [
                    1.0,
                    (local * local - m * m).abs().max(1.0),
                    (m + local.abs()).max(1.0),
                ];
                for _ in 0..points {
                    let x = rng.gen_range(-a..2.0 * a);
                    let scale = family.eval(x, &kin).norm().max(1.0);
                    let residuals = [
                        residual_first_order(e, params, family, x),
                        residual_second_order(e, params, family, x),
                        dirac_residual(e, params, family, x),
                    ];
                    for (r, size) in residuals.into_iter().zip(operator) {
                        match r {
                            Ok(r) => worst = worst.max(r / (scale * size)),
                            Err(err) => {
                                return CheckResult::failed(name, tol.residual, err.to_string())
                            }
                        }
                    }
                    evaluations += 1;
                }
            }
        }
    }
    CheckResult::at_most(
        name,
        worst,
        tol.residual,
        format!("{evaluations} family/position pairs"),
    )
}

/// `(max spread of J within a region, max jump of J across a wall)`.
pub fn current_violation(sol: &SolutionSet, points: usize) -> (f64, f64) {
    let wf = &sol.wavefunction;
    let profile = current_profile(wf, wf.params().width(), points);
    let spread = profile.piecewise_spread.iter().copied().fold(0.0, f64::max);
    let (l0, r0, la, ra) = wall_limits(wf);
    ((spread), (l0 - r0).abs().max((la - ra).abs()))
}

pub fn check_current_conservation(
    params: &WellParams,
    samples: usize,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> CheckResult {
    let name = "current constant per region and continuous at walls";
    let mut worst_region: f64 = 0.0;
    let mut worst_wall: f64 = 0.0;
    let mut count = 0;
    for regime in EnergyRegime::ROWS.into_iter().filter(|r| r.is_scattering()) {
        for e in sample_row(regime, params, samples, rng) {
            let sol = match solve_left_incidence(e, params) {
                Ok(s) => s,
                Err(err) => {
                    return CheckResult::failed(name, tol.current_region, format!("E={e}: {err}"))
                }
            };
            let (region, wall) = current_violation(&sol, 201);
            worst_region = worst_region.max(region);
            worst_wall = worst_wall.max(wall);
            count += 1;
        }
    }
    CheckResult {
        name: name.into(),
        passed: worst_region <= tol.current_region && worst_wall <= tol.current_wall,
        worst: worst_region.max(worst_wall),
        tolerance: tol.current_region.min(tol.current_wall),
        detail: format!(
            "{count} energies; region spread {worst_region:.3e}, wall jump {worst_wall:.3e}"
        ),
    }
}
