use std::collections::BTreeMap;

use diracwell::matching::{solve_left_incidence, solve_right_incidence, Piece, SolutionSet};
use diracwell::observables::{current, density};
use diracwell::regime::{classify, edge_at};
use diracwell::spectrum::{
    conventional_spectrum, klein_states, nonrelativistic_limit, verify_boundary_condition,
    BoundaryCondition, NonRelativistic,
};
use diracwell::table::{ansatz_for, sample_point, sweep, SweepPoint, SweepSpec};
use diracwell::verify::{run_battery, VerifyOptions};
use diracwell::{
    BoundState, Branch, Coef, EnergyRegime, Error, RegimeSolution, Tolerances, WellParams,
};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error as ThisError;

use crate::output::{csv, float, json, opt_float};
use crate::{Command, Format, Globals, IncidenceChoice, Units};

/// Environment variable with `key=value,...` tolerance overrides.
pub const TOLERANCE_ENV: &str = "DIRACWELL_TOL";

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(std::io::Error),
    #[error("cannot serialize output: {0}")]
    Serialize(serde_json::Error),
    #[error("cannot write CSV: {0}")]
    Csv(csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub struct Outcome {
    pub rendered: String,
    pub success: bool,
    pub failure_message: Option<String>,
}

impl Outcome {
    fn ok(rendered: String) -> Self {
        Self {
            rendered,
            success: true,
            failure_message: None,
        }
    }
}

struct Context<'a> {
    globals: &'a Globals,
    params: WellParams,
}

impl Context<'_> {
    fn format(&self, default: Format) -> Format {
        self.globals.format.unwrap_or(default)
    }

    fn units(&self) -> Units {
        self.globals.units
    }

    /// Converts an input energy to natural units.
    fn energy(&self, value: f64) -> f64 {
        match self.units() {
            Units::M => value * self.params.mass(),
            Units::Raw => value,
        }
    }

    /// Energy to evaluate at, moved just above an edge when `--allow-edge`
    /// is given.
    fn resolve(&self, value: f64) -> Result<ResolvedEnergy, CliError> {
        let requested = self.energy(value);
        if !requested.is_finite() {
            return Err(CliError::Usage(format!(
                "energy must be finite, got {value}"
            )));
        }
        match edge_at(requested, &self.params) {
            None => Ok(ResolvedEnergy {
                energy: requested,
                requested,
                edge: None,
            }),
            Some(edge) if self.globals.allow_edge => {
                let shift = 10.0 * self.params.edge_tolerance();
                Ok(ResolvedEnergy {
                    energy: edge.energy(&self.params) + shift,
                    requested,
                    edge: Some(edge.label()),
                })
            }
            Some(edge) => Err(Error::EdgeEnergy {
                energy: requested,
                edge: edge.to_string(),
            }
            .into()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ResolvedEnergy {
    energy: f64,
    requested: f64,
    /// Edge the requested energy sat on, when it was moved.
    edge: Option<&'static str>,
}

pub fn run(globals: &Globals, command: &Command) -> Result<Outcome, CliError> {
    let params = WellParams::new(globals.mass, globals.depth, globals.width)?;
    let ctx = Context { globals, params };
    match command {
        Command::Spectrum {
            klein_only,
            nonrel_check,
            levels,
        } => spectrum(&ctx, *klein_only, *nonrel_check, *levels).map(Outcome::ok),
        Command::Scatter { energy } => scatter(&ctx, *energy).map(Outcome::ok),
        Command::Wavefunction {
            energy,
            extent,
            points,
            incidence,
        } => wavefunction(&ctx, *energy, *extent, *points, *incidence).map(Outcome::ok),
        Command::Sweep {
            e_min,
            e_max,
            points,
        } => run_sweep(&ctx, *e_min, *e_max, *points).map(Outcome::ok),
        Command::Verify {
            perturb_beta,
            row,
            samples,
            seed,
        } => verify(&ctx, *perturb_beta, *row, *samples, *seed),
        Command::Table { energy } => table(&ctx, *energy).map(Outcome::ok),
    }
}

#[derive(Debug, Serialize)]
struct StateRecord {
    #[serde(flatten)]
    state: BoundState,
    selected_by: Option<BoundaryCondition>,
    /// `Ψ(a) = (-1)^{n+1} σ₃ Ψ(0)` holds.
    sigma3_holds: bool,
    /// `Ψ(a) = ±Ψ(0)` holds.
    plain_holds: bool,
}

fn state_record(state: BoundState, params: &WellParams) -> StateRecord {
    let klein = state.branch != Branch::Conventional && !state.edge;
    StateRecord {
        selected_by: state.selected_by(),
        sigma3_holds: klein && verify_boundary_condition(&state, params, BoundaryCondition::Sigma3),
        plain_holds: klein && verify_boundary_condition(&state, params, BoundaryCondition::Plain),
        state,
    }
}

#[derive(Debug, Serialize)]
struct SpectrumBody {
    n_max: Option<u32>,
    klein: Vec<StateRecord>,
    conventional: Option<Vec<StateRecord>>,
    nonrelativistic: Option<Vec<NonRelativistic>>,
}

fn spectrum(
    ctx: &Context,
    klein_only: bool,
    nonrel: bool,
    levels: u32,
) -> Result<String, CliError> {
    let params = &ctx.params;
    let no_klein = || Error::NoKleinZone {
        mass: params.mass(),
        depth: params.depth(),
    };
    if (klein_only || nonrel) && !params.has_klein_zone() {
        return Err(no_klein().into());
    }
    let mut klein: Vec<StateRecord> = if params.has_klein_zone() {
        klein_states(params)?
            .into_iter()
            .map(|s| state_record(s, params))
            .collect()
    } else {
        Vec::new()
    };
    klein.sort_by(|a, b| a.state.energy.total_cmp(&b.state.energy));
    let conventional = (!klein_only).then(|| {
        conventional_spectrum(params)
            .into_iter()
            .map(|s| state_record(s, params))
            .collect::<Vec<_>>()
    });
    let nonrelativistic = if nonrel {
        let top = levels.min(params.n_max().unwrap_or(0));
        Some(
            (1..=top)
                .map(|n| nonrelativistic_limit(params, n))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let body = SpectrumBody {
        n_max: params.n_max(),
        klein,
        conventional,
        nonrelativistic,
    };
    match ctx.format(Format::Json) {
        Format::Json => json("spectrum", ctx.units(), params, body),
        Format::Csv => spectrum_csv(&body),
        Format::Text => Ok(spectrum_text(&body)),
    }
}

fn branch_label(branch: Branch) -> &'static str {
    match branch {
        Branch::OutsideQuantized => "outside_quantized",
        Branch::InsideQuantized => "inside_quantized",
        Branch::Conventional => "conventional",
    }
}

fn condition_label(c: Option<BoundaryCondition>) -> &'static str {
    match c {
        Some(BoundaryCondition::Sigma3) => "sigma3",
        Some(BoundaryCondition::Plain) => "plain",
        None => "",
    }
}

fn all_states(body: &SpectrumBody) -> impl Iterator<Item = &StateRecord> {
    body.klein.iter().chain(body.conventional.iter().flatten())
}

fn nonrel_for<'a>(body: &'a SpectrumBody, s: &BoundState) -> Option<&'a NonRelativistic> {
    if s.branch != Branch::OutsideQuantized {
        return None;
    }
    body.nonrelativistic.as_ref()?.iter().find(|r| r.n == s.n)
}

fn spectrum_csv(body: &SpectrumBody) -> Result<String, CliError> {
    let header = [
        "branch",
        "n",
        "energy",
        "parity",
        "k",
        "p",
        "edge",
        "coincident",
        "selected_by",
        "sigma3_holds",
        "plain_holds",
        "nonrel_binding",
        "nonrel_box",
        "rel_error",
    ];
    let rows: Vec<Vec<String>> = all_states(body)
        .map(|r| {
            let s = &r.state;
            let nr = nonrel_for(body, s);
            vec![
                branch_label(s.branch).into(),
                s.n.to_string(),
                float(s.energy),
                s.parity.to_string(),
                float(s.k),
                float(s.p),
                s.edge.to_string(),
                s.coincident.map(branch_label).unwrap_or_default().into(),
                condition_label(r.selected_by).into(),
                r.sigma3_holds.to_string(),
                r.plain_holds.to_string(),
                opt_float(nr.map(|x| x.binding)),
                opt_float(nr.map(|x| x.nonrelativistic)),
                opt_float(nr.map(|x| x.rel_error)),
            ]
        })
        .collect();
    csv(&header, &rows)
}

fn spectrum_text(body: &SpectrumBody) -> String {
    let mut out = String::new();
    match body.n_max {
        Some(n) => out.push_str(&format!("n_max = {n}\n")),
        None => out.push_str("no Klein zone\n"),
    }
    out.push_str(&format!(
        "{:<18} {:>4} {:>22} {:>6} {:>5} {:>7} {:>6}\n",
        "branch", "n", "energy", "parity", "edge", "sigma3", "plain"
    ));
    for r in all_states(body) {
        let s = &r.state;
        out.push_str(&format!(
            "{:<18} {:>4} {:>22.15} {:>6} {:>5} {:>7} {:>6}\n",
            branch_label(s.branch),
            s.n,
            s.energy,
            s.parity,
            s.edge,
            r.sigma3_holds,
            r.plain_holds
        ));
    }
    if let Some(rows) = &body.nonrelativistic {
        out.push_str("nonrelativistic check:\n");
        for r in rows {
            out.push_str(&format!(
                "  n={} binding={:.12e} box={:.12e} rel_error={:.3e}\n",
                r.n, r.binding, r.nonrelativistic, r.rel_error
            ));
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct Amplitudes {
    coefficients: BTreeMap<Coef, Complex64>,
    determinant: Complex64,
}

impl From<&SolutionSet> for Amplitudes {
    fn from(sol: &SolutionSet) -> Self {
        Self {
            coefficients: sol.coefficients.clone(),
            determinant: sol.determinant,
        }
    }
}

#[derive(Debug, Serialize)]
struct ScatterBody {
    energy: ResolvedEnergy,
    ansatz: Option<String>,
    point: SweepPoint,
    left: Option<Amplitudes>,
    right: Option<Amplitudes>,
    superposed: Option<Amplitudes>,
}

const SWEEP_HEADER: [&str; 13] = [
    "energy",
    "regime",
    "row",
    "reflection",
    "transmission",
    "unitarity_sum",
    "flux_right",
    "flux_left",
    "klein_condition",
    "determinant_abs",
    "bound_determinant",
    "note",
    "nudged",
];

fn sweep_row(p: &SweepPoint, nudged: bool) -> Vec<String> {
    vec![
        float(p.energy),
        regime_label(p.regime),
        p.row.map(|r| r.to_string()).unwrap_or_default(),
        opt_float(p.reflection),
        opt_float(p.transmission),
        opt_float(p.unitarity_sum),
        opt_float(p.flux_right),
        opt_float(p.flux_left),
        opt_float(p.klein_condition),
        opt_float(p.determinant_abs),
        opt_float(p.bound_determinant),
        p.note.clone().unwrap_or_default(),
        nudged.to_string(),
    ]
}

fn regime_label(regime: EnergyRegime) -> String {
    regime.to_string()
}

fn scatter(ctx: &Context, value: f64) -> Result<String, CliError> {
    let params = &ctx.params;
    let energy = ctx.resolve(value)?;
    let e = energy.energy;
    let point = sample_point(e, params);
    let regime = point.regime;
    let (left, right, superposed) = if regime.is_scattering() {
        let left = solve_left_incidence(e, params)?;
        if regime.is_two_sided() {
            let right = solve_right_incidence(e, params)?;
            let sup = diracwell::matching::superpose(&left, &right)?;
            (
                Some((&left).into()),
                Some((&right).into()),
                Some((&sup).into()),
            )
        } else {
            (Some((&left).into()), None, None)
        }
    } else {
        (None, None, None)
    };
    let body = ScatterBody {
        energy,
        ansatz: ansatz_for(e, params).ok().map(|(_, a)| a),
        point,
        left,
        right,
        superposed,
    };
    match ctx.format(Format::Json) {
        Format::Json => json("scatter", ctx.units(), params, body),
        Format::Csv => csv(
            &SWEEP_HEADER,
            &[sweep_row(&body.point, energy.edge.is_some())],
        ),
        Format::Text => Ok(scatter_text(&body)),
    }
}

fn scatter_text(body: &ScatterBody) -> String {
    let p = &body.point;
    let mut out = format!(
        "E={} ({}, row {})\n",
        p.energy,
        p.regime,
        p.row.map(|r| r.to_string()).unwrap_or_else(|| "-".into())
    );
    if let Some(ansatz) = &body.ansatz {
        out.push_str(&format!("ansatz: {ansatz}\n"));
    }
    match (p.reflection, p.transmission, p.unitarity_sum) {
        (Some(r), Some(t), Some(sum)) => {
            out.push_str(&format!("|R|²={r:.12}\n|T|²={t:.12}\nsum={sum:.12}\n"));
        }
        _ => out.push_str("no scattering solution at this energy\n"),
    }
    if let (Some(a), Some(b)) = (p.flux_right, p.flux_left) {
        out.push_str(&format!("|𝔸|²={a:.12}\n|𝔹|²={b:.12}\n"));
    }
    if let Some(k) = p.klein_condition {
        out.push_str(&format!("klein_condition={k:.12e}\n"));
    }
    if let Some(d) = p.bound_determinant {
        out.push_str(&format!("bound_determinant={d:.12e}\n"));
    }
    out
}

#[derive(Debug, Serialize)]
struct WavefunctionSample {
    x: f64,
    re_upper: f64,
    im_upper: f64,
    re_lower: f64,
    im_lower: f64,
    density: f64,
    current: f64,
}

#[derive(Debug, Serialize)]
struct WavefunctionBody {
    energy: ResolvedEnergy,
    regime: EnergyRegime,
    incidence: diracwell::Incidence,
    extent: f64,
    samples: Vec<WavefunctionSample>,
}

fn pick_solution(
    e: f64,
    params: &WellParams,
    choice: IncidenceChoice,
) -> Result<SolutionSet, CliError> {
    match choice {
        IncidenceChoice::Left => Ok(solve_left_incidence(e, params)?),
        IncidenceChoice::Right => Ok(solve_right_incidence(e, params)?),
        IncidenceChoice::Auto => match diracwell::matching::solve_regime(e, params)? {
            RegimeSolution::Solved(sol) => Ok(sol),
            RegimeSolution::NoBoundState { regime, .. } => Err(CliError::Usage(format!(
                "E={e} ({regime}) is not a bound state; the continuity conditions have no \
                 nonzero solution there"
            ))),
        },
    }
}

fn wavefunction(
    ctx: &Context,
    value: f64,
    extent: Option<f64>,
    points: usize,
    choice: IncidenceChoice,
) -> Result<String, CliError> {
    let params = &ctx.params;
    let a = params.width();
    let extent = extent.unwrap_or(2.0 * a);
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(CliError::Usage(format!(
            "--L must be positive, got {extent}"
        )));
    }
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let energy = ctx.resolve(value)?;
    let sol = pick_solution(energy.energy, params, choice)?;
    let wf = &sol.wavefunction;
    let mut samples = Vec::with_capacity(3 * points);
    let regions = [
        (Piece::Left, -extent, 0.0),
        (Piece::Inside, 0.0, a),
        (Piece::Right, a, a + extent),
    ];
    for (index, (piece, lo, hi)) in regions.into_iter().enumerate() {
        let step = (hi - lo) / (points - 1) as f64;
        // Walls are sampled once, from the inside expression.
        let first = usize::from(index == 2);
        let last = if index == 0 { points - 1 } else { points };
        for i in first..last {
            let x = if i == points - 1 {
                hi
            } else {
                lo + step * i as f64
            };
            let psi = wf.eval_piece(piece, x);
            samples.push(WavefunctionSample {
                x,
                re_upper: psi.upper.re,
                im_upper: psi.upper.im,
                re_lower: psi.lower.re,
                im_lower: psi.lower.im,
                density: density(&psi),
                current: current(&psi),
            });
        }
    }
    let body = WavefunctionBody {
        energy,
        regime: classify(energy.energy, params),
        incidence: sol.incidence,
        extent,
        samples,
    };
    match ctx.format(Format::Json) {
        Format::Json => json("wavefunction", ctx.units(), params, body),
        Format::Csv | Format::Text => {
            let header = [
                "x", "re_upper", "im_upper", "re_lower", "im_lower", "density", "current",
            ];
            let rows: Vec<Vec<String>> = body
                .samples
                .iter()
                .map(|s| {
                    [
                        s.x, s.re_upper, s.im_upper, s.re_lower, s.im_lower, s.density, s.current,
                    ]
                    .into_iter()
                    .map(float)
                    .collect()
                })
                .collect();
            csv(&header, &rows)
        }
    }
}

fn run_sweep(ctx: &Context, e_min: f64, e_max: f64, points: usize) -> Result<String, CliError> {
    let params = &ctx.params;
    let spec = SweepSpec {
        e_min: ctx.energy(e_min),
        e_max: ctx.energy(e_max),
        n_points: points,
        include_edges: ctx.globals.allow_edge,
    };
    let result = sweep(params, spec)?;
    match ctx.format(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                grid: &'a diracwell::table::GridInfo,
                points: &'a [SweepPoint],
            }
            json(
                "sweep",
                ctx.units(),
                params,
                Body {
                    grid: &result.grid,
                    points: &result.points,
                },
            )
        }
        Format::Csv | Format::Text => {
            let rows: Vec<Vec<String>> = result
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| sweep_row(p, result.grid.nudged.iter().any(|n| n.index == i)))
                .collect();
            csv(&SWEEP_HEADER, &rows)
        }
    }
}

fn tolerances() -> Result<Tolerances, CliError> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(spec) => Tolerances::default()
            .with_overrides(&spec)
            .map_err(|e| CliError::Usage(format!("{TOLERANCE_ENV}: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(Tolerances::default()),
        Err(e) => Err(CliError::Usage(format!("{TOLERANCE_ENV}: {e}"))),
    }
}

fn verify(
    ctx: &Context,
    perturb_beta: Option<f64>,
    row: Option<u8>,
    samples: usize,
    seed: u64,
) -> Result<Outcome, CliError> {
    let params = &ctx.params;
    if let Some(r) = row {
        if !(1..=7).contains(&r) {
            return Err(CliError::Usage(format!("--row must be 1 to 7, got {r}")));
        }
    }
    if let Some(eps) = perturb_beta {
        if !eps.is_finite() || eps <= -1.0 {
            return Err(CliError::Usage(format!(
                "--perturb-beta must be finite and above -1, got {eps}"
            )));
        }
    }
    let opts = VerifyOptions {
        perturb_beta,
        row,
        samples,
        seed,
        tolerances: tolerances()?,
        ..VerifyOptions::default()
    };
    let report = run_battery(params, &opts)?;
    let passed = report.all_passed();
    let failures: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    let rendered = match ctx.format(Format::Text) {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                all_passed: bool,
                tolerances: Tolerances,
                checks: &'a [diracwell::verify::CheckResult],
            }
            json(
                "verify",
                ctx.units(),
                params,
                Body {
                    all_passed: passed,
                    tolerances: opts.tolerances,
                    checks: &report.checks,
                },
            )?
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.passed.to_string(),
                        float(c.worst),
                        float(c.tolerance),
                        c.detail.clone(),
                    ]
                })
                .collect();
            csv(&["name", "passed", "worst", "tolerance", "detail"], &rows)?
        }
        Format::Text => {
            let mut out = String::new();
            for c in &report.checks {
                out.push_str(&format!(
                    "{}  {:<52} worst={:<10.3e} tol={:<8.1e} {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.tolerance,
                    c.detail
                ));
            }
            out.push_str(&format!(
                "{} of {} checks passed\n",
                report.checks.len() - failures.len(),
                report.checks.len()
            ));
            out
        }
    };
    Ok(Outcome {
        rendered,
        success: passed,
        failure_message: (!passed).then(|| format!("verification failed: {}", failures.join("; "))),
    })
}

#[derive(Debug, Serialize)]
struct TableBody {
    energy: ResolvedEnergy,
    regime: EnergyRegime,
    row: Option<u8>,
    ansatz: String,
}

fn table(ctx: &Context, value: f64) -> Result<String, CliError> {
    let params = &ctx.params;
    let energy = ctx.resolve(value)?;
    let (regime, ansatz) = ansatz_for(energy.energy, params)?;
    let body = TableBody {
        energy,
        regime,
        row: regime.row(),
        ansatz,
    };
    match ctx.format(Format::Text) {
        Format::Json => json("table", ctx.units(), params, body),
        Format::Csv => csv(
            &["energy", "regime", "row", "ansatz"],
            &[vec![
                float(body.energy.energy),
                regime_label(body.regime),
                body.row.map(|r| r.to_string()).unwrap_or_default(),
                body.ansatz.clone(),
            ]],
        ),
        Format::Text => Ok(format!(
            "row {} ({}): {}\n",
            body.row
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".into()),
            body.regime,
            body.ansatz
        )),
    }
}
