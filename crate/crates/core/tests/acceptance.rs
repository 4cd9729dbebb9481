//! The acceptance gate: every criterion at its stated tolerance, one
//! pass/fail line each. Runs as a plain binary so the lines are always
//! printed; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use diracwell::closed_form;
use diracwell::matching::{
    solve_left_incidence, solve_regime, solve_right_incidence, Piece, SolutionSet,
};
use diracwell::observables::{current, flux_balance, wall_current_quench};
use diracwell::oracle::{
    chain_regions, residual_first_order, residual_second_order, IntegrationOptions,
};
use diracwell::regime::classify;
use diracwell::spectrum::{
    conventional_spectrum, klein_condition, klein_spectrum, klein_states,
    verify_boundary_condition, BoundaryCondition,
};
use diracwell::verify::{applicable_families, oracle_extent, sample_row};
use diracwell::{Branch, Coef, EnergyRegime, Kinematics, WellParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn well(m: f64, v: f64, a: f64) -> WellParams {
    WellParams::new(m, v, a).expect("valid parameters")
}

fn reference() -> WellParams {
    well(1.0, 5.0, 1.0)
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_97a0 ^ salt)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    while hi - lo > 1e-15 * lo.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign changes of the Klein condition on a uniform grid strictly inside
/// the zone, refined by bisection.
fn klein_roots(p: &WellParams, points: usize) -> Vec<f64> {
    let (lo, hi) = p.klein_zone().unwrap();
    let f = |e: f64| klein_condition(e, p).unwrap();
    let h = (hi - lo) / points as f64;
    let grid: Vec<f64> = (1..points).map(|i| lo + h * i as f64).collect();
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (f0, f1) = (f(w[0]), f(w[1]));
        if f0 == 0.0 {
            roots.push(w[0]);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            roots.push(bisect(f, w[0], w[1]));
        }
    }
    roots
}

fn criterion_1() -> Outcome {
    let p = reference();
    let exact = -(1.0 + PI * PI).sqrt();
    let level = klein_spectrum(&p, Branch::OutsideQuantized).unwrap()[1];
    let formula = (level.energy - exact).abs();
    let roots = klein_roots(&p, 4000);
    let bisection = roots
        .iter()
        .map(|r| (r - exact).abs())
        .fold(f64::INFINITY, f64::min);
    outcome(
        formula < 1e-12 && bisection < 1e-10,
        format!("closed form off by {formula:.2e} (< 1e-12), bisection off by {bisection:.2e} (< 1e-10)"),
    )
}

fn criterion_2() -> Outcome {
    let lists: Vec<(f64, Vec<f64>)> = [2.5, 5.0, 50.0, 500.0]
        .iter()
        .map(|&v| {
            let p = well(1.0, v, 1.0);
            let energies = klein_spectrum(&p, Branch::OutsideQuantized)
                .unwrap()
                .iter()
                .map(|s| s.energy)
                .collect();
            (v, energies)
        })
        .collect();
    let mut mismatched = 0;
    let mut compared = 0;
    for (i, (_, a)) in lists.iter().enumerate() {
        for (_, b) in &lists[i + 1..] {
            for (x, y) in a.iter().zip(b) {
                compared += 1;
                if x.to_bits() != y.to_bits() {
                    mismatched += 1;
                }
            }
        }
    }
    let lengths_ok = lists
        .iter()
        .all(|(v, l)| l.len() as u32 == well(1.0, *v, 1.0).n_max().unwrap() + 1);
    outcome(
        mismatched == 0 && lengths_ok,
        format!(
            "levels per depth {:?}; {compared} pairwise comparisons, {mismatched} differ",
            lists.iter().map(|(_, l)| l.len()).collect::<Vec<_>>()
        ),
    )
}

fn criterion_3() -> Outcome {
    let p = well(1.0, 5.0, 10.0);
    let n_max = p.n_max().unwrap();
    let a = p.width();
    let roots = klein_roots(&p, 200_000);
    let mut outside = 0;
    let mut inside = 0;
    let mut unexplained = 0;
    for &e in &roots {
        let kin = Kinematics::new(e, &p).unwrap();
        let on = |q: f64| {
            let n = (q * a / PI).round();
            (q * a - n * PI).abs() < 1e-8
        };
        match (on(kin.k), on(kin.p)) {
            (true, false) => outside += 1,
            (false, true) => inside += 1,
            (true, true) => {
                outside += 1;
                inside += 1;
            }
            (false, false) => unexplained += 1,
        }
    }
    let expected = |branch: Branch| {
        klein_spectrum(&p, branch)
            .unwrap()
            .iter()
            .filter(|s| !s.edge)
            .count()
    };
    let (want_out, want_in) = (
        expected(Branch::OutsideQuantized),
        expected(Branch::InsideQuantized),
    );
    outcome(
        n_max == 12
            && want_out == 12
            && outside == want_out
            && inside == want_in
            && unexplained == 0,
        format!(
            "n_max={n_max}; roots: outside branch {outside}/{want_out}, inside branch {inside}/{want_in}, extras {unexplained}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let p = well(1000.0, 5000.0, 1.0);
    let (m, a) = (p.mass(), p.width());
    let levels = klein_spectrum(&p, Branch::OutsideQuantized).unwrap();
    let mut worst: f64 = 0.0;
    for n in 1..=3u32 {
        let level = levels[n as usize];
        let binding = level.energy.abs() - m;
        let box_level = f64::from(n * n) * PI * PI / (2.0 * m * a * a);
        worst = worst.max((binding - box_level).abs() / box_level);
    }
    outcome(
        worst < 1e-4,
        format!("worst relative error {worst:.3e} (< 1e-4)"),
    )
}

fn criterion_5() -> Outcome {
    let p = reference();
    let mut rng = rng(5);
    let rows = [
        EnergyRegime::ScatterAbove,
        EnergyRegime::KleinZone,
        EnergyRegime::ScatterBelow,
    ];
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let e = sample_row(rows[i % 3], &p, 1, &mut rng)[0];
        let sum = solve_left_incidence(e, &p)
            .unwrap()
            .unitarity_sum()
            .unwrap();
        worst = worst.max((sum - 1.0).abs());
    }
    outcome(
        worst < 1e-12,
        format!("1000 energies, worst |sum - 1| = {worst:.3e} (< 1e-12)"),
    )
}

fn superposed(e: f64, p: &WellParams) -> SolutionSet {
    solve_regime(e, p).unwrap().into_solution().unwrap()
}

fn criterion_6() -> Outcome {
    let p = reference();
    let states: Vec<f64> = klein_states(&p)
        .unwrap()
        .iter()
        .filter(|s| !s.edge)
        .map(|s| s.energy)
        .collect();
    let mut worst_flux: f64 = 0.0;
    let mut worst_wall: f64 = 0.0;
    for &e in &states {
        let sol = superposed(e, &p);
        worst_flux = worst_flux.max(flux_balance(&sol).unwrap().relative_imbalance());
        worst_wall = worst_wall.max(wall_current_quench(&sol, &p).unwrap().max_relative());
    }
    let (lo, hi) = p.klein_zone().unwrap();
    let gap = 1e-3 * (hi - lo);
    let mut rng = rng(6);
    let mut weakest = f64::INFINITY;
    let mut sampled = 0;
    while sampled < 20 {
        let e = rng.gen_range(lo..hi);
        if classify(e, &p) != EnergyRegime::KleinZone || states.iter().any(|s| (s - e).abs() < gap)
        {
            continue;
        }
        let sol = superposed(e, &p);
        let flux = flux_balance(&sol).unwrap().relative_imbalance();
        let wall = wall_current_quench(&sol, &p).unwrap().max_relative();
        weakest = weakest.min(flux.max(wall));
        sampled += 1;
    }
    outcome(
        !states.is_empty() && worst_flux < 1e-10 && worst_wall < 1e-10 && weakest > 1e-3,
        format!(
            "{} levels: imbalance {worst_flux:.2e}, wall current {worst_wall:.2e} (< 1e-10); \
             off-spectrum weakest violation {weakest:.3e} (> 1e-3)",
            states.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let sets = [
        well(1.0, 5.0, 1.0),
        well(1.0, 5.0, 10.0),
        well(2.0, 13.0, 1.7),
    ];
    let mut checked = 0;
    let mut wrong = Vec::new();
    for p in &sets {
        for s in klein_states(p).unwrap().iter().filter(|s| !s.edge) {
            let got = (
                verify_boundary_condition(s, p, BoundaryCondition::Sigma3),
                verify_boundary_condition(s, p, BoundaryCondition::Plain),
            );
            let want = match s.branch {
                Branch::OutsideQuantized => (true, false),
                Branch::InsideQuantized => (false, true),
                Branch::Conventional => unreachable!(),
            };
            checked += 1;
            if got != want {
                wrong.push(format!(
                    "(V={}, a={}) {:?} n={}",
                    p.depth(),
                    p.width(),
                    s.branch,
                    s.n
                ));
            }
        }
    }
    outcome(
        wrong.is_empty() && checked > 0,
        format!("{checked} levels over 3 wells; mismatches: {wrong:?}"),
    )
}

fn criterion_8() -> Outcome {
    let p = reference();
    let mut rng = rng(8);
    let mut worst: f64 = 0.0;
    for e in sample_row(EnergyRegime::KleinZone, &p, 100, &mut rng) {
        let cl = closed_form::left_incidence(e, &p).unwrap();
        let cr = closed_form::right_incidence(e, &p).unwrap();
        let gl = solve_left_incidence(e, &p).unwrap();
        let gr = solve_right_incidence(e, &p).unwrap();
        for (closed, generic) in [
            (cl.plus, gl.coef(Coef::A).unwrap()),
            (cl.minus, gl.coef(Coef::B).unwrap()),
            (cr.plus, gr.coef(Coef::AHat).unwrap()),
            (cr.minus, gr.coef(Coef::BHat).unwrap()),
        ] {
            worst = worst.max((closed - generic).norm() / closed.norm().max(generic.norm()));
        }
    }
    outcome(
        worst < 1e-11,
        format!("100 energies, worst relative difference {worst:.3e} (< 1e-11)"),
    )
}

/// Rows 2 and 3 only have closed-form solutions at their bound states; the
/// reference well has one conventional level, so those rows use a = 10.
fn oracle_cases() -> Vec<(u8, WellParams, Vec<f64>)> {
    let p = reference();
    let wide = well(1.0, 5.0, 10.0);
    let conventional = conventional_spectrum(&wide);
    let mut rng = rng(9);
    EnergyRegime::ROWS
        .iter()
        .map(|&regime| {
            let row = regime.row().unwrap();
            if regime.is_bound_type() {
                let energies = conventional
                    .iter()
                    .filter(|s| classify(s.energy, &wide) == regime)
                    .map(|s| s.energy)
                    .take(3)
                    .collect();
                (row, wide, energies)
            } else {
                (row, p, sample_row(regime, &p, 3, &mut rng))
            }
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    let mut samples = 0;
    for (_row, p, energies) in oracle_cases() {
        for e in energies {
            let sol = solve_regime(e, &p).unwrap().into_solution().unwrap();
            let wf = &sol.wavefunction;
            let extent = oracle_extent(wf);
            let report = chain_regions(wf, extent, &IntegrationOptions::default()).unwrap();
            worst = worst.max(report.max_component_error);
            let error_at = |per_radian: f64| {
                let opts = IntegrationOptions {
                    steps: 8 * per_radian as usize,
                    steps_per_radian: per_radian,
                    richardson: false,
                    ..IntegrationOptions::default()
                };
                chain_regions(wf, extent, &opts)
                    .unwrap()
                    .max_component_error
            };
            ratios.push(error_at(8.0) / error_at(16.0));
            samples += 1;
        }
    }
    let (min_ratio, max_ratio) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(*r), hi.max(*r))
    });
    // "≈16×": observed order within 4 ± 0.25.
    let ratio_ok = ratios.iter().all(|r| (3.75..=4.25).contains(&r.log2()));
    outcome(
        samples == 21 && worst < 1e-8 && ratio_ok,
        format!(
            "{samples} energies over 7 rows, worst error {worst:.3e} (< 1e-8); \
             halving ratios {min_ratio:.2}..{max_ratio:.2}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let p = reference();
    let mut rng = rng(10);
    let mut worst2: f64 = 0.0;
    let mut worst3: f64 = 0.0;
    let mut families = 0;
    for regime in EnergyRegime::ROWS {
        let e = sample_row(regime, &p, 1, &mut rng)[0];
        let kin = Kinematics::new(e, &p).unwrap();
        for family in applicable_families(&kin, &p) {
            families += 1;
            for _ in 0..10 {
                let x = rng.gen_range(-p.width()..2.0 * p.width());
                worst2 = worst2.max(residual_first_order(e, &p, family, x).unwrap());
                worst3 = worst3.max(residual_second_order(e, &p, family, x).unwrap());
            }
        }
    }
    outcome(
        worst2 < 1e-13 && worst3 < 1e-13,
        format!(
            "{families} families x 10 points: component relation {worst2:.2e}, \
             second-order {worst3:.2e} (< 1e-13)"
        ),
    )
}

fn criterion_11() -> Outcome {
    let p = reference();
    let a = p.width();
    let mut rng = rng(11);
    let mut worst_region: f64 = 0.0;
    let mut worst_wall: f64 = 0.0;
    let mut count = 0;
    for regime in EnergyRegime::ROWS.into_iter().filter(|r| r.is_scattering()) {
        for e in sample_row(regime, &p, 5, &mut rng) {
            let mut solutions = vec![solve_left_incidence(e, &p).unwrap()];
            if regime.is_two_sided() {
                solutions.push(solve_right_incidence(e, &p).unwrap());
                solutions.push(superposed(e, &p));
            }
            for sol in solutions {
                let wf = &sol.wavefunction;
                for (piece, lo, hi) in [
                    (Piece::Left, -2.0 * a, 0.0),
                    (Piece::Inside, 0.0, a),
                    (Piece::Right, a, 3.0 * a),
                ] {
                    let j: Vec<f64> = (0..=200)
                        .map(|i| current(&wf.eval_piece(piece, lo + (hi - lo) * i as f64 / 200.0)))
                        .collect();
                    let (min, max) = j
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                            (l.min(*v), h.max(*v))
                        });
                    worst_region = worst_region.max(max - min);
                }
                let jump0 = current(&wf.eval_piece(Piece::Left, 0.0))
                    - current(&wf.eval_piece(Piece::Inside, 0.0));
                let jump_a = current(&wf.eval_piece(Piece::Inside, a))
                    - current(&wf.eval_piece(Piece::Right, a));
                worst_wall = worst_wall.max(jump0.abs()).max(jump_a.abs());
                count += 1;
            }
        }
    }
    outcome(
        worst_region < 1e-10 && worst_wall < 1e-11,
        format!(
            "{count} solutions: spread within regions {worst_region:.2e} (< 1e-10), \
             jump at walls {worst_wall:.2e} (< 1e-11)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Klein spectrum closed form and bisection", criterion_1),
        ("outside-branch levels independent of V", criterion_2),
        ("root count matches n_max", criterion_3),
        ("nonrelativistic limit", criterion_4),
        ("unitarity", criterion_5),
        ("bound-state flux and wall conditions", criterion_6),
        ("wall relations select their branch", criterion_7),
        ("closed-form vs generic amplitudes", criterion_8),
        (
            "RK4 oracle per row and fourth-order convergence",
            criterion_9,
        ),
        ("analytic residuals", criterion_10),
        ("current conservation", criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        if !result.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} [{}] {name}: {}",
            i + 1,
            if result.passed { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
