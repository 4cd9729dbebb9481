use std::f64::consts::PI;

use diracwell::matching::{solve_regime, SolutionSet};
use diracwell::observables::{current, flux_balance, wall_current_quench};
use diracwell::{Arrow, BasisKind, Direction, Kinematics, Region, Spinor, WellParams};
use num_complex::Complex64;

fn params() -> WellParams {
    WellParams::new(1.0, 5.0, 1.0).unwrap()
}

fn superposed(e: f64) -> SolutionSet {
    solve_regime(e, &params()).unwrap().into_solution().unwrap()
}

#[test]
fn current_of_simple_spinors() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = Spinor::new(Complex64::new(s, 0.0), Complex64::new(0.0, s));
    assert!((current(&psi) - 1.0).abs() < 1e-15);
    assert_eq!(current(&Spinor::real(1.0, 0.0)), 0.0);
}

#[test]
fn plane_wave_current() {
    let kin = Kinematics::new(2.0, &params()).unwrap();
    let kind = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Up);
    for x in [-3.0, 0.0, 0.5, 10.0] {
        assert!((current(&kind.eval(x, &kin)) - 0.8660254037844386).abs() < 1e-15);
    }
}

#[test]
fn flux_balance_selects_levels() {
    let e1 = -(1.0 + PI * PI).sqrt();
    assert!(flux_balance(&superposed(e1)).unwrap().balanced);
    assert!(!flux_balance(&superposed(-2.0)).unwrap().balanced);
    let zero = superposed(-2.0).scaled(Complex64::new(0.0, 0.0));
    let b = flux_balance(&zero).unwrap();
    assert_eq!((b.rightward, b.leftward, b.balanced), (0.0, 0.0, true));
}

#[test]
fn wall_currents_vanish_on_both_branches() {
    for e in [-(1.0 + PI * PI).sqrt(), -5.0 + (1.0 + PI * PI).sqrt()] {
        let w = wall_current_quench(&superposed(e), &params()).unwrap();
        assert!(w.quenched(1e-10), "E={e}: {w:?}");
    }
    let w = wall_current_quench(&superposed(-2.0), &params()).unwrap();
    assert!(w.max_relative() > 1e-3);
}

#[test]
fn one_sided_solutions_are_rejected() {
    let left = diracwell::matching::solve_left_incidence(-2.0, &params()).unwrap();
    assert!(flux_balance(&left).is_err());
    assert!(wall_current_quench(&left, &params()).is_err());
}
