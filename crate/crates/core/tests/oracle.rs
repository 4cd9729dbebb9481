use std::f64::consts::PI;

use diracwell::matching::{solve_regime, Piece};
use diracwell::oracle::{integrate_dirac, residual_first_order, residual_second_order};
use diracwell::{Arrow, BasisKind, Direction, Error, Kinematics, Region, Spinor, WellParams};

fn params() -> WellParams {
    WellParams::new(1.0, 5.0, 1.0).unwrap()
}

#[test]
fn bound_state_endpoint_matches_closed_form() {
    let p = params();
    let e1 = -(1.0 + PI * PI).sqrt();
    let sol = solve_regime(e1, &p).unwrap().into_solution().unwrap();
    let wf = &sol.wavefunction;
    let report = integrate_dirac(e1, &p, wf.eval_piece(Piece::Inside, 0.0), 0.0, 1.0).unwrap();
    let exact = wf.eval_piece(Piece::Inside, 1.0);
    assert!(report.endpoint_spinor.max_abs_diff(&exact) < 1e-8);
    assert_eq!(report.method_order, 4);
}

#[test]
fn zero_stays_zero() {
    let r = integrate_dirac(-2.0, &params(), Spinor::ZERO, 1.0, 4.0).unwrap();
    assert_eq!(r.endpoint_spinor, Spinor::ZERO);
}

#[test]
fn free_plane_wave_propagates() {
    let p = params();
    let kin = Kinematics::new(2.0, &p).unwrap();
    let kind = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Up);
    let r = integrate_dirac(2.0, &p, kind.eval(1.5, &kin), 1.5, 4.0).unwrap();
    assert!(r.endpoint_spinor.max_abs_diff(&kind.eval(4.0, &kin)) < 1e-8);
}

#[test]
fn walls_are_never_crossed() {
    let p = params();
    let psi = Spinor::real(1.0, 0.0);
    assert!(matches!(
        integrate_dirac(-2.0, &p, psi, -1.0, 0.5),
        Err(Error::BadInterval { .. })
    ));
    assert!(matches!(
        integrate_dirac(-2.0, &p, psi, 0.5, 0.2),
        Err(Error::BadInterval { .. })
    ));
}

#[test]
fn component_relation_residuals() {
    let p = params();
    for x in [-2.0, 0.0, 0.7, 3.0] {
        let up = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Up);
        assert!(residual_first_order(2.0, &p, up, x).unwrap() < 1e-13);
        let down = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Down);
        assert!(residual_first_order(-2.0, &p, down, x).unwrap() < 1e-13);
        // Positive-energy relation applied at negative energy.
        assert!(residual_first_order(-2.0, &p, up, x).unwrap() > 0.5);
    }
}

#[test]
fn second_order_residuals() {
    let p = params();
    for x in [-2.0, 0.0, 0.7, 3.0] {
        let phi = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Up);
        assert!(residual_second_order(2.0, &p, phi, x).unwrap() < 1e-13);
        let theta = BasisKind::theta(Region::Outside, Direction::Plus, Arrow::Up);
        assert!(residual_second_order(0.5, &p, theta, x).unwrap() < 1e-13);
    }
    let phi = BasisKind::phi(Region::Outside, Direction::Plus, Arrow::Up);
    assert!(matches!(
        residual_second_order(1.0, &p, phi, 0.0),
        Err(Error::EdgeEnergy { .. })
    ));
}
