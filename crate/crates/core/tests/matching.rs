use diracwell::closed_form;
use diracwell::matching::{
    bound_determinant, solve_left_incidence, solve_regime, solve_right_incidence, superpose, Ansatz,
};
use diracwell::{Coef, EnergyRegime, Incidence, Kinematics, RegimeSolution, WellParams};
use num_complex::Complex64;

fn params() -> WellParams {
    WellParams::new(1.0, 5.0, 1.0).unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

#[test]
fn closed_form_left_amplitudes_match_generic_solve() {
    let p = params();
    let kin = Kinematics::new(-2.0, &p).unwrap();
    assert!((kin.alpha * kin.beta - 0.4082482904638631).abs() < 1e-15);
    let generic = solve_left_incidence(-2.0, &p).unwrap();
    let closed = closed_form::left_incidence(-2.0, &p).unwrap();
    assert!(close(generic.coef(Coef::A).unwrap(), closed.plus, 1e-12));
    assert!(close(generic.coef(Coef::B).unwrap(), closed.minus, 1e-12));
}

#[test]
fn klein_zone_is_unitary() {
    let sol = solve_left_incidence(-2.0, &params()).unwrap();
    assert!((sol.unitarity_sum().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn vanishing_well_is_transparent() {
    let p = WellParams::new(1.0, 1e-12, 1.0).unwrap();
    let sol = solve_left_incidence(2.0, &p).unwrap();
    assert!((sol.transmission().unwrap() - 1.0).abs() < 1e-6);
    assert!(sol.reflection().unwrap() < 1e-6);
}

#[test]
fn right_incidence_ratio() {
    // (αβ-1)/(αβ+1) with αβ = sqrt(1/6) is -(7 - 2√6)/5.
    let p = params();
    let expected = -(7.0 - 2.0 * 6f64.sqrt()) / 5.0;
    let generic = solve_right_incidence(-2.0, &p).unwrap();
    let ratio = generic.coef(Coef::AHat).unwrap() / generic.coef(Coef::BHat).unwrap();
    assert!((ratio.re - expected).abs() < 1e-12);
    assert!(ratio.im.abs() < 1e-12);
    let closed = closed_form::right_incidence(-2.0, &p).unwrap();
    assert!(close(closed.plus, generic.coef(Coef::AHat).unwrap(), 1e-12));
    assert!(close(
        closed.minus,
        generic.coef(Coef::BHat).unwrap(),
        1e-12
    ));
}

#[test]
fn mirror_symmetric_transmission() {
    let p = params();
    let mut e = -3.99;
    while e < -1.01 {
        let left = solve_left_incidence(e, &p).unwrap();
        let right = solve_right_incidence(e, &p).unwrap();
        let t = left.coef(Coef::T).unwrap().norm();
        let t_hat = right.coef(Coef::THat).unwrap().norm();
        assert!((t - t_hat).abs() < 1e-12, "E={e}");
        e += 0.0137;
    }
}

#[test]
fn solutions_are_continuous() {
    let p = params();
    for e in [-2.0, -3.3, -6.5, -5.5, -4.5, 2.0, 7.0] {
        let left = solve_left_incidence(e, &p).unwrap();
        let right = solve_right_incidence(e, &p);
        assert!(left.wavefunction.continuity_error() < 1e-12, "E={e}");
        if let Ok(right) = right {
            assert!(right.wavefunction.continuity_error() < 1e-12, "E={e}");
        }
    }
}

#[test]
fn superposition_adds_amplitudes() {
    let p = params();
    let left = solve_left_incidence(-2.0, &p).unwrap();
    let right = solve_right_incidence(-2.0, &p).unwrap();
    let sup = superpose(&left, &right).unwrap();
    assert_eq!(sup.incidence, Incidence::Superposed);
    let (a, b) = sup.inside_amplitudes();
    assert_eq!(
        a,
        left.coef(Coef::A).unwrap() + right.coef(Coef::AHat).unwrap()
    );
    assert_eq!(
        b,
        left.coef(Coef::B).unwrap() + right.coef(Coef::BHat).unwrap()
    );

    let silent = right.scaled(Complex64::new(0.0, 0.0));
    let only_left = superpose(&left, &silent).unwrap();
    let (a, b) = only_left.inside_amplitudes();
    assert_eq!(a, left.coef(Coef::A).unwrap());
    assert_eq!(b, left.coef(Coef::B).unwrap());
}

#[test]
fn superposition_balances_at_the_first_outside_level() {
    let e1 = -(1.0 + std::f64::consts::PI.powi(2)).sqrt();
    let sup = solve_regime(e1, &params())
        .unwrap()
        .into_solution()
        .unwrap();
    let (a, b) = sup.inside_amplitudes();
    assert!((a.norm() - b.norm()).abs() < 1e-10 * a.norm().max(b.norm()));
}

#[test]
fn mismatched_energies_are_rejected() {
    let p = params();
    let left = solve_left_incidence(-2.0, &p).unwrap();
    let right = solve_right_incidence(-2.1, &p).unwrap();
    assert!(superpose(&left, &right).is_err());
}

#[test]
fn ansatz_rows() {
    let p = params();
    let describe = |e: f64| {
        let kin = Kinematics::new(e, &p).unwrap();
        let regime = diracwell::regime::classify(e, &p);
        Ansatz::from_kinematics(&kin, &p).describe(regime.is_two_sided())
    };
    assert_eq!(describe(2.0), "φ⁻₊↑+Rφ⁻₋↑ | Aφ⁺₊↑+Bφ⁺₋↑ | Tφ⁻₊↑");
    assert!(describe(-4.5).contains("𝔸θ⁺₊↑+𝔹θ⁺₋↑"), "{}", describe(-4.5));
    assert_eq!(describe(-0.5), "Cθ⁻₊↓ | Aφ⁺₊↑+Bφ⁺₋↑ | Dθ⁻₋↓");
}

#[test]
fn bound_row_off_eigenvalue() {
    let p = params();
    let det = bound_determinant(0.5, &p).unwrap();
    assert!(det.norm() > 1e-3);
    match solve_regime(0.5, &p).unwrap() {
        RegimeSolution::NoBoundState { regime, .. } => {
            assert_eq!(regime, EnergyRegime::BoundUpper)
        }
        RegimeSolution::Solved(_) => panic!("0.5 is not a bound state"),
    }
}
