use diracwell::verify::{run_battery, VerifyOptions};
use diracwell::WellParams;

fn print_and_check(params: &WellParams, opts: &VerifyOptions) -> bool {
    let report = run_battery(params, opts).unwrap();
    for c in &report.checks {
        println!(
            "[{}] {} worst={:.3e} tol={:.1e} {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.detail
        );
    }
    report.all_passed()
}

#[test]
fn default_parameters_pass() {
    let params = WellParams::new(1.0, 5.0, 1.0).unwrap();
    assert!(print_and_check(&params, &VerifyOptions::default()));
}

#[test]
fn wide_deep_well_passes() {
    let params = WellParams::new(1.0, 12.0, 3.0).unwrap();
    assert!(print_and_check(&params, &VerifyOptions::default()));
}

#[test]
fn shallow_well_passes() {
    let params = WellParams::new(1.0, 1.5, 2.0).unwrap();
    assert!(print_and_check(&params, &VerifyOptions::default()));
}

#[test]
fn perturbed_beta_fails_unitarity() {
    let params = WellParams::new(1.0, 5.0, 1.0).unwrap();
    let opts = VerifyOptions {
        perturb_beta: Some(1e-3),
        ..VerifyOptions::default()
    };
    let report = run_battery(&params, &opts).unwrap();
    let unitarity = report
        .checks
        .iter()
        .find(|c| c.name.starts_with("unitarity"))
        .unwrap();
    assert!(!unitarity.passed);
    assert!(!report.all_passed());
}

#[test]
fn row_scoped_run() {
    let params = WellParams::new(1.0, 5.0, 1.0).unwrap();
    let opts = VerifyOptions {
        row: Some(5),
        samples: 3,
        ..VerifyOptions::default()
    };
    let report = run_battery(&params, &opts).unwrap();
    assert!(report.checks.iter().all(|c| c.name.contains("row 5")));
    assert!(report.all_passed());
}
