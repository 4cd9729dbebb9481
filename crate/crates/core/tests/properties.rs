use diracwell::matching::{solve_left_incidence, solve_regime};
use diracwell::observables::{flux_balance, wall_current_quench};
use diracwell::oracle::{chain_regions, IntegrationOptions};
use diracwell::regime::{classify, Edge};
use diracwell::spectrum::klein_states;
use diracwell::verify::{current_violation, oracle_extent};
use diracwell::{EnergyRegime, Kinematics, WellParams};
use proptest::prelude::*;

fn well() -> impl Strategy<Value = WellParams> {
    (0.2f64..5.0, 0.1f64..12.0, 0.1f64..4.0)
        .prop_map(|(m, v_over_m, a)| WellParams::new(m, v_over_m * m, a).unwrap())
}

fn deep_well() -> impl Strategy<Value = WellParams> {
    (0.2f64..5.0, 2.2f64..12.0, 0.2f64..4.0)
        .prop_map(|(m, v_over_m, a)| WellParams::new(m, v_over_m * m, a).unwrap())
}

fn nearest_edge_distance(e: f64, p: &WellParams) -> f64 {
    Edge::ALL
        .iter()
        .map(|edge| (edge.energy(p) - e).abs())
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classification_is_piecewise_constant(p in well(), e in -30.0f64..30.0, t in -0.99f64..0.99) {
        let d = nearest_edge_distance(e, &p);
        prop_assume!(d > 1e-9);
        let nearby = e + t * d;
        prop_assert_eq!(classify(e, &p), classify(nearby, &p));
    }

    #[test]
    fn incident_ratio_identity(p in well(), x in 1.0001f64..40.0) {
        let e = -x * p.mass();
        let m = p.mass();
        prop_assume!(!classify(e, &p).is_edge());
        let kin = Kinematics::new(e, &p).unwrap();
        let identity = (e + m) / (e - m);
        prop_assert!((kin.alpha * kin.alpha - identity).abs() <= 1e-14 * identity.max(1e-300) + 1e-15);
    }

    #[test]
    fn scattering_is_unitary(p in well(), x in 1.001f64..20.0, below in any::<bool>()) {
        let e = if below { -x * p.mass() - p.depth() * 0.5 } else { x * p.mass() };
        let regime = classify(e, &p);
        prop_assume!(regime.is_scattering());
        let sol = solve_left_incidence(e, &p).unwrap();
        prop_assert!((sol.unitarity_sum().unwrap() - 1.0).abs() < 1e-12);
        let (region, wall) = current_violation(&sol, 51);
        prop_assert!(region < 1e-10);
        prop_assert!(wall < 1e-11);
    }

    #[test]
    fn klein_levels_satisfy_bound_conditions(p in deep_well()) {
        for s in klein_states(&p).unwrap().into_iter().filter(|s| !s.edge) {
            let Ok(sol) = solve_regime(s.energy, &p).and_then(|r| r.into_solution()) else {
                continue;
            };
            let flux = flux_balance(&sol).unwrap();
            let walls = wall_current_quench(&sol, &p).unwrap();
            prop_assert!(flux.relative_imbalance() < 1e-9, "{:?} {:?}", s, flux);
            prop_assert!(walls.max_relative() < 1e-9, "{:?} {:?}", s, walls);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rk4_error_drops_sixteenfold(p in deep_well(), row in 1u8..=7, t in 0.1f64..0.9) {
        let regime = EnergyRegime::from_row(row).unwrap();
        let (lo, hi) = regime.interval(&p).unwrap();
        let (lo, hi) = (lo.max(-3.0 * p.depth()), hi.min(3.0 * p.depth()));
        let e = lo + t * (hi - lo);
        prop_assume!(regime.is_scattering() && classify(e, &p) == regime);
        prop_assume!(nearest_edge_distance(e, &p) > 1e-3 * p.mass());
        let sol = solve_regime(e, &p).unwrap().into_solution().unwrap();
        let wf = &sol.wavefunction;
        let extent = oracle_extent(wf);
        let error = |steps: usize| {
            let opts = IntegrationOptions {
                steps,
                steps_per_radian: steps as f64 / 8.0,
                richardson: false,
                ..IntegrationOptions::default()
            };
            chain_regions(wf, extent, &opts).unwrap().max_component_error
        };
        let (coarse, fine) = (error(128), error(256));
        prop_assume!(fine > 1e-12);
        let ratio = coarse / fine;
        prop_assert!((13.0..19.5).contains(&ratio), "ratio {}", ratio);
    }
}
