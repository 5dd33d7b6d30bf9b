use std::f64::consts::PI;

use oscillint_core::criteria::{
    oscillation_check, wong_check, CriteriaOptions, Evidence, Outcome,
};
use oscillint_core::numerics::Tolerances;
use oscillint_core::oracle::{empirical_classification, simulate_ensemble, EmpiricalOutcome, Ensemble};
use oscillint_core::transform::{reduce_equation, SecondOrderSpec, SystemSpec};

const CORPUS: [[&str; 4]; 5] = [
    ["1", "0", "1", "sin(t)"],
    ["1", "0", "4", "sin(t)"],
    ["1", "0", "2", "cos(t)"],
    ["1", "0", "2 + cos(3*t)", "sin(t)"],
    ["1 + 0.2*sin(t)^2", "0", "3", "sin(t)"],
];

fn strict_extension_system() -> SystemSpec {
    SystemSpec::parse(
        [
            "0",
            "1",
            "-1",
            "0",
            "0.25*cos(t/2 + 1) + 2*cos(40*t)",
            "sin(t/2 + 1) + 0.1*sin(40*t)",
        ],
        0.0,
    )
    .unwrap()
}

// φ'' + φ = g + f' for the same φ
fn strict_extension_equation() -> SecondOrderSpec {
    SecondOrderSpec::parse(["1", "0", "1", "0.875*sin(t/2 + 1) - 79.9*sin(40*t)"], 0.0).unwrap()
}

#[test]
fn wong_passes_imply_lambda_zero_passes() {
    let opts = CriteriaOptions::default();
    let horizon = (0.0, 16.0 * PI);
    for coeffs in CORPUS {
        let eq = SecondOrderSpec::parse(coeffs, 0.0).unwrap();
        let wong = wong_check(&eq, horizon, None, &opts).unwrap();
        assert_eq!(wong.outcome, Outcome::Oscillatory, "{coeffs:?}: {:?}", wong.failed_condition);
        let grid = opts.grid(horizon.0, horizon.1).unwrap();
        let sys = reduce_equation(&eq, &grid).unwrap();
        let osc = oscillation_check(&sys, horizon, None, Some(&[0.0]), &opts).unwrap();
        assert_eq!(osc.outcome, Outcome::Oscillatory, "{coeffs:?}: {:?}", osc.failed_condition);
    }
}

#[test]
fn strict_extension_instance() {
    let opts = CriteriaOptions::default();
    let horizon = (0.0, 24.0 * PI);
    let wong = wong_check(&strict_extension_equation(), horizon, None, &opts).unwrap();
    assert_eq!(wong.outcome, Outcome::Inconclusive);

    let sys = strict_extension_system();
    let at_zero = oscillation_check(&sys, horizon, None, Some(&[0.0]), &opts).unwrap();
    assert_eq!(at_zero.outcome, Outcome::Inconclusive);

    let v = oscillation_check(&sys, horizon, None, None, &opts).unwrap();
    assert_eq!(v.outcome, Outcome::Oscillatory, "{:?}", v.failed_condition);
    let Evidence::Oscillation { scan, .. } = &v.evidence else { panic!() };
    for sw in scan {
        let w = sw.witness.as_ref().unwrap();
        assert!(w.lambda != 0.0);
        assert!((w.lambda - 0.5 * 1f64.sin()).abs() < 0.06, "{w:?}");
    }

    let ens = Ensemble::standard(horizon);
    let trajs = simulate_ensemble(&sys, &ens, &Tolerances::default()).unwrap();
    assert_eq!(empirical_classification(&trajs, 0.5).outcome, EmpiricalOutcome::OscillatoryObserved);
}
