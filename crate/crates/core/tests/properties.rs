mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use oscillint_core::criteria::{lambda_feasibility_from_basis, prufer_angle_field, CriteriaOptions};
use oscillint_core::numerics::{
    cumulative_integral_with, integral, integrate_ode, refine_root, Grid, QuadratureRule, Tolerances, Watch,
};
use oscillint_core::oracle::{empirical_classification, simulate_ensemble, Ensemble};
use oscillint_core::riccati::comparison_validate;
use oscillint_core::transform::{AlphaBasis, SystemSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sorted_grid(mut cuts: Vec<f64>) -> Grid {
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    Grid::new(cuts).unwrap()
}

proptest! {
    #[test]
    fn simpson_is_exact_for_quadratics(
        cuts in prop::collection::vec(0.01f64..0.99, 1..40),
        c in prop::array::uniform3(-5.0f64..5.0),
    ) {
        let grid = sorted_grid(cuts);
        let f = |x: f64| c[0] + c[1] * x + c[2] * x * x;
        let values: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        let running = cumulative_integral_with(&values, &grid, QuadratureRule::Simpson).unwrap();
        if grid.len() >= 3 {
            for (x, got) in grid.nodes().iter().zip(&running) {
                let exact = c[0] * x + c[1] * x * x / 2.0 + c[2] * x * x * x / 3.0;
                prop_assert!((got - exact).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn trapezoid_is_additive_and_monotone(
        cuts in prop::collection::vec(0.01f64..0.99, 1..40),
        v in prop::collection::vec(0.0f64..3.0, 42),
    ) {
        let grid = sorted_grid(cuts);
        let values = &v[..grid.len()];
        let running = cumulative_integral_with(values, &grid, QuadratureRule::Trapezoid).unwrap();
        prop_assert!(running.windows(2).all(|w| w[1] >= w[0]));
        let total = integral(values, &grid, QuadratureRule::Trapezoid).unwrap();
        prop_assert_eq!(total, *running.last().unwrap());
    }

    #[test]
    fn harmonic_zero_events(phase in 0.0f64..std::f64::consts::TAU, span in 1.0f64..25.0) {
        let traj = integrate_ode(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            &[phase.cos(), -phase.sin()],
            (0.0, span),
            &Tolerances::default(),
            &[Watch::zeros(0)],
        )
        .unwrap();
        // zeros of cos(t + phase) after t = 0
        let expected: Vec<f64> = (0..20)
            .map(|k| FRAC_PI_2 + k as f64 * PI - phase)
            .filter(|&z| z > 1e-9 && z <= span)
            .collect();
        let got = traj.crossings(0);
        prop_assume!(expected.iter().all(|z| (z - span).abs() > 1e-6));
        prop_assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!((g - e).abs() < 1e-7);
        }
    }

    #[test]
    fn brent_finds_cubic_roots(root in -3.0f64..3.0, a in 0.1f64..2.0) {
        let f = |x: f64| a * (x - root) * ((x - root) * (x - root) + 1.0);
        let x = refine_root(f, (root - 4.0, root + 5.0), 1e-13).unwrap();
        prop_assert!((x - root).abs() < 1e-10);
    }

    #[test]
    fn alpha_is_affine_in_lambda(seed in any::<u64>(), l1 in -3.0f64..3.0, l2 in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = common::forced_system(&mut rng);
        let grid = Grid::uniform(0.0, 5.0, 501).unwrap();
        let basis = AlphaBasis::new(&sys, &grid).unwrap();
        prop_assert!(basis.a_factor().iter().all(|a| *a > 0.0));
        let (a1, a2, am) = (
            basis.alpha_values(l1),
            basis.alpha_values(l2),
            basis.alpha_values(0.5 * (l1 + l2)),
        );
        for i in 0..grid.len() {
            prop_assert!((am[i] - 0.5 * (a1[i] + a2[i])).abs() < 1e-12 * (1.0 + a1[i].abs() + a2[i].abs()));
        }
    }
}

fn zero_count_direct(sys: &SystemSpec, theta0: f64, span: (f64, f64)) -> usize {
    integrate_ode(
        |t, y, dy| sys.derivative(t, y, dy),
        &[theta0.cos(), theta0.sin()],
        span,
        &Tolerances::default().without_escape(),
        &[Watch::zeros(0)],
    )
    .unwrap()
    .crossings(0)
    .len()
}

#[test]
fn prufer_and_direct_zero_counts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = CriteriaOptions::default();
    for _ in 0..20 {
        let sys = common::homogeneous_system(&mut rng);
        let theta0 = rng.gen_range(-PI..PI);
        let span = (0.0, 20.0);
        let angle = prufer_angle_field(&sys)
            .integrate(span, theta0, &opts, &[Watch::angle_zero_lines(0)])
            .unwrap();
        assert_eq!(angle.crossings(0).len(), zero_count_direct(&sys, theta0, span), "{sys:?}");
    }
}

#[test]
fn lambda_interval_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = Grid::uniform(0.0, 8.0, 801).unwrap();
    let mut feasible = 0;
    for _ in 0..10 {
        let basis = AlphaBasis::new(&common::forced_system(&mut rng), &grid).unwrap();
        let interval = lambda_feasibility_from_basis(&basis);
        let lambda_max = interval.map_or(10.0, |l| 2.0 * l.hi.unwrap_or(l.lo).max(l.lo) + 1.0);
        for k in 0..2000 {
            let lambda = lambda_max * k as f64 / 1999.0;
            let alpha = basis.alpha_values(lambda);
            let ok = basis
                .g_lambda_values(&alpha)
                .iter()
                .zip(&alpha)
                .all(|(g, a)| *a >= 0.0 && *g >= 0.0);
            assert_eq!(ok, interval.is_some_and(|l| l.contains(lambda)), "λ = {lambda}");
        }
        feasible += interval.is_some() as usize;
    }
    assert!(feasible > 0);
}

#[test]
fn comparison_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..25 {
        let inst = common::comparison_instance(&mut rng);
        let report = comparison_validate(&inst).unwrap();
        assert!(report.passed, "{report:?}");
    }
}

#[test]
fn ensemble_zero_counts_interlace_and_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let sys = common::homogeneous_system(&mut rng);
        let ens = Ensemble::seeded((0.0, 20.0), 99, 16).unwrap();
        let trajs = simulate_ensemble(&sys, &ens, &Tolerances::default()).unwrap();
        let counts: Vec<usize> = trajs
            .iter()
            .map(|t| t.crossings(0).iter().filter(|&&z| (1.0..=19.0).contains(&z)).count())
            .collect();
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        assert!(hi - lo <= 1, "{counts:?}");
        let again = simulate_ensemble(&sys, &ens, &Tolerances::default()).unwrap();
        assert_eq!(empirical_classification(&trajs, 0.5), empirical_classification(&again, 0.5));
    }
}
