use std::f64::consts::PI;

use proptest::prelude::*;

use lienard_core::amplitude::{alpha_bar_from_y0, residual, solve_alpha};
use lienard_core::asymptotics::{canonical_to_lienard, lienard_to_canonical, phi, PhiProblem};
use lienard_core::builtin;
use lienard_core::cycles::{find_limit_cycles, half_return, CycleOptions, Stability};
use lienard_core::integrator::{
    integrate, path_potential_delta, Direction, EventKind, EventSpec, PhaseState, StepControl,
};
use lienard_core::model_file;
use lienard_core::report::{render_table, sig10, TableRow};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn orbit_piece(
    mu: f64,
    y0: f64,
    crossings: usize,
) -> (
    lienard_core::LienardSystem,
    lienard_core::integrator::Trajectory,
) {
    let s = builtin::vdp(mu).unwrap();
    let t = integrate(
        &s,
        PhaseState::new(0.0, 0.0, y0),
        EventSpec::new(EventKind::YAxisCross, Direction::Any, crossings),
        &StepControl::default(),
    )
    .unwrap();
    (s, t)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn energy_identity(mu in 0.1..5.0f64, y0 in 0.1..5.0f64, n in 1usize..=3) {
        let (s, t) = orbit_piece(mu, y0, n);
        let p = path_potential_delta(&s, &t).unwrap();
        prop_assert!((p.delta_v - p.integral_f_dy).abs() <= 1e-8, "{p:?}");
        prop_assert!((p.delta_v - p.integral_gf_dt).abs() <= 1e-8, "{p:?}");
    }

    #[test]
    fn quintic_energy_identity(k in 3.0..3.6f64, y0 in 0.1..0.65f64) {
        let s = builtin::quintic(k, 0.1).unwrap();
        let t = integrate(
            &s,
            PhaseState::new(0.0, 0.0, y0),
            EventSpec::new(EventKind::YAxisCross, Direction::Any, 2),
            &StepControl::default(),
        )
        .unwrap();
        let p = path_potential_delta(&s, &t).unwrap();
        prop_assert!((p.delta_v - p.integral_f_dy).abs() <= 1e-8, "{p:?}");
    }

    #[test]
    fn orbits_are_odd_symmetric(mu in 0.1..5.0f64, y0 in 0.2..4.0f64) {
        let s = builtin::vdp(mu).unwrap();
        let ctrl = StepControl::default();
        let up = half_return(&s, y0, &ctrl).unwrap();
        let t = integrate(
            &s,
            PhaseState::new(0.0, 0.0, -y0),
            EventSpec::new(EventKind::YAxisCross, Direction::Rising, 1),
            &ctrl,
        )
        .unwrap();
        prop_assert!((t.last().y - up).abs() <= 1e-8);
    }

    #[test]
    fn half_return_is_increasing(mu in 0.1..3.0f64, a in 0.2..3.0f64, gap in 0.01..1.0f64) {
        let s = builtin::vdp(mu).unwrap();
        let ctrl = StepControl::default();
        prop_assert!(half_return(&s, a, &ctrl).unwrap() < half_return(&s, a + gap, &ctrl).unwrap());
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn alpha_bar_solves_its_equation(mu in 0.05..10.0f64, y0 in 1.8..8.0f64) {
        let s = builtin::vdp(mu).unwrap();
        let lo = 3f64.sqrt();
        prop_assume!(residual(&s, y0, lo) < 0.0);
        let a = solve_alpha(&s, y0, (lo, f64::INFINITY)).unwrap();
        prop_assert!(residual(&s, y0, a).abs() <= 1e-9 * y0 * y0);
        // Smallest root: the residual stays negative on [lo, a).
        for i in 0..50 {
            let x = lo + (a - lo) * i as f64 / 50.0;
            prop_assert!(residual(&s, y0, x) < 0.0);
        }
    }

    #[test]
    fn symmetric_intercepts_give_equal_roots(k in 3.0..3.6f64, y0 in 0.5..0.75f64) {
        let s = builtin::quintic(k, 0.1).unwrap();
        let z = s.zero_structure().unwrap();
        let bracket = (z.zeros[0], z.zeros[1]);
        prop_assume!(residual(&s, y0, bracket.0) < 0.0 && residual(&s, y0, bracket.1) > 0.0);
        let r = alpha_bar_from_y0(&s, y0, bracket).unwrap();
        prop_assert!((r.alpha_prime - r.alpha_double_prime).abs() <= 1e-10);
        prop_assert_eq!(r.alpha_bar, r.alpha_prime);
    }

    #[test]
    fn phi_matches_closed_form(r in 0.05..1.2f64, k in 0.5..5.0f64) {
        let p = PhiProblem::quintic(k, 0.1, (0.05, 1.2)).unwrap();
        let exact = -(PI * r / 4.0) * (25.0 * k * r.powi(4) - 75.0 * r * r + 16.0);
        prop_assert!((phi(&p, r).unwrap() - exact).abs() <= 1e-10);
    }

    #[test]
    fn plane_maps_are_inverse(k in 0.5..5.0f64, u in -2.0..2.0f64, v in -5.0..5.0f64) {
        let s = builtin::quintic(k, 0.1).unwrap();
        let (x, y) = canonical_to_lienard(u, v, &s.f);
        prop_assert_eq!(x, -u);
        let (u2, v2) = lienard_to_canonical(x, y, &s.f);
        prop_assert!((u2 - u).abs() <= 1e-14 && (v2 - v).abs() <= 1e-12);
    }

    #[test]
    fn sig10_keeps_ten_digits(x in 1e-6..1e6f64) {
        let back: f64 = sig10(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-10 * x);
    }

    #[test]
    fn table_ignores_row_order(
        rows in prop::collection::vec((0.01..10.0f64, 1.0..9.0f64, 1.9..2.1f64), 1..20),
        seed in any::<u64>(),
    ) {
        let rows: Vec<TableRow> = rows
            .into_iter()
            .map(|(mu, y_plus0, alpha_bar)| TableRow { mu, y_plus0, alpha_bar })
            .collect();
        let mut shuffled = rows.clone();
        let n = shuffled.len();
        for i in 0..n {
            shuffled.swap(i, (seed as usize).wrapping_add(i * 7919) % n);
        }
        let a = render_table(&rows).unwrap();
        prop_assert_eq!(&a, &render_table(&shuffled).unwrap());
        prop_assert_eq!(a.lines().count(), n + 1);
    }

    #[test]
    fn model_files_round_trip(mu in 0.01..10.0f64, k in 0.5..5.0f64) {
        for s in [builtin::vdp(mu).unwrap(), builtin::quintic(k, mu).unwrap()] {
            let back = model_file::from_toml(&model_file::to_toml(&s).unwrap()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn nested_cycles_alternate(k in 3.0..3.5f64) {
        let s = builtin::quintic(k, 0.1).unwrap();
        let scan = find_limit_cycles(&s, &CycleOptions::default()).unwrap();
        let kinds: Vec<Stability> = scan.cycles.iter().map(|c| c.stability).collect();
        prop_assert_eq!(kinds, vec![Stability::Stable, Stability::Unstable]);
        for w in scan.cycles.windows(2) {
            prop_assert!(w[0].y_plus0 < w[1].y_plus0 && w[0].amplitude < w[1].amplitude);
        }
        for c in &scan.cycles {
            prop_assert_eq!(c.y_minus0, -c.y_plus0);
            prop_assert!(c.closure_residual <= 1e-8);
        }
    }

    #[test]
    fn van_der_pol_has_one_stable_cycle(mu in 0.1..10.0f64) {
        let s = builtin::vdp(mu).unwrap();
        let scan = find_limit_cycles(&s, &CycleOptions::default()).unwrap();
        prop_assert_eq!(scan.cycles.len(), 1);
        prop_assert_eq!(scan.cycles[0].stability, Stability::Stable);
        // D changes sign once, from + inside to − outside.
        let d: Vec<f64> = scan.samples.iter().map(|p| p.1).filter(|v| v.is_finite()).collect();
        prop_assert!(d.first().unwrap() > &0.0 && d.last().unwrap() < &0.0);
    }
}
