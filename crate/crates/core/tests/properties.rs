use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dts_core::consistency::degree;
use dts_core::control::{classical_decide, enter_safe_mode, ua_decide, ControlBand, ControllerState};
use dts_core::harness::csv::fmt_float;
use dts_core::harness::scenario::{parse, render};
use dts_core::harness::{Approach, FailureSpec, ScenarioConfig};
use dts_core::mitigation::fuse;
use dts_core::plant::{reset_state, step_dt, step_gt, PlantParams, PlantState, SolverConfig};
use dts_core::sensing::{average, sample, SensorId, SensorModel};
use dts_core::uncertain::{lt_prob, UncertainReal};

fn ur() -> impl Strategy<Value = UncertainReal> {
    (-100.0..100.0f64, 0.001..10.0f64).prop_map(|(m, s)| UncertainReal::new(m, s))
}

fn temp_state() -> impl Strategy<Value = PlantState> {
    (15.0..45.0f64, 0.0..40.0f64, 0.0..0.5f64, 0.0..0.5f64).prop_map(|(b, lift, sb, sh)| PlantState {
        t_box: UncertainReal::new(b, sb),
        t_heater: UncertainReal::new(b + lift, sh),
        time: 0.0,
    })
}

proptest! {
    #[test]
    fn addition_propagates_in_quadrature(a in ur(), b in ur()) {
        let s = a + b;
        prop_assert_eq!(s.mean(), a.mean() + b.mean());
        prop_assert!((s.std() - a.std().hypot(b.std())).abs() <= 1e-12 * s.std());
        prop_assert_eq!(a + b, b + a);
        let d = a - b;
        prop_assert_eq!(d.std(), s.std());
    }

    #[test]
    fn scaling_uses_absolute_factor(a in ur(), k in -50.0..50.0f64) {
        let s = a * k;
        prop_assert_eq!(s.mean(), a.mean() * k);
        prop_assert!((s.std() - k.abs() * a.std()).abs() <= 1e-12 * (1.0 + s.std()));
    }

    #[test]
    fn comparison_probabilities_are_complementary(a in ur(), b in ur()) {
        let p = lt_prob(a, b).confidence();
        let q = lt_prob(b, a).confidence();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p + q - 1.0).abs() < 1e-12);
        prop_assert_eq!(p >= 0.5, a.mean() <= b.mean() || (p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn comparison_is_monotone_in_the_gap(a in ur(), b in ur(), shift in 0.0..5.0f64) {
        let moved = UncertainReal::new(b.mean() + shift, b.std());
        prop_assert!(lt_prob(a, moved).confidence() >= lt_prob(a, b).confidence());
    }

    #[test]
    fn fusion_is_at_least_as_certain(p in ur(), d in ur()) {
        let f = fuse(p, d).unwrap();
        prop_assert!(f.std() <= p.std().min(d.std()) * (1.0 + 1e-12));
        let (lo, hi) = (p.mean().min(d.mean()), p.mean().max(d.mean()));
        prop_assert!(f.mean() >= lo - 1e-9 && f.mean() <= hi + 1e-9);
        let g = fuse(d, p).unwrap();
        prop_assert!((f.mean() - g.mean()).abs() < 1e-9);
        prop_assert!((f.std() - g.std()).abs() < 1e-12);
    }

    #[test]
    fn degree_is_a_bounded_symmetric_similarity(a in ur(), b in ur(), k in 0.5..4.0f64) {
        let d = degree(a, b, k);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, degree(b, a, k));
        prop_assert_eq!(degree(a, a, k), 1.0);
    }

    #[test]
    fn degree_is_invariant_under_translation_and_scaling(
        a in ur(), b in ur(), shift in -50.0..50.0f64, scale in 0.1..10.0f64
    ) {
        let d = degree(a, b, 2.0);
        let t = |u: UncertainReal| UncertainReal::new(u.mean() * scale + shift, u.std() * scale);
        let e = degree(t(a), t(b), 2.0);
        // a shared interval endpoint can flip between touching and overlapping
        prop_assert!((d - e).abs() < 1e-6, "{} vs {}", d, e);
    }

    #[test]
    fn readings_stay_within_accuracy(truth in 0.0..60.0f64, acc in 0.0..2.0f64, seed: u64) {
        let m = SensorModel::new(acc, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..32 {
            let r = sample(truth, i as f64, SensorId::Box(0), &m, &mut rng);
            prop_assert!((r.raw - truth).abs() <= acc + 1e-12);
        }
    }

    #[test]
    fn averaging_equal_sensors_divides_by_root_n(mean in 0.0..50.0f64, s in 0.01..2.0f64, n in 1usize..16) {
        let avg = average(&vec![UncertainReal::new(mean, s); n]).unwrap();
        prop_assert!((avg.std() - s / (n as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn crisp_uncertainty_aware_control_matches_classical(t in 30.0..44.0f64, on: bool) {
        let band = ControlBand::default();
        prop_assume!(t != band.t_low && t != band.t_high);
        let st = ControllerState { heater_on: on, ..Default::default() };
        prop_assert_eq!(
            ua_decide(UncertainReal::crisp(t), st, &band, 0.0),
            classical_decide(t, st, &band, 0.0)
        );
    }

    #[test]
    fn safe_mode_never_heats(temps in prop::collection::vec((0.0..60.0f64, 0.0..1.0f64), 1..50)) {
        let band = ControlBand::default();
        let mut st = enter_safe_mode(ControllerState { heater_on: true, ..Default::default() });
        for (i, (t, s)) in temps.into_iter().enumerate() {
            st = if i % 2 == 0 {
                ua_decide(UncertainReal::new(t, s), st, &band, i as f64)
            } else {
                classical_decide(t, st, &band, i as f64)
            };
            prop_assert!(st.safe_mode && !st.heater_on);
        }
    }

    #[test]
    fn crisp_dt_step_is_plain_euler(state in temp_state(), on: bool) {
        let p = PlantParams::default().crisp();
        let solver = SolverConfig { h: 0.1, k_num: 0.0, sigma_init: 0.0 };
        let crisp = PlantState {
            t_box: UncertainReal::crisp(state.t_box.mean()),
            t_heater: UncertainReal::crisp(state.t_heater.mean()),
            time: 0.0,
        };
        let next = step_dt(&crisp, on, &p, &solver).unwrap();
        prop_assert!(next.is_crisp());
        // independent Euler step
        let (tb, th) = (crisp.t_box.mean(), crisp.t_heater.mean());
        let power = if on { 36.0 } else { 0.0 };
        let to_air = 1.92343277 * (th - tb);
        let to_room = 0.79154106 * (tb - 21.0);
        let eb = tb + 0.1 * ((to_air - to_room) / 145.69782402);
        let eh = th + 0.1 * ((power - to_air) / 227.76228512);
        prop_assert!((next.t_box.mean() - eb).abs() < 1e-12);
        prop_assert!((next.t_heater.mean() - eh).abs() < 1e-12);
    }

    #[test]
    fn dt_step_grows_small_uncertainty(state in temp_state(), on: bool) {
        let solver = SolverConfig::default();
        let small = PlantState {
            t_box: UncertainReal::new(state.t_box.mean(), 0.005),
            t_heater: UncertainReal::new(state.t_heater.mean(), 0.005),
            time: 0.0,
        };
        let next = step_dt(&small, on, &PlantParams::default(), &solver).unwrap();
        prop_assert!(next.t_box.std() > 0.005);
        prop_assert!(next.t_heater.std() > 0.005);
    }

    #[test]
    fn gt_steps_are_crisp_and_pure(state in temp_state(), on: bool, h in 0.001..1.0f64) {
        let p = PlantParams::default();
        let s = PlantState::at_temperature(state.t_box.mean());
        let a = step_gt(&s, on, &p, h);
        prop_assert!(a.is_crisp());
        prop_assert_eq!(a, step_gt(&s, on, &p, h));
    }

    #[test]
    fn resets_never_increase_uncertainty(state in temp_state(), m in 15.0..45.0f64, s in 0.0..1.0f64) {
        match reset_state(&state, UncertainReal::new(m, s)) {
            Ok(next) => {
                prop_assert!(next.t_box.std() <= state.t_box.std());
                prop_assert_eq!(next.t_heater, state.t_heater);
                prop_assert_eq!(next.time, state.time);
            }
            Err(_) => prop_assert!(s > state.t_box.std()),
        }
    }

    #[test]
    fn csv_floats_keep_nine_significant_digits(m in 1.0..10.0f64, e in -20i32..15, neg: bool) {
        let x = if neg { -m } else { m } * 10f64.powi(e);
        let back: f64 = fmt_float(x).parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5.000001e-9, "{} -> {}", x, back);
    }

    #[test]
    fn scenarios_round_trip(
        approach in prop::sample::select(Approach::ALL.to_vec()),
        seed: u64,
        runs in 1usize..500,
        confidence in 0.5..0.999f64,
        limit in 0.1..1.0f64,
        fail in prop::option::of(100.0..2000.0f64),
    ) {
        let mut cfg = ScenarioConfig { approach, seed, runs, ..Default::default() };
        cfg.band.confidence = confidence;
        cfg.fusion.reliability_limit = limit;
        cfg.failure = fail.map(|time| FailureSpec { time, ..Default::default() });
        let back = parse(&render(&cfg), std::path::Path::new("prop.scn")).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
