//! Property tests over randomly drawn networks and schemes.

use fdnet::analytic::{Analyzer, BoundKind};
use fdnet::cli::keys::{parse_quantity, Dimension};
use fdnet::cli::output::fmt_sig;
use fdnet::model::{linear_to_db, NetworkConfig};
use fdnet::optimizer::{optimize, Objective, OptimizationProblem, SchemeFamily};
use fdnet::power_control::{marginal_distribution, moment_delta};
use fdnet::PowerControlScheme;
use proptest::prelude::*;

fn network() -> impl Strategy<Value = NetworkConfig> {
    (
        1e-7..1e-5f64,
        0.5..50.0f64,
        2.3..5.0f64,
        prop_oneof![Just(0.0), (-140.0..-60.0f64).prop_map(|db| 10f64.powf(db / 10.0))],
        0.05..1.0f64,
        0.5..20.0f64,
    )
        .prop_map(|(lambda_bs, ratio, alpha, beta, p_ue, p_max)| NetworkConfig {
            lambda_bs,
            lambda_ue: ratio * lambda_bs,
            alpha,
            beta,
            p_ue,
            p_max,
            p_min: 0.1 * p_max,
            ..NetworkConfig::default()
        })
}

fn scheme(cfg: &NetworkConfig) -> impl Strategy<Value = PowerControlScheme> {
    let p_max = cfg.p_max;
    prop_oneof![
        Just(PowerControlScheme::Cpc),
        (0.0..1.0f64).prop_map(move |f| PowerControlScheme::Upc {
            p_min: f * p_max,
            p_max,
        }),
        (0.0..1.0f64, -6.0..0.0f64).prop_map(move |(epsilon, lg)| PowerControlScheme::Fpc {
            p_bar: p_max * 10f64.powf(lg),
            epsilon,
        }),
        (0.01..1.0f64, 0.0..1.0f64).prop_map(move |(f, xi)| PowerControlScheme::Apc {
            p_bar: f * p_max,
            xi,
        }),
    ]
}

fn network_and_scheme() -> impl Strategy<Value = (NetworkConfig, PowerControlScheme)> {
    network().prop_flat_map(|cfg| {
        let s = scheme(&cfg);
        (Just(cfg), s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_transforms_are_ordered((cfg, scheme) in network_and_scheme(), log_s in -2.0..14.0f64) {
        let a = Analyzer::new(&cfg, &scheme).unwrap();
        let s = 10f64.powf(log_s);
        let lo = a.laplace_bound(s, BoundKind::Lower);
        let hi = a.laplace_bound(s, BoundKind::Upper);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= hi * (1.0 + 1e-12), "{lo} > {hi}");
    }

    #[test]
    fn bound_coverages_are_ordered_probabilities((cfg, scheme) in network_and_scheme()) {
        let a = Analyzer::new(&cfg, &scheme).unwrap();
        for (lo, hi) in [
            (a.coverage_ul(BoundKind::Lower).unwrap(), a.coverage_ul(BoundKind::Upper).unwrap()),
            (a.coverage_dl(BoundKind::Lower).unwrap(), a.coverage_dl(BoundKind::Upper).unwrap()),
        ] {
            prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
            prop_assert!(lo <= hi + 1e-9, "{lo} > {hi}");
        }
    }

    #[test]
    fn more_self_interference_never_helps((cfg, scheme) in network_and_scheme(), bump in 1.5..100.0f64) {
        let worse = NetworkConfig { beta: (cfg.beta * bump).max(1e-14), ..cfg.clone() };
        for kind in [BoundKind::Lower, BoundKind::Upper] {
            let a = Analyzer::new(&cfg, &scheme).unwrap();
            let b = Analyzer::new(&worse, &scheme).unwrap();
            prop_assert!(b.coverage_ul(kind).unwrap() <= a.coverage_ul(kind).unwrap() + 1e-12);
            prop_assert!(b.coverage_dl(kind).unwrap() <= a.coverage_dl(kind).unwrap() + 1e-12);
        }
    }

    #[test]
    fn delta_moment_respects_jensen((cfg, scheme) in network_and_scheme()) {
        let d = cfg.delta().value();
        let m = marginal_distribution(&scheme, &cfg);
        let md = moment_delta(&m, d);
        prop_assert!(md <= m.mean().powf(d) * (1.0 + 1e-9) + 1e-300);
        prop_assert!(md >= 0.0);
    }

    #[test]
    fn power_never_exceeds_peak((cfg, scheme) in network_and_scheme()) {
        let (lo, hi) = marginal_distribution(&scheme, &cfg).support();
        prop_assert!(lo >= 0.0 && hi <= cfg.p_max * (1.0 + 1e-12));
        prop_assert!(scheme.mean_power(&cfg) <= cfg.p_max * (1.0 + 1e-12));
    }

    #[test]
    fn formatted_numbers_round_trip(x in prop_oneof![-1e12..1e12f64, -1e-3..1e-3f64]) {
        let y: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((y - x).abs() <= 5e-9 * x.abs(), "{x} -> {}", fmt_sig(x));
    }

    #[test]
    fn decibel_inputs_round_trip(x in 1e-15..1e3f64) {
        let back = parse_quantity(&format!("{} dB", linear_to_db(x)), Dimension::Ratio).unwrap();
        prop_assert!((back - x).abs() <= 1e-12 * x);
        let watts = parse_quantity(&format!("{}dBm", linear_to_db(x) + 30.0), Dimension::Power).unwrap();
        prop_assert!((watts - x).abs() <= 1e-12 * x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimum_stays_in_its_box(
        cfg in network(),
        family in prop::sample::select(SchemeFamily::ALL.to_vec()),
        dl_demand in 0.5..4.0f64,
    ) {
        let problem = OptimizationProblem::new(family, &cfg, Objective::MaxMinRate { dl_demand, ul_demand: 1.0 })
            .with_grid_points(8);
        let res = optimize(&problem, &cfg).unwrap();
        for (x, r) in res.best.params.iter().zip(&problem.ranges) {
            prop_assert!(*x >= r.lo && *x <= r.hi, "{x} outside [{}, {}]", r.lo, r.hi);
        }
        // Ties within 1e-12 go to the lower mean power.
        let slack = 1e-12 * res.best.value.abs();
        for t in &res.trace {
            prop_assert!(t.value <= res.best.value + slack, "{} beats best {}", t.value, res.best.value);
        }
        prop_assert!(res.trace.contains(&res.best));
    }
}
