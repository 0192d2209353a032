use nlbm_core::levy_symbols::LevySymbol;
use nlbm_core::path_engine::rng::{stream_rng, Component};
use nlbm_core::path_engine::{
    apply_signs, build_sticky, compose_bullet, excursions_of_bullet, excursions_of_reflected, excursions_of_sticky,
    simulate_reflected, skew_signs, IntervalKind, SkewConfig, SubordinatorPath,
};
use nlbm_core::resolvent_lab::{simulate_path, McSettings, ProcessKind, ProcessParams};

fn reflected(seed: u64, horizon: f64) -> nlbm_core::path_engine::ReflectedPath {
    simulate_reflected(0.0, horizon, 1e-3, &mut stream_rng(seed, 0, Component::Brownian)).unwrap()
}

#[test]
fn nu_one_keeps_every_excursion_positive() {
    let rp = reflected(1, 2.0);
    let cfg = SkewConfig::new(1.0, 0.0, 1).unwrap();
    let dec = skew_signs(&excursions_of_reflected(&rp), &cfg, &mut stream_rng(1, 0, Component::Signs)).unwrap();
    assert!(dec.intervals.iter().all(|iv| iv.sign == 1.0));
    assert!(dec.excursion_count() > 5);
    let signed = apply_signs(&rp.reflected, &dec).unwrap();
    assert_eq!(signed.values, rp.reflected.values);

    let cfg = SkewConfig::new(0.0, 0.0, 1).unwrap();
    let dec = skew_signs(&excursions_of_reflected(&rp), &cfg, &mut stream_rng(1, 0, Component::Signs)).unwrap();
    let signed = apply_signs(&rp.reflected, &dec).unwrap();
    assert!(signed.values.iter().all(|v| *v <= 0.0));
}

#[test]
fn excursions_tile_the_grid() {
    let rp = reflected(2, 1.0);
    let dec = excursions_of_reflected(&rp);
    assert_eq!(dec.intervals[0].start_index, 0);
    for w in dec.intervals.windows(2) {
        assert_eq!(w[0].end_index, w[1].start_index);
        assert!(w[0].start < w[1].start);
    }
    assert_eq!(dec.intervals.last().unwrap().end_index, rp.reflected.len());
}

#[test]
fn bullet_dominates_reflected_and_stays_nonnegative() {
    let sym = LevySymbol::stable(0.5).unwrap();
    for seed in 0..5 {
        let rp = reflected(seed, 2.0);
        let mut sub = SubordinatorPath::new(&sym, 1e-4).unwrap();
        let path = compose_bullet(&rp, &mut sub, &mut stream_rng(seed, 0, Component::Subordinator)).unwrap();
        assert!(path.min_value() >= 0.0);
        for (b, r) in path.values.iter().zip(&rp.reflected.values) {
            assert!(b + 1e-12 >= *r);
        }
        // Excursions of B• are unions of excursions of B⁺.
        assert!(excursions_of_bullet(&rp, &sub).excursion_count() <= excursions_of_reflected(&rp).excursion_count());
    }
}

#[test]
fn identity_subordinator_gives_reflected_motion() {
    let rp = reflected(3, 1.0);
    let mut sub = SubordinatorPath::identity();
    let path = compose_bullet(&rp, &mut sub, &mut stream_rng(3, 0, Component::Subordinator)).unwrap();
    for (b, r) in path.values.iter().zip(&rp.reflected.values) {
        assert!((b - r).abs() < 1e-12);
    }
}

#[test]
fn paths_are_deterministic_per_seed_and_index() {
    let params = ProcessParams::new(LevySymbol::stable(0.6).unwrap(), 0.4, 0.8).unwrap();
    let mc = McSettings {
        seed: 99,
        ..McSettings::default()
    };
    for kind in ProcessKind::ALL {
        let a = simulate_path(kind, &params, 0.0, 0.5, &mc, 3).unwrap();
        let b = simulate_path(kind, &params, 0.0, 0.5, &mc, 3).unwrap();
        let c = simulate_path(kind, &params, 0.0, 0.5, &mc, 4).unwrap();
        assert_eq!(a.values, b.values, "{kind}");
        assert_ne!(a.values, c.values, "{kind}");
        if kind.is_one_sided() {
            assert!(a.min_value() >= 0.0, "{kind}");
        }
    }
}

#[test]
fn sticky_clock_with_drift_subordinator() {
    // H(s) = 2s turns the clock into T_u = u + 2ηγ_u.
    let rp = reflected(5, 1.0);
    let eta = 0.5;
    let mut sub = SubordinatorPath::deterministic(2.0, &[]).unwrap();
    let query: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
    let sp = build_sticky(&rp, &mut sub, eta, &query, &mut stream_rng(5, 0, Component::Subordinator)).unwrap();
    for ((&c, &u), &g) in sp.clock.iter().zip(&rp.local_time.t_grid).zip(&rp.local_time.values) {
        assert!((c - (u + 2.0 * eta * g)).abs() < 1e-12);
    }
    assert!(sp.path.min_value() >= 0.0);
    let dec = excursions_of_sticky(&sp);
    assert_eq!(dec.intervals.last().unwrap().end_index, query.len());
}

#[test]
fn vanishing_stickiness_recovers_reflected_path() {
    let sym = LevySymbol::stable(0.5).unwrap();
    let rp = reflected(6, 1.0);
    let mut sub = SubordinatorPath::new(&sym, 1e-4).unwrap();
    let query = rp.reflected.t_grid[..900].to_vec();
    let sp = build_sticky(&rp, &mut sub, 1e-12, &query, &mut stream_rng(6, 0, Component::Subordinator)).unwrap();
    let gap = sp
        .path
        .values
        .iter()
        .zip(&rp.reflected.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-3, "{gap}");
    assert!(excursions_of_sticky(&sp).intervals.iter().all(|iv| iv.kind == IntervalKind::Excursion));
}
