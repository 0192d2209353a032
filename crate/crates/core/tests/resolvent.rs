use nlbm_core::levy_symbols::LevySymbol;
use nlbm_core::resolvent_lab::{
    bm_resolvent, compose_full, full_resolvent, full_resolvent_truncated, mc_resolvent, one_sided_derivative,
    zero_resolvent, Branch, McSettings, ProcessKind, ProcessParams, TestFunction,
};

fn params() -> ProcessParams {
    ProcessParams::new(LevySymbol::stable(0.5).unwrap(), 0.7, 1.0).unwrap()
}

#[test]
fn free_resolvent_of_exponential() {
    // R_λ e^{-c|·|}(0) for the generator ∂²_x: ∫ e^{-√λ|y|}/(2√λ) e^{-c|y|} dy = 1/(√λ(√λ + c)).
    let f = TestFunction::parse("exp_decay:c=2").unwrap();
    for lam in [0.5f64, 1.0, 9.0] {
        let r = lam.sqrt();
        let v = bm_resolvent(&f, 0.0, lam).unwrap();
        assert!((v - 1.0 / (r * (r + 2.0))).abs() < 1e-10, "{lam}: {v}");
    }
}

#[test]
fn reflected_and_free_resolvents_agree_for_even_data() {
    let f = TestFunction::parse("gaussian:center=0,width=0.7").unwrap();
    let p = params();
    for lam in [0.5, 2.0] {
        let refl = zero_resolvent(ProcessKind::Reflected, &p, &f, lam).unwrap();
        let free = bm_resolvent(&f, 0.0, lam).unwrap();
        assert!((refl - free).abs() < 1e-10 * free, "{refl} vs {free}");
    }
}

#[test]
fn one_sided_derivatives_match_finite_differences() {
    let f = TestFunction::parse("gaussian:center=0.4,width=1").unwrap();
    let p = params();
    let lam = 2.0;
    let h = 1e-4;
    for kind in [ProcessKind::SkewBullet, ProcessKind::SkewSticky, ProcessKind::Skew] {
        let zero = zero_resolvent(kind, &p, &f, lam).unwrap();
        let at = |x: f64| compose_full(&f, x, lam, zero).unwrap();
        let right = (-3.0 * at(0.0) + 4.0 * at(h) - at(2.0 * h)) / (2.0 * h);
        let left = (3.0 * at(0.0) - 4.0 * at(-h) + at(-2.0 * h)) / (2.0 * h);
        let d_plus = one_sided_derivative(&f, lam, zero, Branch::Positive).unwrap();
        let d_minus = one_sided_derivative(&f, lam, zero, Branch::Negative).unwrap();
        assert!((right - d_plus).abs() < 1e-6, "{kind}: {right} vs {d_plus}");
        assert!((left - d_minus).abs() < 1e-6, "{kind}: {left} vs {d_minus}");
    }
}

#[test]
fn resolvent_is_continuous_at_the_interface() {
    let f = TestFunction::parse("indicator:a=-0.5,b=1").unwrap();
    let p = params();
    for kind in ProcessKind::ALL.into_iter().filter(|k| !k.is_one_sided()) {
        let zero = full_resolvent(kind, &p, &f, 0.0, 1.0).unwrap();
        for x in [1e-7, -1e-7] {
            let v = full_resolvent(kind, &p, &f, x, 1.0).unwrap();
            assert!((v - zero).abs() < 1e-6, "{kind} at {x}");
        }
    }
}

#[test]
fn monte_carlo_matches_analytic_resolvents() {
    let p = params();
    let f = TestFunction::parse("gaussian").unwrap();
    let mc = McSettings {
        n_paths: 3000,
        seed: 17,
        ..McSettings::default()
    };
    let cases = [
        (ProcessKind::Bm, 0.3, 1.0),
        (ProcessKind::Skew, -0.4, 2.0),
        (ProcessKind::Bullet, 0.0, 2.0),
        (ProcessKind::SkewBullet, 0.5, 2.0),
        (ProcessKind::Sticky, 0.0, 2.0),
        (ProcessKind::SkewSticky, -0.2, 2.0),
    ];
    for (kind, x, lam) in cases {
        let analytic = full_resolvent(kind, &p, &f, x, lam).unwrap();
        let bias = (full_resolvent_truncated(kind, &p, &f, x, lam, mc.eps_trunc).unwrap() - analytic).abs();
        let est = mc_resolvent(kind, &p, &f, x, lam, &mc).unwrap();
        assert!(
            est.agrees_with(analytic, bias),
            "{kind} x={x}: mc {} ± {} vs {analytic}",
            est.value,
            est.std_error
        );
    }
}

#[test]
fn starts_outside_the_state_space_are_rejected() {
    let p = params();
    let f = TestFunction::One;
    assert!(full_resolvent(ProcessKind::Bullet, &p, &f, -0.1, 1.0).is_err());
    assert!(mc_resolvent(ProcessKind::Sticky, &p, &f, -0.1, 1.0, &McSettings::default()).is_err());
    assert!(full_resolvent(ProcessKind::Skew, &p, &f, 0.0, -1.0).is_err());
}
