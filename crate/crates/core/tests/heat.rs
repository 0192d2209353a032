use nlbm_core::heat_interface_solver::{
    classical_limit_report, skew_interface_residual, sticky_interface_residual, HeatSolution, LimitProbe,
};
use nlbm_core::levy_symbols::LevySymbol;
use nlbm_core::resolvent_lab::{ProcessKind, ProcessParams, TestFunction};

fn sticky_solution(f: &str) -> HeatSolution {
    let params = ProcessParams::new(LevySymbol::stable(0.5).unwrap(), 0.7, 1.0).unwrap();
    HeatSolution::new(ProcessKind::SkewSticky, params, TestFunction::parse(f).unwrap(), 1.2).unwrap()
}

#[test]
fn maximum_principle() {
    let sol = sticky_solution("gaussian");
    for t in [0.2, 0.6, 1.0] {
        for x in [-1.5, -0.3, 0.0, 0.4, 2.0] {
            let u = sol.representation(t, x).unwrap().u;
            assert!((-1e-6..=1.0 + 1e-6).contains(&u), "u({t},{x}) = {u}");
        }
    }
}

#[test]
fn heat_equation_away_from_the_interface() {
    let sol = sticky_solution("gaussian");
    let u = |t: f64, x: f64| sol.representation(t, x).unwrap().u;
    let (h, k) = (0.05, 0.01);
    for x in [0.5, -0.5] {
        let ut = (u(1.0 + k, x) - u(1.0 - k, x)) / (2.0 * k);
        let uxx = (u(1.0, x + h) - 2.0 * u(1.0, x) + u(1.0, x - h)) / (h * h);
        assert!((ut - uxx).abs() < 1e-2, "x = {x}: u_t = {ut}, u_xx = {uxx}");
    }
}

#[test]
fn continuous_at_zero_and_initial_value() {
    let sol = sticky_solution("gaussian:center=0.3,width=1");
    let zero = sol.representation(0.8, 0.0).unwrap();
    for x in [1e-6, -1e-6] {
        let v = sol.representation(0.8, x).unwrap().u;
        assert!((v - zero.u).abs() < 1e-4, "{v} vs {}", zero.u);
    }
    let f = TestFunction::parse("gaussian:center=0.3,width=1").unwrap();
    let early = sol.representation(1e-4, 1.0).unwrap().u;
    assert!((early - f.eval(1.0)).abs() < 1e-3, "{early}");
}

#[test]
fn interface_conditions_hold_for_asymmetric_data() {
    let sym = LevySymbol::stable(0.6).unwrap();
    for key in ["gaussian:center=0.7,width=0.5", "exp_decay_pos:c=1.5", "indicator:a=-0.3,b=1.2"] {
        let f = TestFunction::parse(key).unwrap();
        for nu in [0.2, 0.8] {
            let s = skew_interface_residual(&sym, nu, &f, 2.0).unwrap();
            assert!(s.relative() < 1e-3, "{key} skew ν={nu}: {s:?}");
            for eta in [0.0, 0.7] {
                let d = sticky_interface_residual(&sym, nu, eta, &f, 2.0).unwrap();
                assert!(d.relative() < 1e-3, "{key} sticky ν={nu} η={eta}: {d:?}");
            }
        }
    }
}

#[test]
fn gaps_shrink_towards_the_classical_limit() {
    let report = classical_limit_report(&[0.8, 0.95, 0.995], &LimitProbe::default()).unwrap();
    assert!(report.passed(), "{report:?}");
    let probe = LimitProbe {
        lam: 1.0,
        ..LimitProbe::default()
    };
    let flat = classical_limit_report(&[0.8, 0.95], &probe).unwrap();
    assert!(flat.rows.iter().all(|r| r.dynamic_gap < 1e-12));
    assert!(classical_limit_report(&[0.9, 0.8], &LimitProbe::default()).is_err());
}
