use proptest::prelude::*;

use nlbm_core::levy_symbols::LevySymbol;
use nlbm_core::nonlocal_operators::{marchaud, Side, SpatialFunction};
use nlbm_core::resolvent_lab::{full_resolvent, ProcessKind, ProcessParams, TestFunction};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn marchaud_is_linear(alpha in 0.2f64..0.8, a in -2.0f64..2.0, b in -2.0f64..2.0, x in -1.0f64..1.0) {
        let sym = LevySymbol::stable(alpha).unwrap();
        let u = SpatialFunction::gaussian(0.0, 1.0);
        let v = SpatialFunction::gaussian(0.5, 0.7);
        let w = SpatialFunction::combine(a, &u, b, &v);
        for side in [Side::Left, Side::Right] {
            let lhs = marchaud(&sym, &w, x, side).unwrap().value;
            let rhs = a * marchaud(&sym, &u, x, side).unwrap().value + b * marchaud(&sym, &v, x, side).unwrap().value;
            prop_assert!((lhs - rhs).abs() < 1e-7 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn marchaud_commutes_with_translation(alpha in 0.2f64..0.8, h in -1.0f64..1.0, x in -1.0f64..1.0) {
        let sym = LevySymbol::stable(alpha).unwrap();
        let u = SpatialFunction::gaussian(0.2, 0.8);
        let shifted = u.shifted(h);
        for side in [Side::Left, Side::Right] {
            let lhs = marchaud(&sym, &shifted, x, side).unwrap().value;
            let rhs = marchaud(&sym, &u, x - h, side).unwrap().value;
            prop_assert!((lhs - rhs).abs() < 1e-7 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn symbols_are_bernstein(alpha in 0.05f64..0.95, lam in 0.01f64..50.0, step in 0.01f64..5.0) {
        let sym = LevySymbol::stable(alpha).unwrap();
        let (a, b, c) = (sym.phi(lam).unwrap(), sym.phi(lam + step).unwrap(), sym.phi(lam + 2.0 * step).unwrap());
        prop_assert!(a > 0.0 && b > a && c > b);
        prop_assert!(b - a >= c - b);
    }

    #[test]
    fn resolvents_are_conservative(
        alpha in 0.2f64..0.8, nu in 0.0f64..=1.0, eta in 0.1f64..3.0, lam in 0.1f64..10.0, x in 0.0f64..2.0, k in 0usize..7,
    ) {
        let kind = ProcessKind::ALL[k];
        let params = ProcessParams::new(LevySymbol::stable(alpha).unwrap(), nu, eta).unwrap();
        let xs = if kind.is_one_sided() { vec![x] } else { vec![x, -x] };
        for x in xs {
            let v = full_resolvent(kind, &params, &TestFunction::One, x, lam).unwrap();
            prop_assert!((v * lam - 1.0).abs() < 1e-9, "{kind} x={x}: λR1 = {}", v * lam);
        }
    }

    #[test]
    fn resolvents_are_positive_and_monotone_in_f(c in 0.2f64..3.0, lam in 0.2f64..5.0, k in 0usize..7) {
        let kind = ProcessKind::ALL[k];
        let params = ProcessParams::new(LevySymbol::stable(0.5).unwrap(), 0.6, 1.0).unwrap();
        let small = TestFunction::ExpDecay { c: 2.0 * c };
        let large = TestFunction::ExpDecay { c };
        let a = full_resolvent(kind, &params, &small, 0.3, lam).unwrap();
        let b = full_resolvent(kind, &params, &large, 0.3, lam).unwrap();
        prop_assert!(a > 0.0 && b > a && b < 1.0 / lam);
    }
}
