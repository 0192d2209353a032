use super::{Branch, ProcessKind, ProcessParams, TestFunction};
use crate::error::{require_positive, Error, Result};
use crate::levy_symbols::LevySymbol;
use crate::quadrature::{integrate_with_breaks, QuadSettings};

/// Beyond `KERNEL_WIDTH/√λ` the exponential kernels are below `e^{-45}`.
const KERNEL_WIDTH: f64 = 45.0;
/// `|f|` below this counts as outside the support.
const SUPPORT_TOL: f64 = 1e-18;

fn settings() -> QuadSettings {
    QuadSettings::with_tolerances(1e-13, 1e-11)
}

fn measure_settings() -> QuadSettings {
    QuadSettings::with_tolerances(1e-12, 1e-10)
}

/// Support of `z ↦ f(σz)` intersected with `[lo, hi]`.
fn clip(f: &TestFunction, branch: Branch, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (a, b) = f.support(SUPPORT_TOL);
    let (a, b) = match branch {
        Branch::Positive => (a, b),
        Branch::Negative => (-b, -a),
    };
    let (lo, hi) = (lo.max(a), hi.min(b));
    (hi > lo).then_some((lo, hi))
}

fn branch_breaks(f: &TestFunction, branch: Branch) -> Vec<f64> {
    f.breakpoints().into_iter().map(|p| branch.sign() * p).filter(|p| *p > 0.0).collect()
}

/// `∫_0^∞ e^{-√λ y} f(σy) dy`, which is also `∂_{|x|} R^D_λ f` at the origin.
pub fn dirichlet_flux(f: &TestFunction, lam: f64, branch: Branch) -> Result<f64> {
    require_positive("dirichlet_flux", "lambda", lam)?;
    let r = lam.sqrt();
    let Some((lo, hi)) = clip(f, branch, 0.0, KERNEL_WIDTH / r) else {
        return Ok(0.0);
    };
    let s = branch.sign();
    let q = integrate_with_breaks(|z| (-r * z).exp() * f.eval(s * z), lo, hi, &branch_breaks(f, branch), settings())?;
    Ok(q.value)
}

/// `R^D_λ f(σy)` for `y ≥ 0`: Brownian motion started at `σy` and killed at zero.
fn killed(f: &TestFunction, y: f64, r: f64, branch: Branch) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let s = branch.sign();
    let w = KERNEL_WIDTH / r;
    let (a, b) = clip(f, branch, f64::NEG_INFINITY, f64::INFINITY).unwrap_or((0.0, 0.0));
    let kinks = branch_breaks(f, branch);
    // Integrate in the offset from y, so large starting points keep full precision.
    let below = {
        let (lo, hi) = ((y - b).max(0.0), (y - a).min(y).min(w));
        let breaks: Vec<f64> = kinks.iter().map(|p| y - p).collect();
        if hi > lo {
            integrate_with_breaks(
                |o| (-r * o).exp() * -(-2.0 * r * (y - o)).exp_m1() * f.eval(s * (y - o)),
                lo,
                hi,
                &breaks,
                settings(),
            )?
            .value
        } else {
            0.0
        }
    };
    let above = {
        let (lo, hi) = ((a - y).max(0.0), (b - y).min(w));
        let breaks: Vec<f64> = kinks.iter().map(|p| p - y).collect();
        if hi > lo {
            -(-2.0 * r * y).exp_m1()
                * integrate_with_breaks(|o| (-r * o).exp() * f.eval(s * (y + o)), lo, hi, &breaks, settings())?.value
        } else {
            0.0
        }
    };
    let v = (below + above) / (2.0 * r);
    if !v.is_finite() {
        return Err(Error::numeric("dirichlet_resolvent", format!("non-finite value at {}", s * y)));
    }
    Ok(v)
}

/// `R^D_λ f(x) = ∫_0^∞ (e^{-√λ|x-y|} - e^{-√λ(x+y)})/(2√λ) f(y) dy` for `x > 0`.
pub fn dirichlet_resolvent(f: &TestFunction, x: f64, lam: f64) -> Result<f64> {
    require_positive("dirichlet_resolvent", "x", x)?;
    require_positive("dirichlet_resolvent", "lambda", lam)?;
    killed(f, x, lam.sqrt(), Branch::Positive)
}

/// The negative-axis counterpart `R^{-D}_λ f(x)` for `x < 0`.
pub fn dirichlet_resolvent_mirrored(f: &TestFunction, x: f64, lam: f64) -> Result<f64> {
    require_positive("dirichlet_resolvent_mirrored", "-x", -x)?;
    require_positive("dirichlet_resolvent_mirrored", "lambda", lam)?;
    killed(f, -x, lam.sqrt(), Branch::Negative)
}

/// Killed resolvent on the side of `x` (zero at the origin).
pub fn killed_resolvent(f: &TestFunction, x: f64, lam: f64) -> Result<f64> {
    require_positive("killed_resolvent", "lambda", lam)?;
    if !x.is_finite() {
        return Err(Error::parameter("killed_resolvent", format!("x = {x} is not finite")));
    }
    let branch = if x < 0.0 { Branch::Negative } else { Branch::Positive };
    killed(f, x.abs(), lam.sqrt(), branch)
}

/// Free resolvent `∫ e^{-√λ|x-y|}/(2√λ) f(y) dy`.
pub fn bm_resolvent(f: &TestFunction, x: f64, lam: f64) -> Result<f64> {
    require_positive("bm_resolvent", "lambda", lam)?;
    let r = lam.sqrt();
    let w = KERNEL_WIDTH / r;
    let Some((lo, hi)) = clip(f, Branch::Positive, x - w, x + w) else {
        return Ok(0.0);
    };
    let mut breaks = f.breakpoints();
    breaks.push(x);
    let q = integrate_with_breaks(|y| (-r * (x - y).abs()).exp() * f.eval(y), lo, hi, &breaks, settings())?;
    Ok(q.value / (2.0 * r))
}

/// The Lévy measure seen by the formulas: the full measure, or its
/// truncation above `ε` with the removed small jumps turned into drift.
#[derive(Clone, Copy)]
struct View<'a> {
    sym: &'a LevySymbol,
    eps: Option<f64>,
}

impl View<'_> {
    fn phi(&self, lam: f64) -> Result<f64> {
        match self.eps {
            None => self.sym.phi(lam),
            Some(eps) => self.sym.phi_truncated(lam, eps),
        }
    }

    /// `d·∂R^D f(0) + ∫ R^D_λ f(σy) Π(dy)` for the branch `σ`.
    fn killed_against_measure(&self, f: &TestFunction, lam: f64, branch: Branch) -> Result<f64> {
        let r = lam.sqrt();
        let g_sup = f.sup() / lam;
        let mut err = None;
        let mut g = |y: f64| match killed(f, y, r, branch) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        let value = match self.eps {
            None => {
                self.sym
                    .integrate_measure_with(&mut g, g_sup, &branch_breaks(f, branch), measure_settings())?
                    .value
            }
            Some(eps) => {
                let jumps = self.sym.integrate_measure_above(&mut g, eps, g_sup)?.value;
                jumps + self.sym.small_jump_mean(eps)? * dirichlet_flux(f, lam, branch)?
            }
        };
        match err {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

fn check_nu(op: &'static str, nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::parameter(op, format!("nu = {nu} must lie in [0, 1]")));
    }
    Ok(())
}

fn bullet_with(view: View, nu: f64, f: &TestFunction, lam: f64) -> Result<f64> {
    let r = lam.sqrt();
    let pos = if nu > 0.0 {
        view.killed_against_measure(f, lam, Branch::Positive)?
    } else {
        0.0
    };
    let neg = if nu < 1.0 {
        view.killed_against_measure(f, lam, Branch::Negative)?
    } else {
        0.0
    };
    Ok((nu * pos + (1.0 - nu) * neg) / view.phi(r)?)
}

fn sticky_with(view: View, nu: f64, eta: f64, f: &TestFunction, lam: f64) -> Result<f64> {
    let r = lam.sqrt();
    let pos = if nu > 0.0 { dirichlet_flux(f, lam, Branch::Positive)? } else { 0.0 };
    let neg = if nu < 1.0 { dirichlet_flux(f, lam, Branch::Negative)? } else { 0.0 };
    let a = eta * view.phi(lam)?;
    Ok((nu * pos + (1.0 - nu) * neg + a * f.eval(0.0) / lam) / (a + r))
}

/// `∫_0^∞ R^D_λ f(y) Π(dy) / Φ(√λ)`: the resolvent of `B•` at zero.
pub fn bullet_zero_resolvent(sym: &LevySymbol, f: &TestFunction, lam: f64) -> Result<f64> {
    require_positive("bullet_zero_resolvent", "lambda", lam)?;
    bullet_with(View { sym, eps: None }, 1.0, f, lam)
}

/// `[ν ∫R^D_λ f Π + (1-ν) ∫R^{-D}_λ f(-·) Π] / Φ(√λ)`: the resolvent of
/// the skew `B•` at zero, with both half-lines contributing.
pub fn skew_zero_resolvent(sym: &LevySymbol, nu: f64, f: &TestFunction, lam: f64) -> Result<f64> {
    require_positive("skew_zero_resolvent", "lambda", lam)?;
    check_nu("skew_zero_resolvent", nu)?;
    bullet_with(View { sym, eps: None }, nu, f, lam)
}

/// Resolvent at zero of the sticky process `B⁺∘T^{-1}`, `T_t = t + H(ηγ_t)`:
/// `(∫_0^∞ e^{-√λy} f(y) dy + ηΦ(λ) f(0)/λ) / (ηΦ(λ) + √λ)`.
pub fn sticky_resolvent_zero(sym: &LevySymbol, eta: f64, f: &TestFunction, lam: f64) -> Result<f64> {
    require_positive("sticky_resolvent_zero", "lambda", lam)?;
    require_positive("sticky_resolvent_zero", "eta", eta)?;
    sticky_with(View { sym, eps: None }, 1.0, eta, f, lam)
}

/// Two-sided sticky resolvent at zero; the plateau term `ηΦ(λ)f(0)/λ` is
/// shared by both branches.
pub fn sticky_skew_zero_resolvent(sym: &LevySymbol, nu: f64, eta: f64, f: &TestFunction, lam: f64) -> Result<f64> {
    require_positive("sticky_skew_zero_resolvent", "lambda", lam)?;
    require_positive("sticky_skew_zero_resolvent", "eta", eta)?;
    check_nu("sticky_skew_zero_resolvent", nu)?;
    sticky_with(View { sym, eps: None }, nu, eta, f, lam)
}

fn zero_with(kind: ProcessKind, params: &ProcessParams, f: &TestFunction, lam: f64, eps: Option<f64>) -> Result<f64> {
    require_positive("zero_resolvent", "lambda", lam)?;
    params.validate_for(kind)?;
    let view = View { sym: &params.sym, eps };
    let r = lam.sqrt();
    match kind {
        ProcessKind::Bm => bm_resolvent(f, 0.0, lam),
        ProcessKind::Reflected => Ok(dirichlet_flux(f, lam, Branch::Positive)? / r),
        ProcessKind::Skew => {
            let pos = dirichlet_flux(f, lam, Branch::Positive)?;
            let neg = dirichlet_flux(f, lam, Branch::Negative)?;
            Ok((params.nu * pos + (1.0 - params.nu) * neg) / r)
        }
        ProcessKind::Bullet => bullet_with(view, 1.0, f, lam),
        ProcessKind::SkewBullet => bullet_with(view, params.nu, f, lam),
        ProcessKind::Sticky => sticky_with(view, 1.0, params.eta, f, lam),
        ProcessKind::SkewSticky => sticky_with(view, params.nu, params.eta, f, lam),
    }
}

/// `R_λ f(0)` for any process kind.
pub fn zero_resolvent(kind: ProcessKind, params: &ProcessParams, f: &TestFunction, lam: f64) -> Result<f64> {
    zero_with(kind, params, f, lam, None)
}

/// `R_λ f(0)` for the process whose subordinator keeps only jumps above `ε`
/// and replaces the rest by their mean drift, as the simulations do.
pub fn zero_resolvent_truncated(
    kind: ProcessKind,
    params: &ProcessParams,
    f: &TestFunction,
    lam: f64,
    eps: f64,
) -> Result<f64> {
    require_positive("zero_resolvent_truncated", "eps", eps)?;
    zero_with(kind, params, f, lam, Some(eps))
}

fn check_start(kind: ProcessKind, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::parameter("full_resolvent", format!("x = {x} is not finite")));
    }
    if kind.is_one_sided() && x < 0.0 {
        return Err(Error::domain(
            "full_resolvent",
            format!("{} lives on [0, ∞); start x = {x} is outside", kind.name()),
        ));
    }
    Ok(())
}

/// `R_λ f(x) = (killed branch on the side of x) + e^{-√λ|x|} R_λ f(0)`.
pub fn full_resolvent(kind: ProcessKind, params: &ProcessParams, f: &TestFunction, x: f64, lam: f64) -> Result<f64> {
    check_start(kind, x)?;
    if kind == ProcessKind::Bm {
        return bm_resolvent(f, x, lam);
    }
    let zero = zero_resolvent(kind, params, f, lam)?;
    compose_full(f, x, lam, zero)
}

/// [`full_resolvent`] with the truncated subordinator.
pub fn full_resolvent_truncated(
    kind: ProcessKind,
    params: &ProcessParams,
    f: &TestFunction,
    x: f64,
    lam: f64,
    eps: f64,
) -> Result<f64> {
    check_start(kind, x)?;
    if kind == ProcessKind::Bm {
        return bm_resolvent(f, x, lam);
    }
    let zero = zero_resolvent_truncated(kind, params, f, lam, eps)?;
    compose_full(f, x, lam, zero)
}

/// Killed branch at `x` plus `e^{-√λ|x|}` times a given zero-resolvent.
pub fn compose_full(f: &TestFunction, x: f64, lam: f64, zero: f64) -> Result<f64> {
    Ok(killed_resolvent(f, x, lam)? + (-lam.sqrt() * x.abs()).exp() * zero)
}

/// One-sided `∂_x R_λ f` at `0^+` (`I₊ - √λ R(0)`) or `0^-` (`-I₋ + √λ R(0)`)
/// for a given zero-resolvent.
pub fn one_sided_derivative(f: &TestFunction, lam: f64, zero: f64, branch: Branch) -> Result<f64> {
    let flux = dirichlet_flux(f, lam, branch)?;
    let r = lam.sqrt();
    Ok(match branch {
        Branch::Positive => flux - r * zero,
        Branch::Negative => -flux + r * zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, nu: f64, eta: f64) -> ProcessParams {
        ProcessParams::new(LevySymbol::stable(alpha).unwrap(), nu, eta).unwrap()
    }

    #[test]
    fn dirichlet_constant_closed_form() {
        for (x, lam) in [(0.3, 1.0), (2.0, 4.0), (1e-3, 0.5), (30.0, 1.0)] {
            let v = dirichlet_resolvent(&TestFunction::One, x, lam).unwrap();
            let exact = -(-lam.sqrt() * x).exp_m1() / lam;
            assert!((v - exact).abs() < 1e-12, "{x} {lam}: {v} vs {exact}");
        }
        assert!(dirichlet_resolvent(&TestFunction::One, 1e-12, 1.0).unwrap() < 1e-11);
        assert!(dirichlet_resolvent(&TestFunction::One, 0.0, 1.0).is_err());
    }

    #[test]
    fn dirichlet_solves_the_ode() {
        let f = TestFunction::Gaussian { center: 0.0, width: 1.0 };
        let h = 1e-3;
        let r = |x: f64| dirichlet_resolvent(&f, x, 1.0).unwrap();
        let second = (r(1.0 + h) - 2.0 * r(1.0) + r(1.0 - h)) / (h * h);
        assert!((second - (r(1.0) - f.eval(1.0))).abs() < 1e-4);
    }

    #[test]
    fn mirrored_branch_reads_the_negative_axis() {
        let f = TestFunction::ExpDecayPositive { c: 1.0 };
        assert_eq!(dirichlet_resolvent_mirrored(&f, -1.0, 1.0).unwrap(), 0.0);
        let g = TestFunction::Gaussian { center: -0.5, width: 0.7 };
        let m = TestFunction::Gaussian { center: 0.5, width: 0.7 };
        let a = dirichlet_resolvent_mirrored(&g, -0.8, 2.0).unwrap();
        let b = dirichlet_resolvent(&m, 0.8, 2.0).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn conservativity_of_every_kind() {
        let p = params(0.5, 0.3, 0.7);
        for kind in ProcessKind::ALL {
            for lam in [0.5, 1.0, 4.0] {
                let v = zero_resolvent(kind, &p, &TestFunction::One, lam).unwrap();
                assert!((v * lam - 1.0).abs() < 1e-8, "{kind:?} {lam}: {v}");
                let t = zero_resolvent_truncated(kind, &p, &TestFunction::One, lam, 1e-3).unwrap();
                assert!((t * lam - 1.0).abs() < 1e-8, "{kind:?} {lam}: {t}");
            }
        }
        let b = bullet_zero_resolvent(&LevySymbol::stable(0.5).unwrap(), &TestFunction::One, 4.0).unwrap();
        assert!((b - 0.25).abs() < 1e-10);
    }

    #[test]
    fn even_functions_make_skew_formulas_nu_invariant() {
        let f = TestFunction::Gaussian { center: 0.0, width: 1.0 };
        let sym = LevySymbol::stable(0.5).unwrap();
        let a = skew_zero_resolvent(&sym, 0.3, &f, 1.0).unwrap();
        let b = skew_zero_resolvent(&sym, 0.7, &f, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        let a = sticky_skew_zero_resolvent(&sym, 0.3, 1.0, &f, 1.0).unwrap();
        let b = sticky_skew_zero_resolvent(&sym, 0.7, 1.0, &f, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        let c = sticky_resolvent_zero(&sym, 1.0, &f, 1.0).unwrap();
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn bullet_resolvent_decays_in_lambda() {
        let sym = LevySymbol::stable(0.5).unwrap();
        let f = TestFunction::ExpDecay { c: 1.0 };
        let v: Vec<f64> = [1.0, 4.0, 16.0, 64.0]
            .iter()
            .map(|&l| bullet_zero_resolvent(&sym, &f, l).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    }

    #[test]
    fn full_resolvent_at_origin_and_far_away() {
        let p = params(0.5, 0.7, 1.0);
        let f = TestFunction::Gaussian { center: 0.0, width: 0.5 };
        for kind in [ProcessKind::SkewBullet, ProcessKind::SkewSticky] {
            let z = zero_resolvent(kind, &p, &f, 1.0).unwrap();
            assert_eq!(full_resolvent(kind, &p, &f, 0.0, 1.0).unwrap(), z);
            assert!(full_resolvent(kind, &p, &f, 60.0, 1.0).unwrap().abs() < 1e-12);
        }
        assert!(full_resolvent(ProcessKind::Bullet, &p, &f, -1.0, 1.0).is_err());
    }

    #[test]
    fn bm_resolvent_closed_form() {
        // ∫ e^{-|x-y|}/2 e^{-|y|} dy at x = 0 is 1/2.
        let v = bm_resolvent(&TestFunction::ExpDecay { c: 1.0 }, 0.0, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let p = params(0.5, 0.5, 1.0);
        let s = zero_resolvent(ProcessKind::Skew, &p, &TestFunction::ExpDecay { c: 1.0 }, 1.0).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
    }
}
