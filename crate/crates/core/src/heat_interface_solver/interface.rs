use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::levy_symbols::LevySymbol;
use crate::nonlocal_operators::{caputo_dzherbashian, marchaud_with, Side, SpatialFunction, TemporalFunction};
use crate::quadrature::QuadSettings;
use crate::resolvent_lab::{
    compose_full, dirichlet_flux, one_sided_derivative, skew_zero_resolvent, sticky_skew_zero_resolvent, Branch,
    TestFunction,
};

/// `x ↦ R_λ f(x)` built from a zero-resolvent, as an operator argument.
fn resolvent_function(f: &TestFunction, lam: f64, zero: f64) -> SpatialFunction {
    let g = *f;
    let sup = f.sup() / lam;
    SpatialFunction::from_fn(
        format!("resolvent of {f} at lambda {lam}"),
        move |x| compose_full(&g, x, lam, zero).unwrap_or(f64::NAN),
        sup,
        2.0 * f.sup() / lam.sqrt(),
    )
    .with_kinks(f.breakpoints())
}

/// `ν D_{x+} R(0^+) + (1-ν) D_{x-} R(0^-)` and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewInterface {
    pub right: f64,
    pub left: f64,
    pub residual: f64,
    /// `ν ∫|R(0) - R(y)| Π(dy) + (1-ν) ∫|R(0) - R(-y)| Π(dy)`: the size of the
    /// integrals that cancel. Each one-sided derivative vanishes by itself
    /// for even `f`, so `|right|` and `|left|` cannot serve as the scale.
    pub scale: f64,
}

/// `ηΦ(λ)R(0) - ηΦ(λ)f(0)/λ - ν∂R(0^+) + (1-ν)∂R(0^-)` and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StickyInterface {
    pub memory_term: f64,
    pub initial_term: f64,
    pub flux_right: f64,
    pub flux_left: f64,
    pub residual: f64,
    /// Sum of the absolute values of the four terms.
    pub scale: f64,
}

/// `|residual| / scale`, zero when every term vanishes.
pub fn relative_residual(residual: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        if residual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        residual.abs() / scale
    }
}

impl SkewInterface {
    pub fn relative(&self) -> f64 {
        relative_residual(self.residual, self.scale)
    }
}

impl StickyInterface {
    pub fn relative(&self) -> f64 {
        relative_residual(self.residual, self.scale)
    }
}

fn check_nu(op: &'static str, nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::parameter(op, format!("nu = {nu} must lie in [0, 1]")));
    }
    Ok(())
}

fn interface_settings() -> QuadSettings {
    QuadSettings::with_tolerances(1e-11, 1e-8)
}

/// Marchaud-type derivatives of `R_λ f` at the interface, from a given zero-resolvent.
fn marchaud_pair(sym: &LevySymbol, nu: f64, f: &TestFunction, lam: f64, zero: f64) -> Result<SkewInterface> {
    let u = resolvent_function(f, lam, zero);
    let right = marchaud_with(sym, &u, 0.0, Side::Right, interface_settings())?.value;
    let left = marchaud_with(sym, &u, 0.0, Side::Left, interface_settings())?.value;
    let breaks = |sign: f64| -> Vec<f64> { f.breakpoints().iter().map(|p| sign * p).filter(|p| *p > 0.0).collect() };
    let gross = |sign: f64| {
        let mut g = |y: f64| (zero - u.eval(sign * y)).abs();
        sym.integrate_measure_with(&mut g, 2.0 * f.sup() / lam, &breaks(sign), interface_settings())
            .map(|q| q.value)
    };
    let scale = nu * gross(1.0)? + (1.0 - nu) * gross(-1.0)?;
    Ok(SkewInterface {
        right,
        left,
        residual: nu * right + (1.0 - nu) * left,
        scale,
    })
}

/// The non-local skew interface condition applied to the resolvent of the
/// skew `B•`. It holds exactly, so the residual is quadrature error.
pub fn skew_interface_residual(sym: &LevySymbol, nu: f64, f: &TestFunction, lam: f64) -> Result<SkewInterface> {
    require_positive("skew_interface_residual", "lambda", lam)?;
    check_nu("skew_interface_residual", nu)?;
    let zero = skew_zero_resolvent(sym, nu, f, lam)?;
    marchaud_pair(sym, nu, f, lam, zero)
}

fn sticky_terms(phi: f64, nu: f64, eta: f64, f: &TestFunction, lam: f64, zero: f64) -> Result<StickyInterface> {
    let memory_term = eta * phi * zero;
    let initial_term = eta * phi * f.eval(0.0) / lam;
    let flux_right = nu * one_sided_derivative(f, lam, zero, Branch::Positive)?;
    let flux_left = (1.0 - nu) * one_sided_derivative(f, lam, zero, Branch::Negative)?;
    Ok(StickyInterface {
        memory_term,
        initial_term,
        flux_right,
        flux_left,
        residual: memory_term - initial_term - flux_right + flux_left,
        scale: memory_term.abs() + initial_term.abs() + flux_right.abs() + flux_left.abs(),
    })
}

/// The Laplace-domain dynamic interface condition for the two-sided sticky
/// process; `η = 0` gives the skew flux condition `ν∂R(0^+) = (1-ν)∂R(0^-)`
/// for skew Brownian motion.
pub fn sticky_interface_residual(
    sym: &LevySymbol,
    nu: f64,
    eta: f64,
    f: &TestFunction,
    lam: f64,
) -> Result<StickyInterface> {
    require_positive("sticky_interface_residual", "lambda", lam)?;
    check_nu("sticky_interface_residual", nu)?;
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::parameter("sticky_interface_residual", format!("eta = {eta} must be nonnegative")));
    }
    let zero = if eta > 0.0 {
        sticky_skew_zero_resolvent(sym, nu, eta, f, lam)?
    } else {
        skew_bm_zero(nu, f, lam)?
    };
    sticky_terms(sym.phi(lam)?, nu, eta, f, lam, zero)
}

fn skew_bm_zero(nu: f64, f: &TestFunction, lam: f64) -> Result<f64> {
    let pos = dirichlet_flux(f, lam, Branch::Positive)?;
    let neg = dirichlet_flux(f, lam, Branch::Negative)?;
    Ok((nu * pos + (1.0 - nu) * neg) / lam.sqrt())
}

/// Classical sticky skew Brownian motion at zero (`Φ(λ) = λ`).
fn classical_sticky_zero(nu: f64, eta: f64, f: &TestFunction, lam: f64) -> Result<f64> {
    let pos = dirichlet_flux(f, lam, Branch::Positive)?;
    let neg = dirichlet_flux(f, lam, Branch::Negative)?;
    Ok((nu * pos + (1.0 - nu) * neg + eta * f.eval(0.0)) / (eta * lam + lam.sqrt()))
}

/// Inputs held fixed while the stable index tends to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitProbe {
    pub f: TestFunction,
    pub nu: f64,
    pub eta: f64,
    pub lam: f64,
    /// Time at which the temporal operator is compared with `φ'`.
    pub t: f64,
}

impl Default for LimitProbe {
    fn default() -> Self {
        Self {
            f: TestFunction::Gaussian { center: 0.0, width: 1.0 },
            nu: 0.7,
            eta: 1.0,
            lam: 4.0,
            t: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub alpha: f64,
    /// `|ν D_{x+}R(0^+) + (1-ν) D_{x-}R(0^-) - (-ν∂R(0^+) + (1-ν)∂R(0^-))|`
    /// on the skew Brownian resolvent.
    pub flux_gap: f64,
    /// `|ηΦ(λ)(R(0) - f(0)/λ) - η(λR(0) - f(0))|` on the classical sticky resolvent.
    pub dynamic_gap: f64,
    /// `dynamic_gap / |η(λR(0) - f(0))|`.
    pub dynamic_ratio: f64,
    /// `|𝔇_t φ(t) - φ'(t)|` for `φ(t) = e^{-t}`.
    pub caputo_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLimitReport {
    pub probe: LimitProbe,
    pub rows: Vec<LimitRow>,
    pub flux_monotone: bool,
    pub dynamic_monotone: bool,
}

impl ClassicalLimitReport {
    pub fn passed(&self) -> bool {
        self.flux_monotone && self.dynamic_monotone
    }
}

/// Strictly decreasing, or identically zero.
fn decreasing(v: &[f64]) -> bool {
    v.iter().all(|x| *x == 0.0) || v.windows(2).all(|w| w[1] < w[0])
}

/// Gaps between the non-local interface operators of the stable symbols
/// `λ^α` and their first-order limits, for each `α` (ascending).
pub fn classical_limit_report(alphas: &[f64], probe: &LimitProbe) -> Result<ClassicalLimitReport> {
    require_positive("classical_limit_report", "lambda", probe.lam)?;
    check_nu("classical_limit_report", probe.nu)?;
    if alphas.is_empty() || alphas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::parameter("classical_limit_report", "alphas must be nonempty and increasing"));
    }
    let (f, nu, eta, lam) = (&probe.f, probe.nu, probe.eta, probe.lam);
    let skew_zero = skew_bm_zero(nu, f, lam)?;
    let target = -nu * one_sided_derivative(f, lam, skew_zero, Branch::Positive)?
        + (1.0 - nu) * one_sided_derivative(f, lam, skew_zero, Branch::Negative)?;
    let sticky_zero = classical_sticky_zero(nu, eta, f, lam)?;
    let dynamic = eta * (lam * sticky_zero - f.eval(0.0));
    let phi = TemporalFunction::exponential(-1.0);
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let sym = LevySymbol::stable(alpha)?;
        let pair = marchaud_pair(&sym, nu, f, lam, skew_zero)?;
        let memory = eta * sym.phi(lam)? * (sticky_zero - f.eval(0.0) / lam);
        let dynamic_gap = (memory - dynamic).abs();
        rows.push(LimitRow {
            alpha,
            flux_gap: (pair.residual - target).abs(),
            dynamic_gap,
            dynamic_ratio: if dynamic == 0.0 { 0.0 } else { dynamic_gap / dynamic.abs() },
            caputo_gap: (caputo_dzherbashian(&sym, &phi, probe.t)? - phi.derivative(probe.t)).abs(),
        });
    }
    let flux: Vec<f64> = rows.iter().map(|r| r.flux_gap).collect();
    let dynamic: Vec<f64> = rows.iter().map(|r| r.dynamic_gap).collect();
    Ok(ClassicalLimitReport {
        probe: *probe,
        flux_monotone: decreasing(&flux),
        dynamic_monotone: decreasing(&dynamic),
        rows,
    })
}
