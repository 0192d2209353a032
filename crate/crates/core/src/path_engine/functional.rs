use super::{ReflectedPath, SamplePath, SubordinatorPath};
use crate::error::{require_positive, Error, Result};

/// Trapezoidal `∫_0^T e^{-λt} f(X_t) dt` and the bound `e^{-λT}‖f‖_∞/λ` on the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceFunctional {
    pub value: f64,
    pub truncation_bound: f64,
}

pub fn path_laplace_functional(
    path: &SamplePath,
    f: impl Fn(f64) -> f64,
    f_sup: f64,
    lam: f64,
) -> Result<LaplaceFunctional> {
    require_positive("path_laplace_functional", "lambda", lam)?;
    let t = &path.t_grid;
    let dt = path.dt();
    let uniform = t.len() < 3 || t.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
    let step = (-lam * dt).exp();
    let mut discount = (-lam * t[0]).exp();
    let mut acc = 0.0;
    let mut prev = discount * f(path.values[0]);
    for k in 1..t.len() {
        discount = if uniform { discount * step } else { (-lam * t[k]).exp() };
        let v = discount * f(path.values[k]);
        acc += 0.5 * (t[k] - t[k - 1]) * (prev + v);
        prev = v;
    }
    if !acc.is_finite() {
        return Err(Error::numeric("path_laplace_functional", "non-finite functional"));
    }
    Ok(LaplaceFunctional {
        value: acc,
        truncation_bound: (-lam * path.horizon()).exp() * f_sup / lam,
    })
}

/// `∫_0^∞ e^{-λt} f(X_t) dt` for the sticky path, integrated in the Brownian clock.
///
/// With `T_u = u + H(ηγ_u)`, the time spent on plateaus contributes
/// `f(0) ∫ e^{-λT_u} d H(ηγ_u)`; per clock step its increase is placed at
/// mid-step. `signs` (one per grid index) turn it into the two-sided path.
pub fn sticky_laplace_functional(
    rp: &ReflectedPath,
    sub: &SubordinatorPath,
    eta: f64,
    signs: Option<&[f64]>,
    f: impl Fn(f64) -> f64,
    f_sup: f64,
    lam: f64,
) -> Result<LaplaceFunctional> {
    require_positive("sticky_laplace_functional", "lambda", lam)?;
    let u = &rp.local_time.t_grid;
    let gamma = &rp.local_time.values;
    let b = &rp.reflected.values;
    if let Some(s) = signs {
        if s.len() != b.len() {
            return Err(Error::parameter("sticky_laplace_functional", "one sign per grid point is required"));
        }
    }
    let x = |k: usize| signs.map_or(b[k], |s| s[k] * b[k]);
    let f0 = f(0.0);
    let mut h_prev = sub.value(eta * gamma[0])?;
    let mut v_prev = (-lam * (u[0] + h_prev)).exp() * f(x(0));
    let mut acc = 0.0;
    for k in 1..b.len() {
        let h = sub.value(eta * gamma[k])?;
        let dt = u[k] - u[k - 1];
        let v = (-lam * (u[k] + h)).exp() * f(x(k));
        acc += 0.5 * dt * (v_prev + v);
        if h > h_prev {
            acc += f0 * (-lam * (u[k - 1] + 0.5 * dt + h_prev)).exp() * (-(-lam * (h - h_prev)).exp_m1()) / lam;
        }
        h_prev = h;
        v_prev = v;
    }
    let t_end = u[u.len() - 1] + h_prev;
    Ok(LaplaceFunctional {
        value: acc,
        truncation_bound: (-lam * t_end).exp() * f_sup / lam,
    })
}
