use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::inversion::{gaver_stehfest, Inversion};
use crate::error::{require_positive, Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks, QuadSettings};
use crate::resolvent_lab::{zero_resolvent, ProcessKind, ProcessParams, TestFunction};

pub const DEFAULT_STEHFEST_ORDER: usize = 12;

/// `g(t, z) = e^{-z²/4t} / √(4πt)`.
pub fn heat_kernel(t: f64, z: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt()
}

/// Density `(|x|/s) g(s, x)` of the first hitting time of zero from `x`.
pub fn hitting_density(s: f64, x: f64) -> f64 {
    x.abs() / s * heat_kernel(s, x)
}

/// `t ↦ u(t, 0)` at each point of `t_grid`, by Gaver-Stehfest inversion of
/// the zero-resolvent.
pub fn zero_trace_from_resolvent(
    kind: ProcessKind,
    params: &ProcessParams,
    f: &TestFunction,
    t_grid: &[f64],
    order: usize,
) -> Result<Vec<Inversion>> {
    t_grid
        .par_iter()
        .map(|&t| gaver_stehfest(|lam| zero_resolvent(kind, params, f, lam), t, order))
        .collect()
}

/// `u(t, x) = E_x f(X_t)` for one of the interface processes, on `[0, t_max]`.
///
/// Values of the zero trace are computed on demand and kept, so repeated
/// evaluations near the same times reuse them.
pub struct HeatSolution {
    pub f: TestFunction,
    pub kind: ProcessKind,
    pub params: ProcessParams,
    pub t_max: f64,
    pub order: usize,
    trace: Mutex<HashMap<u64, Inversion>>,
}

impl std::fmt::Debug for HeatSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeatSolution")
            .field("f", &self.f)
            .field("kind", &self.kind)
            .field("t_max", &self.t_max)
            .finish()
    }
}

/// The two terms of the representation formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub u: f64,
    /// `∫_{xy>0} (g(t,x-y) - g(t,x+y)) f(y) dy`.
    pub dirichlet_term: f64,
    /// `∫_0^t (|x|/s) g(s,x) u(t-s,0) ds`.
    pub hitting_term: f64,
    /// Largest inversion spread among the trace values used.
    pub trace_error: f64,
}

fn settings() -> QuadSettings {
    QuadSettings::with_tolerances(1e-12, 1e-10)
}

/// The inverted trace carries errors near `1e-5`; tighter targets only chase them.
fn hitting_settings() -> QuadSettings {
    QuadSettings::with_tolerances(1e-9, 1e-7)
}

impl HeatSolution {
    pub fn new(kind: ProcessKind, params: ProcessParams, f: TestFunction, t_max: f64) -> Result<Self> {
        require_positive("heat solution", "t_max", t_max)?;
        params.validate_for(kind)?;
        f.validate()?;
        Ok(Self {
            f,
            kind,
            params,
            t_max,
            order: DEFAULT_STEHFEST_ORDER,
            trace: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    /// `u(τ, 0)` with its inversion error.
    pub fn trace(&self, tau: f64) -> Result<Inversion> {
        if !(tau > 0.0 && tau <= self.t_max * (1.0 + 1e-12)) {
            return Err(Error::state(
                "heat solution",
                format!("zero trace is available on (0, {}], not at t = {tau}", self.t_max),
            ));
        }
        if let Some(v) = self.trace.lock().expect("trace cache").get(&tau.to_bits()) {
            return Ok(*v);
        }
        let v = gaver_stehfest(|lam| zero_resolvent(self.kind, &self.params, &self.f, lam), tau, self.order)?;
        self.trace.lock().expect("trace cache").insert(tau.to_bits(), v);
        Ok(v)
    }

    fn dirichlet_term(&self, t: f64, x: f64) -> Result<f64> {
        let s = x.signum();
        let a = x.abs();
        let w = 9.0 * (4.0 * t).sqrt();
        let (lo, hi) = self.f.support(1e-18);
        let (lo, hi) = if s > 0.0 { (lo, hi) } else { (-hi, -lo) };
        let (lo, hi) = ((a - w).max(0.0).max(lo), (a + w).min(hi));
        if hi <= lo {
            return Ok(0.0);
        }
        let breaks: Vec<f64> = self.f.breakpoints().iter().map(|p| s * p).collect();
        // g(t, a-y) - g(t, a+y) = g(t, a-y)(1 - e^{-ay/t}).
        let q = integrate_with_breaks(
            |y| heat_kernel(t, a - y) * -(-a * y / t).exp_m1() * self.f.eval(s * y),
            lo,
            hi,
            &breaks,
            settings(),
        )?;
        Ok(q.value)
    }

    fn hitting_term(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let mut err = None;
        let mut worst = 0.0f64;
        let a = x.abs();
        let mut trace_at = |tau: f64| match self.trace(tau) {
            Ok(v) => {
                worst = worst.max(v.error);
                v.value
            }
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        // s in (0, t/2] on a log scale, where the density sits near s ~ x²;
        // below x²/160 it is under e^{-40}.
        let s_min = a * a / 160.0;
        let mid = 0.5 * t;
        let near = if s_min < mid {
            integrate(
                |v| {
                    let s = v.exp();
                    hitting_density(s, a) * s * trace_at(t - s)
                },
                s_min.ln(),
                mid.ln(),
                hitting_settings(),
            )?
            .value
        } else {
            0.0
        };
        // s in [t/2, t) with t - s = (t/2) w², which absorbs √τ behaviour of the trace.
        let far = integrate(
            |w| {
                let tau = mid * w * w;
                if tau <= 0.0 {
                    return 0.0;
                }
                hitting_density(t - tau, a) * 2.0 * mid * w * trace_at(tau)
            },
            0.0,
            1.0,
            hitting_settings(),
        )?
        .value;
        match err {
            Some(e) => Err(e),
            None => Ok((near + far, worst)),
        }
    }

    /// Both terms of the representation at `(t, x)`.
    pub fn representation(&self, t: f64, x: f64) -> Result<Representation> {
        require_positive("representation_u", "t", t)?;
        if !x.is_finite() {
            return Err(Error::parameter("representation_u", format!("x = {x} is not finite")));
        }
        if self.kind.is_one_sided() && x < 0.0 {
            return Err(Error::domain(
                "representation_u",
                format!("{} lives on [0, ∞); x = {x} is outside", self.kind),
            ));
        }
        if t > self.t_max * (1.0 + 1e-12) {
            return Err(Error::state(
                "representation_u",
                format!("zero trace is available on (0, {}], not at t = {t}", self.t_max),
            ));
        }
        if x == 0.0 {
            let tr = self.trace(t)?;
            return Ok(Representation {
                u: tr.value,
                dirichlet_term: 0.0,
                hitting_term: tr.value,
                trace_error: tr.error,
            });
        }
        let d = self.dirichlet_term(t, x)?;
        let (h, e) = self.hitting_term(t, x)?;
        Ok(Representation {
            u: d + h,
            dirichlet_term: d,
            hitting_term: h,
            trace_error: e,
        })
    }
}

/// `u(t, x)` by the representation formula.
pub fn representation_u(sol: &HeatSolution, t: f64, x: f64) -> Result<f64> {
    Ok(sol.representation(t, x)?.u)
}
