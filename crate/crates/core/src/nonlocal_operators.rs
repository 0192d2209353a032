//! Marchaud-type and Caputo-Dzherbashian-type operators for a general
//! Bernstein symbol, and the Fourier/Laplace identities they satisfy.
//!
//! * left:  `D_{x-} u(x) = ∫ (u(x) - u(x-y)) Π(dy)`, Fourier symbol `Φ(iξ)`
//! * right: `D_{x+} u(x) = ∫ (u(x) - u(x+y)) Π(dy)`, Fourier symbol `Φ(-iξ)`
//! * time:  `𝔇_t φ(t) = ∫_0^t φ'(s) Π̄(t-s) ds`, Laplace symbol `Φ(λ)φ̃(λ) - Φ(λ)φ(0)/λ`

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::keys::CatalogKey;
use crate::levy_symbols::{LevySymbol, ORIGIN_CUTOFF};
use crate::quadrature::{gauss_legendre, integrate, integrate_shifted_origin, integrate_with_breaks, Quad, QuadSettings};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type BoundsFn = Arc<dyn Fn(f64, f64) -> FunctionBounds + Send + Sync>;

/// Sup-norm and Lipschitz bounds of a function on an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionBounds {
    pub sup: f64,
    pub lipschitz: f64,
}

/// Which Marchaud-type derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "left" | "-" => Ok(Side::Left),
            "right" | "+" => Ok(Side::Right),
            other => Err(Error::parse("side", other, "expected `left` or `right`")),
        }
    }
}

/// A bounded, locally Lipschitz function on the real line.
///
/// Bounds are supplied per interval so that functions such as `e^{cx}`,
/// bounded only on a half-line, can still be used with the one-sided
/// operator that reads that half-line.
#[derive(Clone)]
pub struct SpatialFunction {
    name: String,
    eval: RealFn,
    derivative: Option<RealFn>,
    bounds: BoundsFn,
    kinks: Vec<f64>,
}

impl std::fmt::Debug for SpatialFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpatialFunction").field("name", &self.name).finish()
    }
}

impl SpatialFunction {
    /// A function with global bounds.
    pub fn from_fn(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sup: f64,
        lipschitz: f64,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            derivative: None,
            bounds: Arc::new(move |_, _| FunctionBounds { sup, lipschitz }),
            kinks: Vec::new(),
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    /// Points where the function is not differentiable; quadrature splits there.
    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(format!("const:c={c}"), move |_| c, c.abs(), 0.0).with_derivative(|_| 0.0)
    }

    /// `e^{cx}`; bounded on half-lines extending towards `-c·∞`.
    pub fn exponential(c: f64) -> Self {
        Self {
            name: format!("exp:c={c}"),
            eval: Arc::new(move |x| (c * x).exp()),
            derivative: Some(Arc::new(move |x| c * (c * x).exp())),
            bounds: Arc::new(move |lo, hi| {
                let sup = (c * lo).exp().max((c * hi).exp());
                let sup = if sup.is_nan() { 1.0 } else { sup };
                FunctionBounds {
                    sup,
                    lipschitz: c.abs() * sup,
                }
            }),
            kinks: Vec::new(),
        }
    }

    /// `e^{-((x-center)/width)^2}`.
    pub fn gaussian(center: f64, width: f64) -> Self {
        let lip = (2.0f64 / std::f64::consts::E).sqrt() / width;
        Self::from_fn(
            format!("gaussian:center={center},width={width}"),
            move |x| (-((x - center) / width).powi(2)).exp(),
            1.0,
            lip,
        )
        .with_derivative(move |x| {
            let z = (x - center) / width;
            -2.0 * z / width * (-z * z).exp()
        })
    }

    /// `x` clipped to `[-r, r]`.
    pub fn linear_clipped(r: f64) -> Self {
        Self::from_fn(format!("linear-clipped:r={r}"), move |x| x.clamp(-r, r), r, 1.0)
            .with_derivative(move |x| if x.abs() < r { 1.0 } else { 0.0 })
            .with_kinks(vec![-r, r])
    }

    /// `clip(x, -r, r)^k`.
    pub fn monomial(k: u32, r: f64) -> Self {
        let kk = k as i32;
        Self::from_fn(
            format!("monomial:k={k},r={r}"),
            move |x| x.clamp(-r, r).powi(kk),
            r.powi(kk),
            (k as f64) * r.powi(kk - 1).max(if k == 0 { 0.0 } else { 1.0 }),
        )
        .with_derivative(move |x| {
            if x.abs() < r && kk > 0 {
                (kk as f64) * x.powi(kk - 1)
            } else {
                0.0
            }
        })
        .with_kinks(vec![-r, r])
    }

    /// Catalog keys: `const:c=1`, `exp:c=1`, `gaussian[:center=0,width=1]`,
    /// `linear-clipped:r=10`, `monomial:k=2,r=5`.
    pub fn from_key(key: &str) -> Result<Self> {
        const WHAT: &str = "spatial function key";
        let k = CatalogKey::parse(WHAT, key)?;
        let f = match k.family {
            "const" => Self::constant(k.take(WHAT, &["c"], &[Some(1.0)])?[0]),
            "exp" => Self::exponential(k.take(WHAT, &["c"], &[Some(1.0)])?[0]),
            "gaussian" => {
                let p = k.take(WHAT, &["center", "width"], &[Some(0.0), Some(1.0)])?;
                require_positive("spatial function", "width", p[1])?;
                Self::gaussian(p[0], p[1])
            }
            "linear-clipped" => {
                let p = k.take(WHAT, &["r"], &[Some(10.0)])?;
                require_positive("spatial function", "r", p[0])?;
                Self::linear_clipped(p[0])
            }
            "monomial" => {
                let p = k.take(WHAT, &["k", "r"], &[Some(2.0), Some(10.0)])?;
                if p[0] < 0.0 || p[0].fract() != 0.0 || p[0] > 16.0 {
                    return Err(Error::parse(WHAT, key, "k must be an integer in [0, 16]"));
                }
                require_positive("spatial function", "r", p[1])?;
                Self::monomial(p[0] as u32, p[1])
            }
            other => return Err(Error::parse(WHAT, key, format!("unknown family `{other}`"))),
        };
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    pub fn bounds_on(&self, lo: f64, hi: f64) -> FunctionBounds {
        (self.bounds)(lo, hi)
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// `x ↦ u(x - h)`.
    pub fn shifted(&self, h: f64) -> Self {
        let inner = self.clone();
        let inner_d = self.clone();
        let inner_b = self.clone();
        let mut out = Self {
            name: format!("shift({},{h})", self.name),
            eval: Arc::new(move |x| inner.eval(x - h)),
            derivative: None,
            bounds: Arc::new(move |lo, hi| inner_b.bounds_on(lo - h, hi - h)),
            kinks: self.kinks.iter().map(|k| k + h).collect(),
        };
        if self.derivative.is_some() {
            out.derivative = Some(Arc::new(move |x| inner_d.derivative(x - h).unwrap_or(f64::NAN)));
        }
        out
    }

    /// `x ↦ u(-x)`.
    pub fn reflected(&self) -> Self {
        let inner = self.clone();
        let inner_d = self.clone();
        let inner_b = self.clone();
        let mut out = Self {
            name: format!("reflect({})", self.name),
            eval: Arc::new(move |x| inner.eval(-x)),
            derivative: None,
            bounds: Arc::new(move |lo, hi| inner_b.bounds_on(-hi, -lo)),
            kinks: self.kinks.iter().map(|k| -k).collect(),
        };
        if self.derivative.is_some() {
            out.derivative = Some(Arc::new(move |x| -inner_d.derivative(-x).unwrap_or(f64::NAN)));
        }
        out
    }

    /// `a·u + b·v`.
    pub fn combine(a: f64, u: &Self, b: f64, v: &Self) -> Self {
        let (u1, v1) = (u.clone(), v.clone());
        let (u2, v2) = (u.clone(), v.clone());
        let mut kinks = u.kinks.clone();
        kinks.extend_from_slice(&v.kinks);
        Self {
            name: format!("{a}*{}+{b}*{}", u.name, v.name),
            eval: Arc::new(move |x| a * u1.eval(x) + b * v1.eval(x)),
            derivative: None,
            bounds: Arc::new(move |lo, hi| {
                let bu = u2.bounds_on(lo, hi);
                let bv = v2.bounds_on(lo, hi);
                FunctionBounds {
                    sup: a.abs() * bu.sup + b.abs() * bv.sup,
                    lipschitz: a.abs() * bu.lipschitz + b.abs() * bv.lipschitz,
                }
            }),
            kinks,
        }
    }
}

/// A function on `[0, ∞)` of exponential order, with its derivative.
#[derive(Clone)]
pub struct TemporalFunction {
    name: String,
    eval: RealFn,
    derivative: RealFn,
    /// `|φ(t)| ≤ M e^{wt}`: `(M, w)`.
    pub order: (f64, f64),
}

impl std::fmt::Debug for TemporalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TemporalFunction")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

impl TemporalFunction {
    /// Checks the exponential-order bound on a grid of `[0, 50]`.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        m: f64,
        w: f64,
    ) -> Result<Self> {
        let out = Self {
            name: name.into(),
            eval: Arc::new(f),
            derivative: Arc::new(df),
            order: (m, w),
        };
        for k in 0..=500 {
            let t = 0.1 * k as f64;
            let v = out.eval(t);
            if !v.is_finite() || v.abs() > m * (w * t).exp() * (1.0 + 1e-9) + 1e-300 {
                return Err(Error::domain(
                    "temporal function",
                    format!("{}: |φ({t})| = {v:e} exceeds M e^(wt) with (M, w) = ({m}, {w})", out.name),
                ));
            }
        }
        Ok(out)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const:c={c}"), move |_| c, |_| 0.0, c.abs(), 0.0).expect("constant has order 0")
    }

    /// `φ(t) = t`, order `(1, 1)` since `t ≤ e^t`.
    pub fn linear() -> Self {
        Self::new("linear", |t| t, |_| 1.0, 1.0, 1.0).expect("t <= e^t")
    }

    /// `φ(t) = e^{ct}`.
    pub fn exponential(c: f64) -> Self {
        Self::new(format!("exp:c={c}"), move |t| (c * t).exp(), move |t| c * (c * t).exp(), 1.0, c)
            .expect("exact order")
    }

    /// Catalog keys: `const:c=1`, `linear`, `exp:c=-1`.
    pub fn from_key(key: &str) -> Result<Self> {
        const WHAT: &str = "temporal function key";
        let k = CatalogKey::parse(WHAT, key)?;
        match k.family {
            "const" => Ok(Self::constant(k.take(WHAT, &["c"], &[Some(1.0)])?[0])),
            "linear" => {
                k.take(WHAT, &[], &[])?;
                Ok(Self::linear())
            }
            "exp" => Ok(Self::exponential(k.take(WHAT, &["c"], &[Some(1.0)])?[0])),
            other => Err(Error::parse(WHAT, key, format!("unknown family `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }
}

fn operator_settings() -> QuadSettings {
    QuadSettings {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_segments: 4000,
    }
}

/// Probe `u` at `x ∓ y` on a log grid of jump sizes and compare with the declared bound.
fn check_probe_grid(u: &SpatialFunction, x: f64, side: Side, sup: f64, op: &'static str) -> Result<()> {
    let dir = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    for k in -12..=24 {
        let y = 10f64.powf(0.5 * k as f64);
        let v = u.eval(x + dir * y);
        if !v.is_finite() || v.abs() > sup * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::domain(
                op,
                format!("{}: |u({})| = {v:e} exceeds the declared bound {sup:e}", u.name(), x + dir * y),
            ));
        }
    }
    Ok(())
}

/// Marchaud-type derivative of `u` at `x` with quadrature error estimate.
pub fn marchaud(sym: &LevySymbol, u: &SpatialFunction, x: f64, side: Side) -> Result<Quad> {
    marchaud_with(sym, u, x, side, operator_settings())
}

/// [`marchaud`] with explicit quadrature tolerances, for arguments that are
/// themselves computed by quadrature.
pub fn marchaud_with(sym: &LevySymbol, u: &SpatialFunction, x: f64, side: Side, settings: QuadSettings) -> Result<Quad> {
    let op = match side {
        Side::Left => "marchaud_left",
        Side::Right => "marchaud_right",
    };
    let bounds = match side {
        Side::Left => u.bounds_on(f64::NEG_INFINITY, x),
        Side::Right => u.bounds_on(x, f64::INFINITY),
    };
    if !bounds.sup.is_finite() || !bounds.lipschitz.is_finite() {
        return Err(Error::domain(
            op,
            format!("{} is unbounded on the half-line read by the operator at x = {x}", u.name()),
        ));
    }
    check_probe_grid(u, x, side, bounds.sup, op)?;
    let ux = u.eval(x);
    let breaks: Vec<f64> = u
        .kinks()
        .iter()
        .map(|k| match side {
            Side::Left => x - k,
            Side::Right => k - x,
        })
        .filter(|y| *y > 0.0)
        .collect();
    let mut g = |y: f64| match side {
        Side::Left => ux - u.eval(x - y),
        Side::Right => ux - u.eval(x + y),
    };
    sym.integrate_measure_with(&mut g, 2.0 * bounds.sup, &breaks, settings)
}

/// `∫_0^∞ (u(x) - u(x-y)) Π(dy)`.
pub fn marchaud_left(sym: &LevySymbol, u: &SpatialFunction, x: f64) -> Result<f64> {
    Ok(marchaud(sym, u, x, Side::Left)?.value)
}

/// `∫_0^∞ (u(x) - u(x+y)) Π(dy)`.
pub fn marchaud_right(sym: &LevySymbol, u: &SpatialFunction, x: f64) -> Result<f64> {
    Ok(marchaud(sym, u, x, Side::Right)?.value)
}

/// The a-priori bound `(K + 2‖u‖_∞) ∫ (1 ∧ y) Π(dy)` on either Marchaud derivative.
pub fn marchaud_bound(sym: &LevySymbol, u: &SpatialFunction) -> Result<f64> {
    let b = u.bounds_on(f64::NEG_INFINITY, f64::INFINITY);
    let mass = sym.integrate_measure(|y| y.min(1.0), 1.0)?.value;
    Ok((b.lipschitz + 2.0 * b.sup) * mass)
}

/// Limit of the Marchaud derivative at `0^+` (right) or `0^-` (left), by
/// first-order Richardson extrapolation from `±h` and `±2h`.
pub fn marchaud_at_interface(sym: &LevySymbol, u: &SpatialFunction, side: Side, h: f64) -> Result<f64> {
    require_positive("marchaud_at_interface", "h", h)?;
    let x = match side {
        Side::Left => -h,
        Side::Right => h,
    };
    let d1 = marchaud(sym, u, x, side)?.value;
    let d2 = marchaud(sym, u, 2.0 * x, side)?.value;
    Ok(2.0 * d1 - d2)
}

/// `|D u(x) - (±u'(x))|`: the distance to the first derivative the operators
/// approach as the symbol tends to `λ` (`+u'` on the left, `-u'` on the right).
pub fn first_derivative_gap(sym: &LevySymbol, u: &SpatialFunction, x: f64, side: Side) -> Result<f64> {
    let d = u
        .derivative(x)
        .ok_or_else(|| Error::domain("first_derivative_gap", format!("{} has no derivative", u.name())))?;
    let target = match side {
        Side::Left => d,
        Side::Right => -d,
    };
    Ok((marchaud(sym, u, x, side)?.value - target).abs())
}

/// `∫_0^t φ'(s) Π̄(t-s) ds`, written as `∫_0^t φ'(t-r) Π̄(r) dr`.
///
/// The tail singularity at `r = 0` is removed by the same power substitution
/// as the measure integrals; below the origin cutoff the integrand is
/// `φ'(t) Π̄(r)` and `∫_0^δ Π̄ = ∫_0^δ y Π(dy) + δ Π̄(δ)` is exact.
pub fn caputo_dzherbashian(sym: &LevySymbol, phi: &TemporalFunction, t: f64) -> Result<f64> {
    Ok(caputo_quad(sym, phi, t)?.value)
}

pub fn caputo_quad(sym: &LevySymbol, phi: &TemporalFunction, t: f64) -> Result<Quad> {
    require_positive("caputo_dzherbashian", "t", t)?;
    let delta = ORIGIN_CUTOFF.min(0.5 * t);
    let near = phi.derivative(t) * (sym.small_jump_mean(delta)? + delta * sym.tail(delta)?);
    let mut bad = None;
    let mut q = integrate_shifted_origin(
        |r| {
            let d = phi.derivative(t - r);
            if d == 0.0 {
                return 0.0;
            }
            match sym.tail(r) {
                Ok(tail) => d * tail,
                Err(e) => {
                    bad.get_or_insert(e);
                    0.0
                }
            }
        },
        delta,
        t,
        sym.singularity_index(),
        operator_settings(),
    )?;
    if let Some(e) = bad {
        return Err(e);
    }
    if !q.value.is_finite() {
        return Err(Error::numeric("caputo_dzherbashian", format!("non-integrable product at t = {t}")));
    }
    q.value += near;
    Ok(q)
}

/// Both sides of the Laplace identity for the time operator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LaplaceIdentity {
    pub transform_of_operator: f64,
    pub symbol_side: f64,
    pub residual: f64,
    pub horizon: f64,
}

/// `|∫_0^T e^{-λt} 𝔇_t φ dt - (Φ(λ) φ̃(λ) - Φ(λ) φ(0)/λ)|` with `T` chosen
/// so that the neglected tail is below `1e-12` relative.
pub fn laplace_identity_residual(sym: &LevySymbol, phi: &TemporalFunction, lam: f64) -> Result<f64> {
    Ok(laplace_identity(sym, phi, lam)?.residual)
}

pub fn laplace_identity(sym: &LevySymbol, phi: &TemporalFunction, lam: f64) -> Result<LaplaceIdentity> {
    let (m, w) = phi.order;
    if !(lam > w) {
        return Err(Error::domain(
            "laplace_identity_residual",
            format!("lambda = {lam} must exceed the exponential order w = {w}"),
        ));
    }
    let rate = lam - w.max(0.0).min(lam);
    let rate = if rate > 0.0 { rate } else { lam - w };
    let horizon = (30.0 + (1.0 + m).ln() + 2.0 * (1.0 / rate).ln().max(0.0)) / rate;
    let phi_lam = sym.phi(lam)?;
    // Geometric breaks concentrate nodes near t = 0 where 𝔇φ behaves like a power.
    let mut breaks = Vec::new();
    let mut b = horizon;
    while b > 1e-6 * horizon {
        b *= 0.25;
        breaks.push(b);
    }
    breaks.reverse();
    let settings = QuadSettings {
        abs_tol: 1e-13,
        rel_tol: 1e-10,
        max_segments: 2000,
    };
    let mut failure = None;
    let lhs = integrate_with_breaks(
        |t| {
            if t <= 0.0 {
                return 0.0;
            }
            match caputo_dzherbashian(sym, phi, t) {
                Ok(v) => (-lam * t).exp() * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        horizon,
        &breaks,
        settings,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let transform = integrate_with_breaks(|t| (-lam * t).exp() * phi.eval(t), 0.0, horizon, &breaks, settings)?;
    let rhs = phi_lam * transform.value - phi_lam / lam * phi.eval(0.0);
    Ok(LaplaceIdentity {
        transform_of_operator: lhs.value,
        symbol_side: rhs,
        residual: (lhs.value - rhs).abs(),
        horizon,
    })
}

/// Truncated grid for Fourier checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierGrid {
    /// Composite Simpson on `[-half_width, half_width]`.
    pub half_width: f64,
    pub step: f64,
    /// Add the analytic contribution of `D u` outside the grid.
    pub far_field: bool,
}

impl Default for FourierGrid {
    fn default() -> Self {
        Self {
            half_width: 20.0,
            step: 1e-3,
            far_field: true,
        }
    }
}

/// Both sides of one Fourier identity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FourierCheck {
    pub xi: f64,
    pub side: Side,
    /// `∫ e^{-iξx} D u(x) dx` (re, im).
    pub transform_of_operator: (f64, f64),
    /// `Φ(±iξ) û(ξ)` (re, im).
    pub symbol_side: (f64, f64),
    pub residual: f64,
    /// `|Φ(±iξ) û(ξ) - (±iξ) û(ξ)|`, the distance to the first-derivative symbol.
    pub derivative_symbol_gap: f64,
}

/// `|∫ e^{-iξx} D u(x) dx - Φ(±iξ) û(ξ)|` for a rapidly decaying `u`.
pub fn fourier_symbol_residual(sym: &LevySymbol, u: &SpatialFunction, xi: f64, side: Side) -> Result<f64> {
    Ok(fourier_symbol_checks(sym, u, &[xi], side, FourierGrid::default())?[0].residual)
}

/// Fourier identities at several frequencies sharing one grid of operator values.
///
/// Outside the grid `u` is negligible, so for the left operator at `x > X`
/// `D u(x) ≈ -∫ u(z) π(x-z) dz` and its transform is
/// `-∫ u(z) e^{-iξz} ∫_{X-z}^∞ e^{-iξw} π(w) dw dz`; the right operator mirrors
/// this at `x < -X`. Heavy-tailed densities make this term far larger than
/// the Simpson error, so it is added unless `grid.far_field` is off.
pub fn fourier_symbol_checks(
    sym: &LevySymbol,
    u: &SpatialFunction,
    xis: &[f64],
    side: Side,
    grid: FourierGrid,
) -> Result<Vec<FourierCheck>> {
    require_positive("fourier_symbol_residual", "half_width", grid.half_width)?;
    require_positive("fourier_symbol_residual", "step", grid.step)?;
    let x_max = grid.half_width;
    let sup = u.bounds_on(f64::NEG_INFINITY, f64::INFINITY).sup;
    let edge = u.eval(-x_max).abs().max(u.eval(x_max).abs());
    if !(edge <= 1e-12 * sup.max(1e-300)) {
        return Err(Error::numeric(
            "fourier_symbol_residual",
            format!("|u| = {edge:e} at the grid edge ±{x_max}; widen the grid"),
        ));
    }
    let mut n = (2.0 * x_max / grid.step).round() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let h = 2.0 * x_max / n as f64;
    let xs: Vec<f64> = (0..=n).map(|k| -x_max + k as f64 * h).collect();
    let values: Vec<Result<f64>> = xs.par_iter().map(|&x| Ok(marchaud(sym, u, x, side)?.value)).collect();
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;

    // Support of u for the far-field and û integrals.
    let (z_lo, z_hi) = effective_support(u, x_max, sup);
    let (gl_x, gl_w) = gauss_legendre(96);
    let z_half = 0.5 * (z_hi - z_lo);
    let z_mid = 0.5 * (z_hi + z_lo);
    let settings = operator_settings();

    xis.iter()
        .map(|&xi| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (k, (&x, &v)) in xs.iter().zip(&values).enumerate() {
                let w = if k == 0 || k == n {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                re += w * v * (xi * x).cos();
                im -= w * v * (xi * x).sin();
            }
            re *= h / 3.0;
            im *= h / 3.0;
            if grid.far_field {
                let mut far = Complex64::new(0.0, 0.0);
                for (&t, &wt) in gl_x.iter().zip(&gl_w) {
                    let z = z_mid + z_half * t;
                    let uz = u.eval(z);
                    if uz == 0.0 {
                        continue;
                    }
                    let tail = match side {
                        Side::Left => far_tail(sym, x_max - z, xi)?,
                        Side::Right => far_tail(sym, x_max + z, -xi)?,
                    };
                    far -= wt * z_half * uz * Complex64::from_polar(1.0, -xi * z) * tail;
                }
                re += far.re;
                im += far.im;
            }
            let u_hat_re = integrate(|x| u.eval(x) * (xi * x).cos(), z_lo, z_hi, settings)?.value;
            let u_hat_im = integrate(|x| -u.eval(x) * (xi * x).sin(), z_lo, z_hi, settings)?.value;
            let u_hat = Complex64::new(u_hat_re, u_hat_im);
            let arg = match side {
                Side::Left => Complex64::new(0.0, xi),
                Side::Right => Complex64::new(0.0, -xi),
            };
            let symbol = sym.phi_complex(arg)? * u_hat;
            let lhs = Complex64::new(re, im);
            Ok(FourierCheck {
                xi,
                side,
                transform_of_operator: (re, im),
                symbol_side: (symbol.re, symbol.im),
                residual: (lhs - symbol).norm(),
                derivative_symbol_gap: (symbol - arg * u_hat).norm(),
            })
        })
        .collect()
}

/// `∫_a^∞ e^{-iωw} π(w) dw`, with the plain tail at `ω = 0`.
fn far_tail(sym: &LevySymbol, a: f64, omega: f64) -> Result<Complex64> {
    if omega == 0.0 {
        Ok(Complex64::new(sym.tail(a)?, 0.0))
    } else {
        sym.fourier_tail(a, omega)
    }
}

/// Smallest interval inside `[-x_max, x_max]` outside which `|u| < 1e-17 sup`.
fn effective_support(u: &SpatialFunction, x_max: f64, sup: f64) -> (f64, f64) {
    let m = 4000;
    let h = 2.0 * x_max / m as f64;
    let thresh = 1e-17 * sup;
    let mut lo = x_max;
    let mut hi = -x_max;
    for k in 0..=m {
        let x = -x_max + k as f64 * h;
        if u.eval(x).abs() > thresh {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    if lo > hi {
        return (-x_max, x_max);
    }
    ((lo - h).max(-x_max), (hi + h).min(x_max))
}
