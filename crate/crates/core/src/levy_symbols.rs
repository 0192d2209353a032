//! Bernstein symbols and their Lévy measures.
//!
//! A [`LevySymbol`] bundles one subordinator family: the Laplace exponent
//! `Φ(λ) = ∫ (1 - e^{-λy}) Π(dy)`, its extension to the closed right
//! half-plane, the Lévy density, the tail `Π̄(z) = Π(z, ∞)`, the truncated
//! jump sampler and the small-jump mean used as compensation drift.
//!
//! Catalog families carry closed forms; every quantity also has a
//! quadrature route through [`LevySymbol::integrate_measure`] so the closed
//! forms can be checked against the measure itself.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::exponential::integral as exp_integral;
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

use crate::error::{require_positive, Error, Result};
use crate::keys::CatalogKey;
use crate::quadrature::{
    integrate, integrate_shifted_origin, integrate_singular_origin, oscillatory_tail, Quad, QuadSettings,
};

/// Closed-form catalog entry, addressable by a string key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SymbolCatalogEntry {
    /// `Φ(λ) = λ^α`, density `α/Γ(1-α) y^{-α-1}`.
    Stable { alpha: f64 },
    /// `Φ(λ) = (λ+θ)^α - θ^α`, density `α/Γ(1-α) e^{-θy} y^{-α-1}`.
    TemperedStable { alpha: f64, theta: f64 },
    /// `Φ(λ) = a ln(1 + λ/b)`, density `a e^{-by}/y`.
    Gamma { a: f64, b: f64 },
}

impl SymbolCatalogEntry {
    /// Parse `stable:alpha=0.5`, `tempered:alpha=0.5,theta=1.0` or `gamma:a=1.0,b=1.0`.
    pub fn parse(key: &str) -> Result<Self> {
        const WHAT: &str = "symbol key";
        let k = CatalogKey::parse(WHAT, key)?;
        let entry = match k.family {
            "stable" => {
                let p = k.take(WHAT, &["alpha"], &[None])?;
                SymbolCatalogEntry::Stable { alpha: p[0] }
            }
            "tempered" | "tempered-stable" => {
                let p = k.take(WHAT, &["alpha", "theta"], &[None, None])?;
                SymbolCatalogEntry::TemperedStable {
                    alpha: p[0],
                    theta: p[1],
                }
            }
            "gamma" => {
                let p = k.take(WHAT, &["a", "b"], &[None, None])?;
                SymbolCatalogEntry::Gamma { a: p[0], b: p[1] }
            }
            other => return Err(Error::parse(WHAT, key, format!("unknown family `{other}`"))),
        };
        entry.validate()?;
        Ok(entry)
    }

    fn validate(&self) -> Result<()> {
        let alpha_ok = |alpha: f64| alpha > 0.0 && alpha < 1.0;
        match *self {
            SymbolCatalogEntry::Stable { alpha } if alpha_ok(alpha) => Ok(()),
            SymbolCatalogEntry::TemperedStable { alpha, theta } if alpha_ok(alpha) && theta > 0.0 => Ok(()),
            SymbolCatalogEntry::Gamma { a, b } if a > 0.0 && b > 0.0 => Ok(()),
            _ => Err(Error::parameter(
                "symbol catalog",
                format!("{self:?}: need alpha in (0,1), theta > 0, a > 0, b > 0"),
            )),
        }
    }

    pub fn key(&self) -> String {
        match *self {
            SymbolCatalogEntry::Stable { alpha } => format!("stable:alpha={alpha}"),
            SymbolCatalogEntry::TemperedStable { alpha, theta } => {
                format!("tempered:alpha={alpha},theta={theta}")
            }
            SymbolCatalogEntry::Gamma { a, b } => format!("gamma:a={a},b={b}"),
        }
    }
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Lévy measure given only numerically.
#[derive(Clone)]
pub struct CustomMeasure {
    density: DensityFn,
    tail: Option<DensityFn>,
    singularity_index: f64,
}

#[derive(Clone)]
enum Family {
    Catalog(SymbolCatalogEntry),
    Custom(CustomMeasure),
}

/// One subordinator family. Immutable once built; cheap to clone.
#[derive(Clone)]
pub struct LevySymbol {
    name: String,
    family: Family,
}

impl fmt::Debug for LevySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevySymbol").field("name", &self.name).finish()
    }
}

/// Jump size below which measure integrals use the linearised integrand.
pub const LINEARISE_BELOW: f64 = 1e-7;

/// Smallest jump size resolved by direct quadrature; the density must be
/// finite (no overflow) above it.
pub const ORIGIN_CUTOFF: f64 = 1e-150;

fn measure_settings() -> QuadSettings {
    QuadSettings {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_segments: 4000,
    }
}

impl LevySymbol {
    pub fn from_entry(entry: SymbolCatalogEntry) -> Result<Self> {
        entry.validate()?;
        Ok(Self {
            name: entry.key(),
            family: Family::Catalog(entry),
        })
    }

    /// Build from a catalog key.
    pub fn from_key(key: &str) -> Result<Self> {
        Self::from_entry(SymbolCatalogEntry::parse(key)?)
    }

    pub fn stable(alpha: f64) -> Result<Self> {
        Self::from_entry(SymbolCatalogEntry::Stable { alpha })
    }

    pub fn tempered(alpha: f64, theta: f64) -> Result<Self> {
        Self::from_entry(SymbolCatalogEntry::TemperedStable { alpha, theta })
    }

    pub fn gamma(a: f64, b: f64) -> Result<Self> {
        Self::from_entry(SymbolCatalogEntry::Gamma { a, b })
    }

    /// A symbol known only through its Lévy density.
    ///
    /// `singularity_index` is the exponent `β` with density `≍ y^{-β-1}` at
    /// the origin (`0` for logarithmic tails such as the gamma family). The
    /// measure must have infinite mass; finite-activity measures are
    /// rejected.
    pub fn custom(
        name: impl Into<String>,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tail: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
        singularity_index: f64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&singularity_index) {
            return Err(Error::parameter(
                "custom symbol",
                format!("singularity index must lie in [0, 1), got {singularity_index}"),
            ));
        }
        let sym = Self {
            name: name.into(),
            family: Family::Custom(CustomMeasure {
                density: Arc::new(density),
                tail,
                singularity_index,
            }),
        };
        sym.validate_infinite_activity()?;
        let mass = sym.integrate_measure(|y| y.min(1.0), 1.0)?;
        if !mass.value.is_finite() {
            return Err(Error::parameter("custom symbol", "∫(1∧y)Π(dy) diverges"));
        }
        Ok(sym)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn catalog_entry(&self) -> Option<SymbolCatalogEntry> {
        match &self.family {
            Family::Catalog(e) => Some(*e),
            Family::Custom(_) => None,
        }
    }

    /// Exponent `β` of the density singularity `y^{-β-1}` at zero.
    pub fn singularity_index(&self) -> f64 {
        match &self.family {
            Family::Catalog(SymbolCatalogEntry::Stable { alpha })
            | Family::Catalog(SymbolCatalogEntry::TemperedStable { alpha, .. }) => *alpha,
            Family::Catalog(SymbolCatalogEntry::Gamma { .. }) => 0.0,
            Family::Custom(c) => c.singularity_index,
        }
    }

    /// Lévy density of `Π` at `y > 0`.
    pub fn levy_density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::Catalog(SymbolCatalogEntry::Stable { alpha }) => alpha / gamma(1.0 - alpha) * y.powf(-alpha - 1.0),
            Family::Catalog(SymbolCatalogEntry::TemperedStable { alpha, theta }) => {
                alpha / gamma(1.0 - alpha) * (-theta * y).exp() * y.powf(-alpha - 1.0)
            }
            Family::Catalog(SymbolCatalogEntry::Gamma { a, b }) => a * (-b * y).exp() / y,
            Family::Custom(c) => (c.density)(y),
        }
    }

    /// `∫_0^∞ g(y) Π(dy)` for `g = O(y)` at the origin and `|g| ≤ g_sup`.
    ///
    /// The integral is split at `y = 1`. On `(0, 1)` the substitution
    /// `y = s^{1/(1-β)}` removes the density singularity; on `(1, ∞)` the
    /// log-substituted integral is extended panel by panel until the tail
    /// bound `g_sup · Π̄(Y)` (or, without a tail, the last panel) is
    /// negligible.
    pub fn integrate_measure<G: FnMut(f64) -> f64>(&self, mut g: G, g_sup: f64) -> Result<Quad> {
        self.integrate_measure_with(&mut g, g_sup, &[], measure_settings())
    }

    /// As [`integrate_measure`](Self::integrate_measure), additionally
    /// splitting at the jump sizes in `breaks` (kinks of `g`).
    ///
    /// Below `LINEARISE_BELOW` the integrand is replaced by its linear part
    /// `g'(0) y`, with the slope from an extrapolated one-sided difference.
    /// This keeps cancellation in `g` from being amplified by the density,
    /// and for densities close to `y^{-2}` it captures mass sitting at
    /// scales floating point cannot resolve by substitution alone.
    pub fn integrate_measure_with<G: FnMut(f64) -> f64>(
        &self,
        g: &mut G,
        g_sup: f64,
        breaks: &[f64],
        settings: QuadSettings,
    ) -> Result<Quad> {
        let beta = self.singularity_index();
        let mut edges: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite() && *b > 1e-12).collect();
        edges.push(1.0);
        edges.sort_by(|a, b| a.total_cmp(b));
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
        let first = edges[0];
        let cut = LINEARISE_BELOW.min(0.01 * first);
        let h = (100.0 * cut).min(0.25 * first);
        let slope = 2.0 * g(h) / h - g(2.0 * h) / (2.0 * h);
        let origin = slope * self.small_jump_mean(cut)?;
        let mut total = integrate_shifted_origin(|y| g(y) * self.levy_density(y), cut, first, beta, settings)?;
        total.value += origin;
        for w in edges.windows(2) {
            total = total + integrate(|y| g(y) * self.levy_density(y), w[0], w[1], settings)?;
        }
        let last = *edges.last().expect("edges is nonempty");
        Ok(total + self.integrate_far(g, last, g_sup, settings)?)
    }

    /// `∫_ε^∞ g(y) Π(dy)`: the measure restricted to the jumps a truncated
    /// simulation keeps.
    pub fn integrate_measure_above<G: FnMut(f64) -> f64>(&self, mut g: G, eps: f64, g_sup: f64) -> Result<Quad> {
        require_positive("integrate_measure_above", "eps", eps)?;
        let settings = measure_settings();
        if eps >= 1.0 {
            return self.integrate_far(&mut g, eps, g_sup, settings);
        }
        let near = integrate(
            |v| {
                let y = v.exp();
                g(y) * self.levy_density(y) * y
            },
            eps.ln(),
            0.0,
            settings,
        )?;
        Ok(near + self.integrate_far(&mut g, 1.0, g_sup, settings)?)
    }

    /// Symbol of the truncated subordinator: drift `∫_0^ε y Π(dy)` plus the
    /// jumps above `ε`.
    pub fn phi_truncated(&self, lam: f64, eps: f64) -> Result<f64> {
        require_positive("phi_truncated", "lambda", lam)?;
        let jumps = self.integrate_measure_above(|y| -(-lam * y).exp_m1(), eps, 1.0)?;
        Ok(self.small_jump_mean(eps)? * lam + jumps.value)
    }

    /// `∫_a^∞ g(y) Π(dy)` for `a > 0` via `y = e^v`.
    fn integrate_far<G: FnMut(f64) -> f64>(
        &self,
        g: &mut G,
        a: f64,
        g_sup: f64,
        settings: QuadSettings,
    ) -> Result<Quad> {
        let v0 = a.ln();
        let mut lo = v0;
        let mut width = 2.0;
        let mut total = Quad::default();
        loop {
            let hi = lo + width;
            let piece = integrate(
                |v| {
                    let y = v.exp();
                    let val = g(y) * self.levy_density(y) * y;
                    if val.is_finite() {
                        val
                    } else {
                        0.0
                    }
                },
                lo,
                hi,
                settings,
            )?;
            total = total + piece;
            let y_hi = hi.exp();
            let remainder = match self.tail_closed_form(y_hi) {
                Some(t) => g_sup * t,
                None => piece.value.abs(),
            };
            let target = settings.abs_tol.max(1e-3 * settings.rel_tol * total.value.abs());
            if remainder <= target || hi > 700.0 {
                total.error += remainder;
                return Ok(total);
            }
            lo = hi;
            width *= 2.0;
        }
    }

    fn tail_closed_form(&self, z: f64) -> Option<f64> {
        match &self.family {
            Family::Catalog(SymbolCatalogEntry::Stable { alpha }) => Some(z.powf(-alpha) / gamma(1.0 - alpha)),
            Family::Catalog(SymbolCatalogEntry::TemperedStable { alpha, theta }) => {
                let x = theta * z;
                let upper = theta.powf(*alpha) * gamma(1.0 - alpha) * gamma_ur(1.0 - alpha, x);
                Some(((z.powf(-alpha) * (-x).exp()) - upper).max(0.0) / gamma(1.0 - alpha))
            }
            Family::Catalog(SymbolCatalogEntry::Gamma { a, b }) => exp_integral(b * z, 1).map(|e1| a * e1),
            Family::Custom(c) => c.tail.as_ref().map(|t| t(z)),
        }
    }

    /// `Φ(λ)`; closed form for catalog entries, quadrature otherwise.
    pub fn phi(&self, lam: f64) -> Result<f64> {
        require_positive("eval_symbol", "lambda", lam)?;
        match &self.family {
            Family::Catalog(SymbolCatalogEntry::Stable { alpha }) => Ok(lam.powf(*alpha)),
            Family::Catalog(SymbolCatalogEntry::TemperedStable { alpha, theta }) => {
                Ok((lam + theta).powf(*alpha) - theta.powf(*alpha))
            }
            Family::Catalog(SymbolCatalogEntry::Gamma { a, b }) => Ok(a * (lam / b).ln_1p()),
            Family::Custom(_) => Ok(self.phi_by_quadrature(lam)?.value),
        }
    }

    /// `Φ(λ)` by integrating `1 - e^{-λy}` against the Lévy density.
    pub fn phi_by_quadrature(&self, lam: f64) -> Result<Quad> {
        require_positive("eval_symbol", "lambda", lam)?;
        self.integrate_measure(|y| -(-lam * y).exp_m1(), 1.0)
    }

    /// `Φ(z)` on `Re z ≥ 0`, principal branch.
    pub fn phi_complex(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re >= 0.0) || !z.im.is_finite() {
            return Err(Error::domain("complex_symbol", format!("need Re z >= 0, got {z}")));
        }
        if z.im == 0.0 {
            if z.re == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            return Ok(Complex64::new(self.phi(z.re)?, 0.0));
        }
        match &self.family {
            Family::Catalog(SymbolCatalogEntry::Stable { alpha }) => Ok(z.powf(*alpha)),
            Family::Catalog(SymbolCatalogEntry::TemperedStable { alpha, theta }) => {
                Ok((z + theta).powf(*alpha) - theta.powf(*alpha))
            }
            Family::Catalog(SymbolCatalogEntry::Gamma { a, b }) => Ok((z / b + 1.0).ln() * *a),
            Family::Custom(_) => self.phi_complex_by_quadrature(z),
        }
    }

    /// `Φ(z)` from `∫(1 - e^{-zy}) Π(dy)`; the oscillatory part beyond `y = 1`
    /// goes through the accelerated half-period summation.
    pub fn phi_complex_by_quadrature(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re >= 0.0) {
            return Err(Error::domain("complex_symbol", format!("need Re z >= 0, got {z}")));
        }
        let settings = measure_settings();
        let beta = self.singularity_index();
        let near_re = integrate_singular_origin(
            |y| (1.0 - (-z.re * y).exp() * (z.im * y).cos()) * self.levy_density(y),
            1.0,
            beta,
            settings,
        )?;
        let near_im = integrate_singular_origin(
            |y| (-z.re * y).exp() * (z.im * y).sin() * self.levy_density(y),
            1.0,
            beta,
            settings,
        )?;
        let tail_one = self.tail(1.0)?;
        if z.im == 0.0 {
            let far = self.integrate_far(&mut |y: f64| -(-z.re * y).exp_m1(), 1.0, 1.0, settings)?;
            return Ok(Complex64::new(near_re.value + far.value, 0.0));
        }
        let (re, im, _) = oscillatory_tail(|y| (-z.re * y).exp() * self.levy_density(y), 1.0, z.im, settings)?;
        Ok(Complex64::new(near_re.value + tail_one - re, near_im.value - im))
    }

    /// `∫_a^∞ e^{-iωy} Π(dy)` for `a > 0`, `ω ≠ 0`.
    pub fn fourier_tail(&self, a: f64, omega: f64) -> Result<Complex64> {
        require_positive("fourier_tail", "a", a)?;
        let (re, im, _) = oscillatory_tail(|y| self.levy_density(y), a, omega, measure_settings())?;
        Ok(Complex64::new(re, im))
    }

    /// Tail `Π̄(z) = Π(z, ∞)`.
    pub fn tail(&self, z: f64) -> Result<f64> {
        require_positive("eval_tail", "z", z)?;
        match self.tail_closed_form(z) {
            Some(t) => Ok(t),
            None => Ok(self.tail_by_quadrature(z)?.value),
        }
    }

    /// Tail from the density: `∫_z^∞ π(y) dy` in log coordinates.
    pub fn tail_by_quadrature(&self, z: f64) -> Result<Quad> {
        require_positive("eval_tail", "z", z)?;
        let settings = measure_settings();
        let mut total = Quad::default();
        let mut lo = z.ln();
        let mut width = 2.0;
        loop {
            let hi = lo + width;
            let piece = integrate(
                |v| {
                    let y = v.exp();
                    self.levy_density(y) * y
                },
                lo,
                hi,
                settings,
            )?;
            total = total + piece;
            if piece.value.abs() <= 1e-16 * total.value.abs().max(1e-300) || hi > 700.0 {
                return Ok(total);
            }
            lo = hi;
            width *= 2.0;
        }
    }

    /// `∫_0^ε y Π(dy)`, the drift that compensates jumps below `ε`.
    pub fn small_jump_mean(&self, eps: f64) -> Result<f64> {
        require_positive("small_jump_mean", "eps", eps)?;
        match &self.family {
            Family::Catalog(SymbolCatalogEntry::Stable { alpha }) => Ok(alpha * eps.powf(1.0 - alpha) / gamma(2.0 - alpha)),
            Family::Catalog(SymbolCatalogEntry::TemperedStable { alpha, theta }) => {
                Ok(alpha * theta.powf(alpha - 1.0) * gamma_lr(1.0 - alpha, theta * eps))
            }
            Family::Catalog(SymbolCatalogEntry::Gamma { a, b }) => Ok(-a * (-b * eps).exp_m1() / b),
            Family::Custom(_) => Ok(integrate_singular_origin(
                |y| y * self.levy_density(y),
                eps,
                self.singularity_index(),
                measure_settings(),
            )?
            .value),
        }
    }

    /// `∫_0^ε (λy - 1 + e^{-λy}) Π(dy)`: the symbol error left by replacing
    /// jumps below `ε` with their mean drift. Always nonnegative.
    pub fn truncation_symbol_bias(&self, eps: f64, lam: f64) -> Result<f64> {
        require_positive("truncation_symbol_bias", "eps", eps)?;
        let q = integrate_singular_origin(
            |y| {
                let x = lam * y;
                // x + e^{-x} - 1, written to avoid cancellation for small x.
                let v = if x < 1e-3 { x * x * (0.5 - x / 6.0 + x * x / 24.0) } else { x + (-x).exp_m1() };
                v * self.levy_density(y)
            },
            eps,
            self.singularity_index(),
            measure_settings(),
        )?;
        Ok(q.value)
    }

    /// Rate of jumps larger than `ε`.
    pub fn jump_rate(&self, eps: f64) -> Result<f64> {
        self.tail(eps)
    }

    /// One jump of size `> ε` from the normalised restriction of `Π` to `(ε, ∞)`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, eps: f64, rng: &mut R) -> f64 {
        match &self.family {
            Family::Catalog(SymbolCatalogEntry::Stable { alpha }) => {
                let u: f64 = 1.0 - rng.random::<f64>();
                eps * u.powf(-1.0 / alpha)
            }
            Family::Catalog(SymbolCatalogEntry::TemperedStable { alpha, theta }) => loop {
                let u: f64 = 1.0 - rng.random::<f64>();
                let y = eps * u.powf(-1.0 / alpha);
                if rng.random::<f64>() < (-theta * (y - eps)).exp() {
                    return y;
                }
            },
            Family::Catalog(SymbolCatalogEntry::Gamma { a: _, b }) => {
                // Envelope masses: e^{-bε}/y on (ε, 1) and e^{-by}/L on (L, ∞).
                let outer_lo = eps.max(1.0);
                let inner = if eps < 1.0 { (-b * eps).exp() * (1.0 / eps).ln() } else { 0.0 };
                let outer = (-b * outer_lo).exp() / (b * outer_lo);
                loop {
                    if rng.random::<f64>() * (inner + outer) < inner {
                        // log-uniform on (ε, 1), accept with e^{-b(y-ε)}
                        let y = eps * (1.0 / eps).powf(rng.random::<f64>());
                        if rng.random::<f64>() < (-b * (y - eps)).exp() {
                            return y;
                        }
                    } else {
                        // shifted exponential on (max(ε,1), ∞), accept with lo/y
                        let e: f64 = -(1.0 - rng.random::<f64>()).ln() / b;
                        let y = outer_lo + e;
                        if rng.random::<f64>() < outer_lo / y {
                            return y;
                        }
                    }
                }
            }
            Family::Custom(_) => {
                let target_fraction: f64 = 1.0 - rng.random::<f64>();
                self.invert_tail(eps, target_fraction)
            }
        }
    }

    /// Solve `Π̄(y) = fraction · Π̄(ε)` by bisection in `ln y`.
    fn invert_tail(&self, eps: f64, fraction: f64) -> f64 {
        let Ok(base) = self.tail(eps) else { return eps };
        let target = fraction * base;
        let mut lo = eps.ln();
        let mut hi = lo + 1.0;
        while self.tail(hi.exp()).map(|t| t > target).unwrap_or(false) && hi < 700.0 {
            lo = hi;
            hi += (hi - eps.ln()).max(1.0);
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.tail(mid.exp()).map(|t| t > target).unwrap_or(false) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    /// Reject finite-activity measures: the tail must keep growing between
    /// `1e-8` and `1e-12`.
    fn validate_infinite_activity(&self) -> Result<()> {
        let t_small = self.tail(1e-12)?;
        let t_mid = self.tail(1e-8)?;
        if !(t_small - t_mid > 1e-3 * t_mid) {
            return Err(Error::parameter(
                "custom symbol",
                format!(
                    "measure looks finite near 0 (tail(1e-12) = {t_small:e}, tail(1e-8) = {t_mid:e}); only infinite-activity measures are supported"
                ),
            ));
        }
        Ok(())
    }
}

/// `Φ(λ)` for `λ > 0`.
pub fn eval_symbol(sym: &LevySymbol, lam: f64) -> Result<f64> {
    sym.phi(lam)
}

/// `Π̄(z)` for `z > 0`.
pub fn eval_tail(sym: &LevySymbol, z: f64) -> Result<f64> {
    sym.tail(z)
}

/// `Φ(z)` for `Re z ≥ 0`.
pub fn complex_symbol(sym: &LevySymbol, z: Complex64) -> Result<Complex64> {
    sym.phi_complex(z)
}

/// The custom-numeric twin of a catalog entry: same density, no closed
/// forms except (optionally) the tail.
pub fn numeric_twin(sym: &LevySymbol, keep_tail: bool) -> Result<LevySymbol> {
    let density_src = sym.clone();
    let tail = if keep_tail {
        let tail_src = sym.clone();
        let f: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |z| tail_src.tail(z).unwrap_or(f64::NAN));
        Some(f)
    } else {
        None
    };
    LevySymbol::custom(
        format!("numeric({})", sym.name()),
        move |y| density_src.levy_density(y),
        tail,
        sym.singularity_index(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::f64::consts::PI;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn parse_catalog_keys() {
        assert_eq!(
            SymbolCatalogEntry::parse("stable:alpha=0.5").unwrap(),
            SymbolCatalogEntry::Stable { alpha: 0.5 }
        );
        assert_eq!(
            SymbolCatalogEntry::parse("tempered:alpha=0.5,theta=1.0").unwrap(),
            SymbolCatalogEntry::TemperedStable { alpha: 0.5, theta: 1.0 }
        );
        assert_eq!(
            SymbolCatalogEntry::parse("gamma:a=1.0,b=2.0").unwrap(),
            SymbolCatalogEntry::Gamma { a: 1.0, b: 2.0 }
        );
        assert!(SymbolCatalogEntry::parse("stable:alpha=1.5").is_err());
        assert!(SymbolCatalogEntry::parse("stable:alpha=0.5,beta=2").is_err());
        assert!(SymbolCatalogEntry::parse("cauchy:alpha=0.5").is_err());
        assert!(SymbolCatalogEntry::parse("tempered:alpha=0.5").is_err());
    }

    #[test]
    fn stable_closed_forms() {
        let s = LevySymbol::stable(0.5).unwrap();
        assert!((s.phi(4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(s.phi(1e-8).unwrap() < 1e-3);
        assert!((s.tail(1.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-12);
        assert!(s.tail(1e6).unwrap() < 1e-2 * s.tail(1.0).unwrap());
        assert!(s.phi(0.0).is_err());
        assert!(s.phi(-1.0).is_err());
        assert!(s.tail(0.0).is_err());
    }

    #[test]
    fn stable_tail_matches_density_integral() {
        // Oracle: integrate the density from 1 to ∞ directly.
        let s = LevySymbol::stable(0.5).unwrap();
        let q = s.tail_by_quadrature(1.0).unwrap();
        assert!((q.value - 0.564_189_583_547_756_3).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn catalog_phi_matches_quadrature() {
        for key in ["stable:alpha=0.3", "stable:alpha=0.7", "tempered:alpha=0.5,theta=1.0", "gamma:a=1.0,b=1.0"] {
            let s = LevySymbol::from_key(key).unwrap();
            for lam in [0.25, 1.0, 4.0, 16.0] {
                let closed = s.phi(lam).unwrap();
                let quad = s.phi_by_quadrature(lam).unwrap().value;
                assert!(rel(quad, closed) < 1e-6, "{key} λ={lam}: {quad} vs {closed}");
            }
        }
    }

    #[test]
    fn quadrature_survives_index_near_one() {
        for alpha in [0.9, 0.99, 0.999] {
            let s = LevySymbol::stable(alpha).unwrap();
            for lam in [0.5, 2.0] {
                let q = s.phi_by_quadrature(lam).unwrap().value;
                assert!(rel(q, lam.powf(alpha)) < 1e-6, "α={alpha} λ={lam}: {q}");
            }
        }
    }

    #[test]
    fn numeric_route_reproduces_stable() {
        let s = LevySymbol::stable(0.5).unwrap();
        let twin = numeric_twin(&s, false).unwrap();
        let v = twin.phi(1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let t = twin.tail(1.0).unwrap();
        assert!(rel(t, 1.0 / PI.sqrt()) < 1e-6);
    }

    #[test]
    fn tails_match_quadrature() {
        for key in ["tempered:alpha=0.5,theta=1.0", "tempered:alpha=0.3,theta=2.5", "gamma:a=1.0,b=1.0", "gamma:a=2.0,b=0.5"] {
            let s = LevySymbol::from_key(key).unwrap();
            for z in [1e-3, 0.1, 1.0, 3.0] {
                let closed = s.tail(z).unwrap();
                let quad = s.tail_by_quadrature(z).unwrap().value;
                assert!(rel(closed, quad) < 1e-9, "{key} z={z}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn complex_principal_branch() {
        let s = LevySymbol::stable(0.5).unwrap();
        let v = s.phi_complex(Complex64::new(0.0, 1.0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v - Complex64::new(h, h)).norm() < 1e-14);
        let q = s.phi_complex_by_quadrature(Complex64::new(0.0, 1.0)).unwrap();
        assert!((q - v).norm() < 1e-6, "{q}");
        assert!(s.phi_complex(Complex64::new(-0.1, 1.0)).is_err());
    }

    #[test]
    fn complex_restriction_and_conjugate_symmetry() {
        for key in ["stable:alpha=0.5", "tempered:alpha=0.4,theta=1.0", "gamma:a=1.0,b=1.0"] {
            let s = LevySymbol::from_key(key).unwrap();
            let re = s.phi_complex(Complex64::new(2.5, 0.0)).unwrap();
            assert!((re.re - s.phi(2.5).unwrap()).abs() < 1e-12 && re.im == 0.0);
            let z = Complex64::new(1.0, 2.0);
            let a = s.phi_complex_by_quadrature(z).unwrap();
            let b = s.phi_complex_by_quadrature(z.conj()).unwrap();
            assert!((a - b.conj()).norm() < 1e-8, "{key}: {a} {b}");
            let closed = s.phi_complex(z).unwrap();
            assert!((a - closed).norm() < 1e-6, "{key}: {a} vs {closed}");
        }
    }

    #[test]
    fn tail_laplace_identity() {
        // ∫ e^{-λz} Π̄(z) dz = Φ(λ)/λ, the tail integrated with the origin substitution.
        let s = LevySymbol::stable(0.5).unwrap();
        let near = integrate_singular_origin(|z| (-z).exp() * s.tail(z).unwrap(), 1.0, 0.5, QuadSettings::default()).unwrap();
        let far = integrate(|z| (-z).exp() * s.tail(z).unwrap(), 1.0, 60.0, QuadSettings::default()).unwrap();
        assert!((near.value + far.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn small_jump_mean_monotone_to_zero() {
        for key in ["stable:alpha=0.5", "tempered:alpha=0.5,theta=1.0", "gamma:a=1.0,b=1.0"] {
            let s = LevySymbol::from_key(key).unwrap();
            let vals: Vec<f64> = (1..=6).map(|k| s.small_jump_mean(10f64.powi(-k)).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "{key}: {vals:?}");
            assert!(vals[5] < 1e-2 * vals[0].max(1e-300).max(vals[0]));
            let twin = numeric_twin(&s, true).unwrap();
            let q = twin.small_jump_mean(1e-2).unwrap();
            assert!(rel(q, s.small_jump_mean(1e-2).unwrap()) < 1e-8, "{key}");
        }
    }

    #[test]
    fn bernstein_divided_differences() {
        for key in ["stable:alpha=0.3", "tempered:alpha=0.6,theta=0.5", "gamma:a=1.0,b=3.0"] {
            let s = LevySymbol::from_key(key).unwrap();
            let grid: Vec<f64> = (0..40).map(|k| 10f64.powf(-4.0 + 0.2 * k as f64)).collect();
            let vals: Vec<f64> = grid.iter().map(|&l| s.phi(l).unwrap()).collect();
            let first: Vec<f64> = (0..grid.len() - 1).map(|i| (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i])).collect();
            assert!(first.iter().all(|&d| d >= 0.0));
            let mids: Vec<f64> = (0..grid.len() - 1).map(|i| 0.5 * (grid[i] + grid[i + 1])).collect();
            for i in 0..first.len() - 1 {
                assert!((first[i + 1] - first[i]) / (mids[i + 1] - mids[i]) <= 1e-12, "{key} at {i}");
            }
        }
    }

    #[test]
    fn truncated_symbol_bias_is_second_order() {
        let s = LevySymbol::stable(0.5).unwrap();
        for eps in [1e-2, 1e-4] {
            let gap = s.phi_truncated(1.0, eps).unwrap() - s.phi(1.0).unwrap();
            let bias = s.truncation_symbol_bias(eps, 1.0).unwrap();
            assert!(gap > 0.0 && (gap - bias).abs() < 1e-9, "{gap} {bias}");
        }
    }

    #[test]
    fn finite_activity_rejected() {
        let r = LevySymbol::custom("poisson-like", |y: f64| (-y).exp(), None, 0.0);
        assert!(r.is_err());
    }

    #[test]
    fn jump_samplers_follow_truncated_measure() {
        // Empirical P(J > z) against Π̄(z)/Π̄(ε).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for key in ["stable:alpha=0.5", "tempered:alpha=0.5,theta=1.0", "gamma:a=1.0,b=1.0"] {
            let s = LevySymbol::from_key(key).unwrap();
            let eps = 1e-3;
            let n = 200_000;
            let z = 0.05;
            let hits = (0..n).filter(|_| s.sample_jump(eps, &mut rng) > z).count() as f64 / n as f64;
            let p = s.tail(z).unwrap() / s.tail(eps).unwrap();
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits - p).abs() < 4.0 * se, "{key}: {hits} vs {p}");
        }
    }
}
