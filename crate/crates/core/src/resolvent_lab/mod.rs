//! Closed-form Laplace-domain resolvents of the interface processes and the
//! Monte Carlo estimators that check them path by path.
//!
//! All processes use the generator `∂²_x`, so `E_x e^{-λτ₀} = e^{-√λ|x|}`
//! and the resolvent started at `x` splits into the killed branch on the
//! side of `x` plus `e^{-√λ|x|}` times the resolvent at zero.

mod analytic;
mod mc;
mod test_functions;

pub use analytic::{
    bm_resolvent, bullet_zero_resolvent, compose_full, dirichlet_flux, dirichlet_resolvent,
    dirichlet_resolvent_mirrored, full_resolvent, full_resolvent_truncated, killed_resolvent, one_sided_derivative,
    skew_zero_resolvent, sticky_resolvent_zero, sticky_skew_zero_resolvent, zero_resolvent, zero_resolvent_truncated,
};
pub use mc::{mc_mean_at_time, mc_resolvent, sample_at_time, simulate_path, McSettings, MeanEstimate, ResolventEstimate};
pub use test_functions::TestFunction;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::levy_symbols::LevySymbol;

/// Half-line branch of a two-sided process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    /// Brownian motion on the line.
    Bm,
    /// `B⁺`, reflected at zero.
    Reflected,
    /// Skew Brownian motion: `B⁺` with i.i.d. excursion signs.
    Skew,
    /// `B• = H(L(γ)) - γ + B⁺`.
    Bullet,
    SkewBullet,
    /// `B⁺∘T^{-1}` with `T_t = t + H(ηγ_t)`.
    Sticky,
    SkewSticky,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 7] = [
        ProcessKind::Bm,
        ProcessKind::Reflected,
        ProcessKind::Skew,
        ProcessKind::Bullet,
        ProcessKind::SkewBullet,
        ProcessKind::Sticky,
        ProcessKind::SkewSticky,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
            Error::parse("process kind", s, format!("expected one of {}", names.join(", ")))
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Bm => "bm",
            ProcessKind::Reflected => "reflected",
            ProcessKind::Skew => "skew",
            ProcessKind::Bullet => "bullet",
            ProcessKind::SkewBullet => "skew-bullet",
            ProcessKind::Sticky => "sticky",
            ProcessKind::SkewSticky => "skew-sticky",
        }
    }

    /// Lives on `[0, ∞)`.
    pub fn is_one_sided(self) -> bool {
        matches!(self, ProcessKind::Reflected | ProcessKind::Bullet | ProcessKind::Sticky)
    }

    pub fn is_skew(self) -> bool {
        matches!(self, ProcessKind::Skew | ProcessKind::SkewBullet | ProcessKind::SkewSticky)
    }

    pub fn is_sticky(self) -> bool {
        matches!(self, ProcessKind::Sticky | ProcessKind::SkewSticky)
    }

    pub fn uses_subordinator(self) -> bool {
        matches!(
            self,
            ProcessKind::Bullet | ProcessKind::SkewBullet | ProcessKind::Sticky | ProcessKind::SkewSticky
        )
    }
}

impl std::fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Symbol, skewness `ν` and stickiness `η` shared by all process kinds;
/// each kind reads the ones it needs.
#[derive(Debug, Clone)]
pub struct ProcessParams {
    pub sym: LevySymbol,
    pub nu: f64,
    pub eta: f64,
}

impl ProcessParams {
    pub fn new(sym: LevySymbol, nu: f64, eta: f64) -> Result<Self> {
        let p = Self { sym, nu, eta };
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::parameter("process parameters", format!("nu = {nu} must lie in [0, 1]")));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::parameter("process parameters", format!("eta = {eta} must be finite and nonnegative")));
        }
        Ok(p)
    }

    pub fn validate_for(&self, kind: ProcessKind) -> Result<()> {
        if kind.is_sticky() {
            require_positive(kind.name(), "eta", self.eta)?;
        }
        Ok(())
    }
}
