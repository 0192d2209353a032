//! Path-by-path construction of Brownian motion, its reflection and local
//! time, subordinators and their inverses, and the jump, skew and sticky
//! processes built from them.
//!
//! All Brownian paths use the generator `∂²_x`: increments over a step `dt`
//! are `Normal(0, 2·dt)`.

mod brownian;
mod compose;
mod excursions;
mod functional;
pub mod rng;
mod subordinator;

pub use brownian::{reflect_with_local_time, simulate_bm, simulate_reflected, ReflectedPath};
pub use compose::{build_sticky, compose_bullet, StickyPath};
pub use excursions::{
    apply_signs, excursions_of_bullet, excursions_of_reflected, excursions_of_sticky, skew_signs,
    ExcursionDecomposition, Interval, IntervalKind, SkewConfig,
};
pub use functional::{path_laplace_functional, sticky_laplace_functional, LaplaceFunctional};
pub use subordinator::{invert_nondecreasing, simulate_subordinator, SubordinatorPath};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a [`SamplePath`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    Bm,
    Reflected,
    LocalTime,
    Subordinator,
    InverseSubordinator,
    Composed,
}

/// How values between grid points are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Piecewise linear between grid values.
    Linear,
    /// Right-continuous step: the value at `t_k` holds on `[t_k, t_{k+1})`.
    StepRight,
}

/// Values on a uniform time grid starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: PathKind,
    pub interpolation: Interpolation,
}

impl SamplePath {
    pub fn new(t_grid: Vec<f64>, values: Vec<f64>, kind: PathKind, interpolation: Interpolation) -> Result<Self> {
        if t_grid.len() != values.len() || t_grid.is_empty() {
            return Err(Error::parameter(
                "sample path",
                format!("grid of length {} with {} values", t_grid.len(), values.len()),
            ));
        }
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::parameter("sample path", "time grid must be strictly increasing"));
        }
        Ok(Self {
            t_grid,
            values,
            kind,
            interpolation,
        })
    }

    /// Uniform grid `k·dt`, `k = 0..=n`.
    pub fn uniform_grid(dt: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| k as f64 * dt).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.t_grid.len() < 2 {
            0.0
        } else {
            self.t_grid[1] - self.t_grid[0]
        }
    }

    pub fn horizon(&self) -> f64 {
        *self.t_grid.last().expect("paths are nonempty")
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at time `t` within the grid range.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let t0 = self.t_grid[0];
        let t1 = self.horizon();
        if !(t >= t0 && t <= t1) {
            return Err(Error::range(
                "sample path",
                format!("t = {t} outside the simulated range [{t0}, {t1}]; extend the horizon"),
            ));
        }
        let k = self.t_grid.partition_point(|&s| s <= t).saturating_sub(1);
        if k + 1 >= self.len() || self.t_grid[k] == t {
            return Ok(self.values[k]);
        }
        match self.interpolation {
            Interpolation::StepRight => Ok(self.values[k]),
            Interpolation::Linear => {
                let w = (t - self.t_grid[k]) / (self.t_grid[k + 1] - self.t_grid[k]);
                Ok(self.values[k] + w * (self.values[k + 1] - self.values[k]))
            }
        }
    }
}

pub(crate) fn grid_steps(op: &'static str, horizon: f64, dt: f64) -> Result<usize> {
    crate::error::require_positive(op, "horizon", horizon)?;
    crate::error::require_positive(op, "dt", dt)?;
    if !(dt < horizon) {
        return Err(Error::parameter(op, format!("dt = {dt} must be smaller than the horizon {horizon}")));
    }
    let n = (horizon / dt - 1e-9).ceil() as usize;
    if n > 200_000_000 {
        return Err(Error::parameter(op, format!("{n} grid steps is beyond the supported size")));
    }
    Ok(n)
}
