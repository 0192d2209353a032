use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ProcessKind, ProcessParams, TestFunction};
use crate::error::{require_positive, Error, Result};
use crate::path_engine::rng::{stream_rng, Component};
use crate::path_engine::{
    apply_signs, build_sticky, compose_bullet, excursions_of_bullet, excursions_of_reflected, excursions_of_sticky,
    path_laplace_functional, simulate_bm, simulate_reflected, skew_signs, sticky_laplace_functional, SamplePath,
    SkewConfig, SubordinatorPath,
};

/// Ensemble settings shared by the Monte Carlo estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub n_paths: usize,
    pub dt: f64,
    /// Simulated time; `None` picks `T` with `e^{-λT} = truncation_target`.
    pub horizon: Option<f64>,
    pub truncation_target: f64,
    /// Jumps of the subordinator below this size are replaced by drift.
    pub eps_trunc: f64,
    pub seed: u64,
    /// Standard errors above this mark the estimate inconclusive.
    pub max_std_error: Option<f64>,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            n_paths: 10_000,
            dt: 1e-3,
            horizon: None,
            truncation_target: 2e-4,
            eps_trunc: 1e-4,
            seed: 0,
            max_std_error: None,
        }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(Error::parameter("mc settings", "at least two paths are needed for a standard error"));
        }
        require_positive("mc settings", "dt", self.dt)?;
        require_positive("mc settings", "eps_trunc", self.eps_trunc)?;
        if !(self.truncation_target > 0.0 && self.truncation_target < 1.0) {
            return Err(Error::parameter(
                "mc settings",
                format!("truncation_target = {} must lie in (0, 1)", self.truncation_target),
            ));
        }
        if let Some(h) = self.horizon {
            require_positive("mc settings", "horizon", h)?;
        }
        Ok(())
    }

    pub fn horizon_for(&self, lam: f64) -> f64 {
        self.horizon.unwrap_or_else(|| (1.0 / self.truncation_target).ln() / lam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_paths: usize,
    /// Bound on the discarded `∫_T^∞ e^{-λt} f(X_t) dt`.
    pub truncation_bound: f64,
    pub inconclusive: bool,
}

impl ResolventEstimate {
    /// `3·SE + truncation_bound`.
    pub fn tolerance(&self) -> f64 {
        3.0 * self.std_error + self.truncation_bound
    }

    /// `|value - analytic| ≤ tolerance + bias`.
    pub fn agrees_with(&self, analytic: f64, bias: f64) -> bool {
        (self.value - analytic).abs() <= self.tolerance() + bias
    }
}

/// Sample mean of `f(X_t)` at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub inconclusive: bool,
}

impl MeanEstimate {
    pub fn agrees_with(&self, analytic: f64, bias: f64) -> bool {
        (self.value - analytic).abs() <= 3.0 * self.std_error + bias
    }
}

/// Mean and standard error, summed in path order so the result does not
/// depend on the thread pool.
fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn check_kind(kind: ProcessKind, params: &ProcessParams, x: f64) -> Result<()> {
    params.validate_for(kind)?;
    if !x.is_finite() {
        return Err(Error::parameter("mc", format!("start x = {x} is not finite")));
    }
    if kind.is_one_sided() && x < 0.0 {
        return Err(Error::domain("mc", format!("{kind} lives on [0, ∞); start x = {x} is outside")));
    }
    Ok(())
}

fn skew_config(params: &ProcessParams, seed: u64) -> Result<SkewConfig> {
    SkewConfig::new(params.nu, params.eta, seed)
}

/// `(functional, truncation bound)` of path `i`.
fn path_functional(
    kind: ProcessKind,
    params: &ProcessParams,
    f: &TestFunction,
    x: f64,
    lam: f64,
    horizon: f64,
    settings: &McSettings,
    i: u64,
) -> Result<(f64, f64)> {
    let seed = settings.seed;
    let mut rng_b = stream_rng(seed, i, Component::Brownian);
    let ev = |v: f64| f.eval(v);
    let sup = f.sup();
    let out = match kind {
        ProcessKind::Bm => {
            let mut p = simulate_bm(horizon, settings.dt, &mut rng_b)?;
            p.values.iter_mut().for_each(|v| *v += x);
            path_laplace_functional(&p, ev, sup, lam)?
        }
        ProcessKind::Reflected | ProcessKind::Skew => {
            let rp = simulate_reflected(x, horizon, settings.dt, &mut rng_b)?;
            if kind == ProcessKind::Skew {
                let dec = skew_signs(
                    &excursions_of_reflected(&rp),
                    &skew_config(params, seed)?,
                    &mut stream_rng(seed, i, Component::Signs),
                )?;
                path_laplace_functional(&apply_signs(&rp.reflected, &dec)?, ev, sup, lam)?
            } else {
                path_laplace_functional(&rp.reflected, ev, sup, lam)?
            }
        }
        ProcessKind::Bullet | ProcessKind::SkewBullet => {
            let rp = simulate_reflected(x, horizon, settings.dt, &mut rng_b)?;
            let mut sub = SubordinatorPath::new(&params.sym, settings.eps_trunc)?;
            let path = compose_bullet(&rp, &mut sub, &mut stream_rng(seed, i, Component::Subordinator))?;
            if kind == ProcessKind::SkewBullet {
                let dec = skew_signs(
                    &excursions_of_bullet(&rp, &sub),
                    &skew_config(params, seed)?,
                    &mut stream_rng(seed, i, Component::Signs),
                )?;
                path_laplace_functional(&apply_signs(&path, &dec)?, ev, sup, lam)?
            } else {
                path_laplace_functional(&path, ev, sup, lam)?
            }
        }
        ProcessKind::Sticky | ProcessKind::SkewSticky => {
            let rp = simulate_reflected(x, horizon, settings.dt, &mut rng_b)?;
            let mut sub = SubordinatorPath::new(&params.sym, settings.eps_trunc)?;
            let top = *rp.local_time.values.last().expect("nonempty path");
            sub.extend_to_time(params.eta * top, &mut stream_rng(seed, i, Component::Subordinator));
            let signs = if kind == ProcessKind::SkewSticky {
                let dec = skew_signs(
                    &excursions_of_reflected(&rp),
                    &skew_config(params, seed)?,
                    &mut stream_rng(seed, i, Component::Signs),
                )?;
                Some(dec.sign_per_index())
            } else {
                None
            };
            sticky_laplace_functional(&rp, &sub, params.eta, signs.as_deref(), ev, sup, lam)?
        }
    };
    Ok((out.value, out.truncation_bound))
}

/// Mean of `∫_0^T e^{-λt} f(X_t) dt` over independent paths started at `x`.
///
/// Path `i` draws from its own streams, so the estimate is bit-identical
/// for a given seed whatever the number of threads.
pub fn mc_resolvent(
    kind: ProcessKind,
    params: &ProcessParams,
    f: &TestFunction,
    x: f64,
    lam: f64,
    settings: &McSettings,
) -> Result<ResolventEstimate> {
    settings.validate()?;
    require_positive("mc_resolvent", "lambda", lam)?;
    check_kind(kind, params, x)?;
    let horizon = settings.horizon_for(lam);
    let samples: Vec<(f64, f64)> = (0..settings.n_paths as u64)
        .into_par_iter()
        .map(|i| path_functional(kind, params, f, x, lam, horizon, settings, i))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let truncation_bound = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let (value, std_error) = mean_and_se(&values);
    Ok(ResolventEstimate {
        value,
        std_error,
        n_paths: settings.n_paths,
        truncation_bound,
        inconclusive: settings.max_std_error.is_some_and(|m| std_error > m),
    })
}

fn last(path: &SamplePath) -> f64 {
    *path.values.last().expect("nonempty path")
}

/// `X_t` for path `i` (`t` must be a multiple of `dt`).
fn path_value_at(
    kind: ProcessKind,
    params: &ProcessParams,
    x: f64,
    t: f64,
    settings: &McSettings,
    i: u64,
) -> Result<f64> {
    let seed = settings.seed;
    let mut rng_b = stream_rng(seed, i, Component::Brownian);
    let mut rng_s = stream_rng(seed, i, Component::Signs);
    let dt = settings.dt;
    let signed_last = |dec: &crate::path_engine::ExcursionDecomposition, v: f64| {
        *dec.sign_per_index().last().expect("nonempty decomposition") * v
    };
    Ok(match kind {
        ProcessKind::Bm => x + last(&simulate_bm(t, dt, &mut rng_b)?),
        ProcessKind::Reflected => last(&simulate_reflected(x, t, dt, &mut rng_b)?.reflected),
        ProcessKind::Skew => {
            let rp = simulate_reflected(x, t, dt, &mut rng_b)?;
            let dec = skew_signs(&excursions_of_reflected(&rp), &skew_config(params, seed)?, &mut rng_s)?;
            signed_last(&dec, last(&rp.reflected))
        }
        ProcessKind::Bullet | ProcessKind::SkewBullet => {
            let rp = simulate_reflected(x, t, dt, &mut rng_b)?;
            let mut sub = SubordinatorPath::new(&params.sym, settings.eps_trunc)?;
            let path = compose_bullet(&rp, &mut sub, &mut stream_rng(seed, i, Component::Subordinator))?;
            if kind == ProcessKind::SkewBullet {
                let dec = skew_signs(&excursions_of_bullet(&rp, &sub), &skew_config(params, seed)?, &mut rng_s)?;
                signed_last(&dec, last(&path))
            } else {
                last(&path)
            }
        }
        ProcessKind::Sticky | ProcessKind::SkewSticky => {
            // T_u ≥ u, so the Brownian clock never needs to run past t.
            let rp = simulate_reflected(x, t, dt, &mut rng_b)?;
            let mut sub = SubordinatorPath::new(&params.sym, settings.eps_trunc)?;
            let sp = build_sticky(
                &rp,
                &mut sub,
                params.eta,
                &[t],
                &mut stream_rng(seed, i, Component::Subordinator),
            )?;
            let v = sp.path.values[0];
            if kind == ProcessKind::SkewSticky {
                let dec = skew_signs(&excursions_of_sticky(&sp), &skew_config(params, seed)?, &mut rng_s)?;
                signed_last(&dec, v)
            } else {
                v
            }
        }
    })
}

/// `X_t` for each of `settings.n_paths` paths started at `x`, in path order.
pub fn sample_at_time(
    kind: ProcessKind,
    params: &ProcessParams,
    x: f64,
    t: f64,
    settings: &McSettings,
) -> Result<Vec<f64>> {
    settings.validate()?;
    require_positive("sample_at_time", "t", t)?;
    check_kind(kind, params, x)?;
    let steps = t / settings.dt;
    if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
        return Err(Error::parameter("sample_at_time", format!("t = {t} is not a multiple of dt = {}", settings.dt)));
    }
    (0..settings.n_paths as u64)
        .into_par_iter()
        .map(|i| path_value_at(kind, params, x, t, settings, i))
        .collect()
}

/// Path `i` of the ensemble on the grid `0, dt, ..., horizon`, drawn from
/// the same streams as [`sample_at_time`].
pub fn simulate_path(
    kind: ProcessKind,
    params: &ProcessParams,
    x: f64,
    horizon: f64,
    settings: &McSettings,
    i: u64,
) -> Result<SamplePath> {
    settings.validate()?;
    check_kind(kind, params, x)?;
    let seed = settings.seed;
    let dt = settings.dt;
    let mut rng_b = stream_rng(seed, i, Component::Brownian);
    let mut rng_s = stream_rng(seed, i, Component::Signs);
    match kind {
        ProcessKind::Bm => {
            let mut p = simulate_bm(horizon, dt, &mut rng_b)?;
            p.values.iter_mut().for_each(|v| *v += x);
            Ok(p)
        }
        ProcessKind::Reflected => Ok(simulate_reflected(x, horizon, dt, &mut rng_b)?.reflected),
        ProcessKind::Skew => {
            let rp = simulate_reflected(x, horizon, dt, &mut rng_b)?;
            let dec = skew_signs(&excursions_of_reflected(&rp), &skew_config(params, seed)?, &mut rng_s)?;
            apply_signs(&rp.reflected, &dec)
        }
        ProcessKind::Bullet | ProcessKind::SkewBullet => {
            let rp = simulate_reflected(x, horizon, dt, &mut rng_b)?;
            let mut sub = SubordinatorPath::new(&params.sym, settings.eps_trunc)?;
            let path = compose_bullet(&rp, &mut sub, &mut stream_rng(seed, i, Component::Subordinator))?;
            if kind == ProcessKind::SkewBullet {
                let dec = skew_signs(&excursions_of_bullet(&rp, &sub), &skew_config(params, seed)?, &mut rng_s)?;
                apply_signs(&path, &dec)
            } else {
                Ok(path)
            }
        }
        ProcessKind::Sticky | ProcessKind::SkewSticky => {
            let rp = simulate_reflected(x, horizon, dt, &mut rng_b)?;
            let grid = rp.reflected.t_grid.clone();
            let mut sub = SubordinatorPath::new(&params.sym, settings.eps_trunc)?;
            let sp = build_sticky(
                &rp,
                &mut sub,
                params.eta,
                &grid,
                &mut stream_rng(seed, i, Component::Subordinator),
            )?;
            if kind == ProcessKind::SkewSticky {
                let dec = skew_signs(&excursions_of_sticky(&sp), &skew_config(params, seed)?, &mut rng_s)?;
                apply_signs(&sp.path, &dec)
            } else {
                Ok(sp.path)
            }
        }
    }
}

/// Sample mean of `f(X_t)` over paths started at `x`.
pub fn mc_mean_at_time(
    kind: ProcessKind,
    params: &ProcessParams,
    f: &TestFunction,
    x: f64,
    t: f64,
    settings: &McSettings,
) -> Result<MeanEstimate> {
    let values: Vec<f64> = sample_at_time(kind, params, x, t, settings)?.into_iter().map(|v| f.eval(v)).collect();
    let (value, std_error) = mean_and_se(&values);
    Ok(MeanEstimate {
        value,
        std_error,
        n_paths: settings.n_paths,
        inconclusive: settings.max_std_error.is_some_and(|m| std_error > m),
    })
}
