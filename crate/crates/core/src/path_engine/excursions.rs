use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Interpolation, PathKind, ReflectedPath, SamplePath, StickyPath, SubordinatorPath};
use crate::error::{Error, Result};

/// How excursion signs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignPolicy {
    /// Independent signs, `+1` with probability `ν`.
    #[default]
    IidBernoulli,
}

/// Skewness and stickiness parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewConfig {
    pub nu: f64,
    /// Stickiness scale; `0` means no sticky clock.
    pub eta: f64,
    pub seed: u64,
    #[serde(default)]
    pub sign_policy: SignPolicy,
}

impl SkewConfig {
    pub fn new(nu: f64, eta: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            nu,
            eta,
            seed,
            sign_policy: SignPolicy::IidBernoulli,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `ν ∈ [0, 1]` (the endpoints give one-sided processes) and `η ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::domain("skew config", format!("nu = {} outside [0, 1]", self.nu)));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::domain("skew config", format!("eta = {} must be finite and >= 0", self.eta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    Excursion,
    Plateau,
}

/// Grid indices `start_index..end_index` belonging to one excursion or plateau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub start_index: usize,
    pub end_index: usize,
    pub start: f64,
    pub end: f64,
    pub kind: IntervalKind,
    pub sign: f64,
}

/// Excursion intervals of a nonnegative path, enumerated by left endpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcursionDecomposition {
    pub intervals: Vec<Interval>,
    /// Sign of the interval in progress at time 0 when the path starts away
    /// from zero; that interval is not re-signed.
    pub initial_sign: Option<f64>,
}

impl ExcursionDecomposition {
    /// Sign of each grid index.
    pub fn sign_per_index(&self) -> Vec<f64> {
        let n = self.intervals.last().map_or(0, |iv| iv.end_index);
        let mut out = vec![1.0; n];
        for iv in &self.intervals {
            for s in &mut out[iv.start_index..iv.end_index] {
                *s = iv.sign;
            }
        }
        out
    }

    pub fn excursion_count(&self) -> usize {
        self.intervals.iter().filter(|iv| iv.kind == IntervalKind::Excursion).count()
    }

    fn from_units(t_grid: &[f64], units: &[(usize, IntervalKind)], initial_sign: Option<f64>) -> Self {
        let mut intervals: Vec<Interval> = Vec::new();
        let horizon = *t_grid.last().unwrap_or(&0.0);
        for (k, &(unit, kind)) in units.iter().enumerate() {
            let same = k > 0 && units[k - 1] == (unit, kind);
            if same {
                continue;
            }
            if let Some(last) = intervals.last_mut() {
                last.end_index = k;
                last.end = t_grid[k];
            }
            intervals.push(Interval {
                start_index: k,
                end_index: units.len(),
                start: t_grid[k],
                end: horizon,
                kind,
                sign: 1.0,
            });
        }
        Self {
            intervals,
            initial_sign,
        }
    }
}

fn initial_sign_of(rp: &ReflectedPath) -> Option<f64> {
    (rp.start > 0.0).then_some(rp.start_sign)
}

/// Excursions of `B⁺`: a new one starts in every step where `γ` increases.
pub fn excursions_of_reflected(rp: &ReflectedPath) -> ExcursionDecomposition {
    let g = &rp.local_time.values;
    let mut unit = 0;
    let units: Vec<(usize, IntervalKind)> = (0..g.len())
        .map(|k| {
            if k > 0 && g[k] > g[k - 1] {
                unit += 1;
            }
            (unit, IntervalKind::Excursion)
        })
        .collect();
    ExcursionDecomposition::from_units(&rp.local_time.t_grid, &units, initial_sign_of(rp))
}

/// Excursions of `B•`: `γ` increased and did not stay inside one jump of `H`.
///
/// While `γ` moves within `[H(t_i-), H(t_i))` the overshoot stays at `H(t_i)`
/// and `B•` stays away from zero, so the excursion continues.
pub fn excursions_of_bullet(rp: &ReflectedPath, sub: &SubordinatorPath) -> ExcursionDecomposition {
    let g = &rp.local_time.values;
    let mut unit = 0;
    let units: Vec<(usize, IntervalKind)> = (0..g.len())
        .map(|k| {
            if k > 0 && g[k] > g[k - 1] {
                let a = sub.straddling_jump(g[k - 1]);
                let same_jump = a.is_some() && a == sub.straddling_jump(g[k]);
                if !same_jump {
                    unit += 1;
                }
            }
            (unit, IntervalKind::Excursion)
        })
        .collect();
    ExcursionDecomposition::from_units(&rp.local_time.t_grid, &units, initial_sign_of(rp))
}

/// Plateaus and excursions of a sticky path on its real-time grid. A
/// plateau and the excursion that follows it form one unit.
pub fn excursions_of_sticky(sp: &StickyPath) -> ExcursionDecomposition {
    let units: Vec<(usize, IntervalKind)> = sp
        .unit_index
        .iter()
        .zip(&sp.on_plateau)
        .map(|(&u, &p)| (u, if p { IntervalKind::Plateau } else { IntervalKind::Excursion }))
        .collect();
    ExcursionDecomposition::from_units(&sp.path.t_grid, &units, sp.initial_sign)
}

/// Draw i.i.d. signs, `+1` with probability `ν`. A plateau draws the sign
/// for itself and the excursion right after it.
pub fn skew_signs<R: Rng + ?Sized>(
    decomp: &ExcursionDecomposition,
    cfg: &SkewConfig,
    rng: &mut R,
) -> Result<ExcursionDecomposition> {
    cfg.validate()?;
    let mut out = decomp.clone();
    let mut pending: Option<f64> = None;
    let draw = |rng: &mut R| if rng.random::<f64>() < cfg.nu { 1.0 } else { -1.0 };
    for (m, iv) in out.intervals.iter_mut().enumerate() {
        if m == 0 {
            if let Some(s) = decomp.initial_sign {
                iv.sign = s;
                continue;
            }
        }
        iv.sign = match iv.kind {
            IntervalKind::Plateau => {
                let s = draw(rng);
                pending = Some(s);
                s
            }
            IntervalKind::Excursion => pending.take().unwrap_or_else(|| draw(rng)),
        };
    }
    Ok(out)
}

/// Multiply each interval of `path` by its sign.
pub fn apply_signs(path: &SamplePath, decomp: &ExcursionDecomposition) -> Result<SamplePath> {
    let signs = decomp.sign_per_index();
    if signs.len() != path.len() {
        return Err(Error::parameter(
            "apply_signs",
            format!("decomposition covers {} points, path has {}", signs.len(), path.len()),
        ));
    }
    let values = path.values.iter().zip(&signs).map(|(v, s)| v * s).collect();
    SamplePath::new(path.t_grid.clone(), values, PathKind::Composed, Interpolation::Linear)
}
