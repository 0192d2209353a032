use rand::Rng;

use super::{Interpolation, PathKind, ReflectedPath, SamplePath, SubordinatorPath};
use crate::error::{require_positive, Error, Result};

/// `B•_t = H(L(γ_t)) - γ_t + B⁺_t` at the grid times of `rp`.
///
/// The overshoot `H(L(x))` is read from the jump list of `H`, which is
/// extended as far as the final local time requires.
pub fn compose_bullet<R: Rng + ?Sized>(rp: &ReflectedPath, sub: &mut SubordinatorPath, rng: &mut R) -> Result<SamplePath> {
    let gamma = &rp.local_time.values;
    let top = *gamma.last().expect("nonempty path");
    sub.extend_to_level(top, rng);
    let mut values = Vec::with_capacity(gamma.len());
    let post = sub.post_jump();
    let pre = sub.pre_jump();
    // γ is nondecreasing, so the straddling jump index only moves forward.
    let mut i = 0;
    for (&g, &b) in gamma.iter().zip(&rp.reflected.values) {
        while i < post.len() && post[i] <= g {
            i += 1;
        }
        let over = if i == post.len() {
            // Past the last stored jump: only a complete path covers this.
            sub.overshoot(g)
                .map_err(|_| Error::range("compose_bullet", format!("local time {g} beyond the simulated subordinator")))?
        } else if pre[i] <= g {
            post[i]
        } else {
            g
        };
        let v = over - g + b;
        if v < -1e-9 {
            return Err(Error::numeric("compose_bullet", format!("negative value {v} at local time {g}")));
        }
        values.push(v.max(0.0));
    }
    SamplePath::new(rp.reflected.t_grid.clone(), values, PathKind::Composed, Interpolation::Linear)
}

/// The one-sided sticky path on a real-time grid.
#[derive(Debug, Clone)]
pub struct StickyPath {
    pub path: SamplePath,
    /// Excursion unit (counted in the Brownian clock) of each grid point.
    pub unit_index: Vec<usize>,
    pub on_plateau: Vec<bool>,
    /// Real-time plateaus `[T(u-), T(u))`, one per clock step with a jump.
    pub plateaus: Vec<(f64, f64)>,
    /// `T_u = u + H(η γ_u)` on the Brownian grid.
    pub clock: Vec<f64>,
    pub initial_sign: Option<f64>,
}

/// `B^s_t = B⁺(T^{-1}(t))` with `T_u = u + H(η γ_u)`.
///
/// Within a clock step the increase of `H(ηγ)` is laid out first, as a
/// plateau at zero, followed by the Brownian step itself.
pub fn build_sticky<R: Rng + ?Sized>(
    rp: &ReflectedPath,
    sub: &mut SubordinatorPath,
    eta: f64,
    query_grid: &[f64],
    rng: &mut R,
) -> Result<StickyPath> {
    require_positive("build_sticky", "eta", eta)?;
    let gamma = &rp.local_time.values;
    let u = &rp.local_time.t_grid;
    let b = &rp.reflected.values;
    let top = *gamma.last().expect("nonempty path");
    sub.extend_to_time(eta * top, rng);
    let h: Vec<f64> = gamma.iter().map(|&g| sub.value(eta * g)).collect::<Result<_>>()?;
    let clock: Vec<f64> = u.iter().zip(&h).map(|(u, h)| u + h).collect();
    let mut units = Vec::with_capacity(gamma.len());
    let mut unit = 0;
    for k in 0..gamma.len() {
        if k > 0 && gamma[k] > gamma[k - 1] {
            unit += 1;
        }
        units.push(unit);
    }
    let t_max = *clock.last().expect("nonempty");
    if query_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::parameter("build_sticky", "query grid must be strictly increasing"));
    }
    let mut values = Vec::with_capacity(query_grid.len());
    let mut unit_index = Vec::with_capacity(query_grid.len());
    let mut on_plateau = Vec::with_capacity(query_grid.len());
    let mut j = 1;
    for &t in query_grid {
        if !(t >= 0.0 && t <= t_max) {
            return Err(Error::range(
                "build_sticky",
                format!("time {t} beyond the sticky clock range {t_max}; extend the horizon"),
            ));
        }
        if t <= clock[0] {
            values.push(b[0]);
            unit_index.push(units[0]);
            on_plateau.push(false);
            continue;
        }
        while j + 1 < clock.len() && clock[j] < t {
            j += 1;
        }
        let plateau_end = clock[j - 1] + (h[j] - h[j - 1]);
        if t < plateau_end {
            values.push(0.0);
            on_plateau.push(true);
        } else {
            let w = ((t - plateau_end) / (clock[j] - plateau_end)).clamp(0.0, 1.0);
            values.push(b[j - 1] + w * (b[j] - b[j - 1]));
            on_plateau.push(false);
        }
        unit_index.push(units[j]);
    }
    let plateaus = (1..h.len())
        .filter(|&k| h[k] > h[k - 1])
        .map(|k| (clock[k - 1], clock[k - 1] + h[k] - h[k - 1]))
        .collect();
    Ok(StickyPath {
        path: SamplePath::new(query_grid.to_vec(), values, PathKind::Composed, Interpolation::Linear)?,
        unit_index,
        on_plateau,
        plateaus,
        clock,
        initial_sign: (rp.start > 0.0).then_some(rp.start_sign),
    })
}
