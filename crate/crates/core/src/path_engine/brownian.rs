use rand::Rng;
use rand_distr::StandardNormal;

use super::{grid_steps, Interpolation, PathKind, SamplePath};
use crate::error::{Error, Result};

/// Brownian motion from 0 with `Normal(0, 2·dt)` increments.
pub fn simulate_bm<R: Rng + ?Sized>(horizon: f64, dt: f64, rng: &mut R) -> Result<SamplePath> {
    let n = grid_steps("simulate_bm", horizon, dt)?;
    let scale = (2.0 * dt).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut b = 0.0;
    values.push(b);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        b += scale * z;
        values.push(b);
    }
    SamplePath::new(SamplePath::uniform_grid(dt, n), values, PathKind::Bm, Interpolation::Linear)
}

/// Skorokhod reflection at grid resolution: `γ = -min_{s≤t} B_s`, `B⁺ = B + γ`.
pub fn reflect_with_local_time(bm: &SamplePath) -> Result<(SamplePath, SamplePath)> {
    if bm.kind != PathKind::Bm {
        return Err(Error::domain("reflect_with_local_time", format!("expected a bm path, got {:?}", bm.kind)));
    }
    if bm.values[0] != 0.0 {
        return Err(Error::domain(
            "reflect_with_local_time",
            format!(
                "path starts at {}; reflection from the interior is available through simulate_reflected",
                bm.values[0]
            ),
        ));
    }
    let mut running_min: f64 = 0.0;
    let mut reflected = Vec::with_capacity(bm.len());
    let mut local = Vec::with_capacity(bm.len());
    for &b in &bm.values {
        running_min = running_min.min(b);
        local.push(-running_min);
        reflected.push(b - running_min);
    }
    Ok((
        SamplePath::new(bm.t_grid.clone(), reflected, PathKind::Reflected, Interpolation::Linear)?,
        SamplePath::new(bm.t_grid.clone(), local, PathKind::LocalTime, Interpolation::Linear)?,
    ))
}

/// Reflected Brownian motion and its local time at zero, exact in law at
/// grid times.
#[derive(Debug, Clone)]
pub struct ReflectedPath {
    pub reflected: SamplePath,
    pub local_time: SamplePath,
    /// `|x|` for a start at `x`.
    pub start: f64,
    /// Sign of the excursion in progress at time 0 (`+1` when starting at 0).
    pub start_sign: f64,
}

/// Reflected Brownian motion started at `|x|` with local time at zero.
///
/// Within each step the minimum of the Brownian bridge between the grid
/// values is sampled exactly (for variance `2·dt`,
/// `P(min < y) = exp(-(a-y)(b-y)/dt)`), so `γ` and `B⁺` are exact at grid
/// times rather than read off the discrete minimum.
pub fn simulate_reflected<R: Rng + ?Sized>(x: f64, horizon: f64, dt: f64, rng: &mut R) -> Result<ReflectedPath> {
    if !x.is_finite() {
        return Err(Error::parameter("simulate_reflected", format!("start {x} is not finite")));
    }
    let n = grid_steps("simulate_reflected", horizon, dt)?;
    let scale = (2.0 * dt).sqrt();
    let start = x.abs();
    let mut reflected = Vec::with_capacity(n + 1);
    let mut local = Vec::with_capacity(n + 1);
    let mut a = start;
    let mut running_min = start;
    let mut gamma = 0.0;
    reflected.push(start);
    local.push(0.0);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        let b = a + scale * z;
        // P(bridge min < m) = exp(-(a-m)(b-m)/dt); below e^{-40} the draw is skipped.
        let m = running_min.min(0.0);
        if (a - m) * (b - m) < 40.0 * dt {
            let e = -(1.0 - rng.random::<f64>()).ln();
            let bridge_min = 0.5 * ((a + b) - ((a - b) * (a - b) + 4.0 * dt * e).sqrt());
            if bridge_min < running_min {
                running_min = bridge_min;
                gamma = (-running_min).max(0.0);
            }
        }
        reflected.push(b + gamma);
        local.push(gamma);
        a = b;
    }
    let t_grid = SamplePath::uniform_grid(dt, n);
    Ok(ReflectedPath {
        reflected: SamplePath::new(t_grid.clone(), reflected, PathKind::Reflected, Interpolation::Linear)?,
        local_time: SamplePath::new(t_grid, local, PathKind::LocalTime, Interpolation::Linear)?,
        start,
        start_sign: if x < 0.0 { -1.0 } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path_engine::rng::{stream_rng, Component};

    #[test]
    fn bm_starts_at_zero_with_variance_two_t() {
        let n = 20_000;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for i in 0..n {
            let mut rng = stream_rng(1, i, Component::Brownian);
            let p = simulate_bm(1.0, 0.05, &mut rng).unwrap();
            assert_eq!(p.values[0], 0.0);
            let b = *p.values.last().unwrap();
            s1 += b;
            s2 += b * b;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 3.0 * (2.0 / n as f64).sqrt());
        // Var of the sample variance of N(0,2) is 2σ⁴/n = 8/n.
        assert!((var - 2.0).abs() < 4.0 * (8.0 / n as f64).sqrt(), "{var}");
    }

    #[test]
    fn monotone_path_has_no_local_time() {
        let grid = SamplePath::uniform_grid(0.1, 10);
        let vals: Vec<f64> = grid.iter().map(|t| t * t).collect();
        let bm = SamplePath::new(grid, vals.clone(), PathKind::Bm, Interpolation::Linear).unwrap();
        let (r, l) = reflect_with_local_time(&bm).unwrap();
        assert!(l.values.iter().all(|&g| g == 0.0));
        assert_eq!(r.values, vals);
    }

    #[test]
    fn interior_start_rejected_by_grid_reflection() {
        let grid = SamplePath::uniform_grid(0.1, 3);
        let bm = SamplePath::new(grid, vec![1.0, 0.5, 0.2, 0.1], PathKind::Bm, Interpolation::Linear).unwrap();
        assert!(reflect_with_local_time(&bm).is_err());
    }

    #[test]
    fn bridged_local_time_matches_levy_identity() {
        // γ_1 has the law of |B_1|: mean √(4/π), even on a coarse grid.
        let n = 40_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for i in 0..n {
            let mut rng = stream_rng(3, i, Component::Brownian);
            let p = simulate_reflected(0.0, 1.0, 0.1, &mut rng).unwrap();
            let g = *p.local_time.values.last().unwrap();
            acc += g;
            acc2 += g * g;
        }
        let mean = acc / n as f64;
        let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
        let exact = (4.0 / std::f64::consts::PI).sqrt();
        assert!((mean - exact).abs() < 4.0 * se, "{mean} vs {exact}");
    }

    #[test]
    fn started_away_from_zero_has_no_local_time_before_hitting() {
        let mut rng = stream_rng(5, 0, Component::Brownian);
        let p = simulate_reflected(-3.0, 0.01, 0.001, &mut rng).unwrap();
        assert_eq!(p.start, 3.0);
        assert_eq!(p.start_sign, -1.0);
        assert!(p.local_time.values.iter().all(|&g| g == 0.0));
    }
}
