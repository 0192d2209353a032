use rand::Rng;

use super::{grid_steps, Interpolation, PathKind, SamplePath};
use crate::error::{Error, Result};
use crate::levy_symbols::LevySymbol;

/// A subordinator path stored as its jump list: `H(s) = d·s + Σ_{t_i ≤ s} J_i`.
///
/// Jumps larger than `ε` arrive as a Poisson process of rate `Π̄(ε)`; smaller
/// jumps are replaced by the drift `d = ∫_0^ε y Π(dy)`. The path is extended
/// lazily, so the time or level it covers grows with the queries.
#[derive(Debug, Clone)]
pub struct SubordinatorPath {
    sym: Option<LevySymbol>,
    eps: f64,
    rate: f64,
    drift: f64,
    times: Vec<f64>,
    pre: Vec<f64>,
    post: Vec<f64>,
    /// No jumps beyond the stored ones.
    complete: bool,
}

impl SubordinatorPath {
    pub fn new(sym: &LevySymbol, eps: f64) -> Result<Self> {
        crate::error::require_positive("subordinator", "eps_trunc", eps)?;
        let rate = sym.jump_rate(eps)?;
        let drift = sym.small_jump_mean(eps)?;
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::parameter("subordinator", format!("jump rate {rate} above ε = {eps}")));
        }
        Ok(Self {
            sym: Some(sym.clone()),
            eps,
            rate,
            drift,
            times: Vec::new(),
            pre: Vec::new(),
            post: Vec::new(),
            complete: false,
        })
    }

    /// A fixed path with the given drift and `(time, size)` jumps and no randomness.
    pub fn deterministic(drift: f64, jumps: &[(f64, f64)]) -> Result<Self> {
        if !(drift >= 0.0) {
            return Err(Error::parameter("subordinator", "drift must be nonnegative"));
        }
        let mut out = Self {
            sym: None,
            eps: 0.0,
            rate: 0.0,
            drift,
            times: Vec::new(),
            pre: Vec::new(),
            post: Vec::new(),
            complete: true,
        };
        let mut last_t = 0.0;
        let mut last_h = 0.0;
        for &(t, j) in jumps {
            if !(t > last_t || (out.times.is_empty() && t >= 0.0)) || !(j > 0.0) {
                return Err(Error::parameter("subordinator", "jump times must increase and sizes be positive"));
            }
            let q = last_h + drift * (t - last_t);
            out.times.push(t);
            out.pre.push(q);
            out.post.push(q + j);
            last_t = t;
            last_h = q + j;
        }
        Ok(out)
    }

    /// The identity path `H(s) = s`.
    pub fn identity() -> Self {
        Self::deterministic(1.0, &[]).expect("valid identity")
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn truncation(&self) -> f64 {
        self.eps
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.times
    }

    /// Post-jump values `H(t_i)`.
    pub fn post_jump(&self) -> &[f64] {
        &self.post
    }

    /// Pre-jump values `H(t_i-)`.
    pub fn pre_jump(&self) -> &[f64] {
        &self.pre
    }

    pub fn jump_sizes(&self) -> impl Iterator<Item = f64> + '_ {
        self.pre.iter().zip(&self.post).map(|(q, p)| p - q)
    }

    fn push_next_jump<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let sym = self.sym.as_ref().expect("random paths carry their symbol");
        let e = -(1.0 - rng.random::<f64>()).ln();
        let (t0, h0) = match (self.times.last(), self.post.last()) {
            (Some(&t), Some(&h)) => (t, h),
            _ => (0.0, 0.0),
        };
        let wait = e / self.rate;
        let t = t0 + wait;
        let q = h0 + self.drift * wait;
        let j = sym.sample_jump(self.eps, rng);
        self.times.push(t);
        self.pre.push(q);
        self.post.push(q + j);
    }

    /// Simulate until the first jump after time `s`.
    pub fn extend_to_time<R: Rng + ?Sized>(&mut self, s: f64, rng: &mut R) {
        if self.complete {
            return;
        }
        while self.times.last().is_none_or(|&t| t <= s) {
            self.push_next_jump(rng);
        }
    }

    /// Simulate until the path exceeds level `x`.
    pub fn extend_to_level<R: Rng + ?Sized>(&mut self, x: f64, rng: &mut R) {
        if self.complete {
            return;
        }
        while self.post.last().is_none_or(|&h| h <= x) {
            self.push_next_jump(rng);
        }
    }

    fn covers_time(&self, s: f64) -> bool {
        self.complete || self.times.last().is_some_and(|&t| t > s)
    }

    fn covers_level(&self, x: f64) -> bool {
        self.complete && self.drift > 0.0 || self.post.last().is_some_and(|&h| h > x)
    }

    /// `H(s)`, right-continuous.
    pub fn value(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain("subordinator value", format!("time {s} < 0")));
        }
        if !self.covers_time(s) {
            return Err(Error::range("subordinator value", format!("time {s} beyond the simulated path")));
        }
        let i = self.times.partition_point(|&t| t <= s);
        Ok(if i == 0 {
            self.drift * s
        } else {
            self.post[i - 1] + self.drift * (s - self.times[i - 1])
        })
    }

    /// `H(s-)`.
    pub fn left_limit(&self, s: f64) -> Result<f64> {
        if !self.covers_time(s) {
            return Err(Error::range("subordinator value", format!("time {s} beyond the simulated path")));
        }
        let i = self.times.partition_point(|&t| t < s);
        Ok(if i == 0 {
            self.drift * s
        } else {
            self.post[i - 1] + self.drift * (s - self.times[i - 1])
        })
    }

    /// `L(x) = inf{s : H(s) > x}`.
    pub fn inverse(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        if !self.covers_level(x) {
            return Err(Error::range("inverse subordinator", format!("level {x} beyond the simulated path")));
        }
        let i = self.post.partition_point(|&h| h <= x);
        if i < self.post.len() && self.pre[i] <= x {
            return Ok(self.times[i]);
        }
        let (t0, h0) = if i == 0 { (0.0, 0.0) } else { (self.times[i - 1], self.post[i - 1]) };
        if self.drift > 0.0 {
            Ok(t0 + (x - h0) / self.drift)
        } else {
            Ok(t0)
        }
    }

    /// `H(L(x))`: equals `x` when `x` is crossed continuously and the
    /// post-jump value when a jump straddles `x`.
    pub fn overshoot(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::domain("overshoot", format!("level {x} < 0")));
        }
        if !self.covers_level(x) {
            return Err(Error::range("overshoot", format!("level {x} beyond the simulated path")));
        }
        let i = self.post.partition_point(|&h| h <= x);
        if i < self.post.len() && self.pre[i] <= x {
            return Ok(self.post[i]);
        }
        Ok(x)
    }

    /// Index of the jump whose range `[H(t_i-), H(t_i))` contains `x`, if any.
    pub fn straddling_jump(&self, x: f64) -> Option<usize> {
        let i = self.post.partition_point(|&h| h <= x);
        (i < self.post.len() && self.pre[i] <= x).then_some(i)
    }

    /// Values `H(t)` on a grid.
    pub fn on_grid(&self, t_grid: &[f64]) -> Result<SamplePath> {
        let values = t_grid.iter().map(|&t| self.value(t)).collect::<Result<Vec<_>>>()?;
        SamplePath::new(t_grid.to_vec(), values, PathKind::Subordinator, Interpolation::StepRight)
    }
}

/// Compound-Poisson subordinator with small-jump compensation on a uniform grid.
pub fn simulate_subordinator<R: Rng + ?Sized>(
    sym: &LevySymbol,
    horizon: f64,
    dt: f64,
    eps_trunc: f64,
    rng: &mut R,
) -> Result<(SamplePath, SubordinatorPath)> {
    let n = grid_steps("simulate_subordinator", horizon, dt)?;
    let mut sub = SubordinatorPath::new(sym, eps_trunc)?;
    if sub.rate * dt > 1.0 {
        return Err(Error::parameter(
            "simulate_subordinator",
            format!(
                "{:.3} expected jumps per step (rate {:.3e} above ε = {eps_trunc:e}); use dt below {:.3e} or a larger ε",
                sub.rate * dt,
                sub.rate,
                1.0 / sub.rate
            ),
        ));
    }
    let grid = SamplePath::uniform_grid(dt, n);
    sub.extend_to_time(*grid.last().expect("nonempty grid"), rng);
    let path = sub.on_grid(&grid)?;
    Ok((path, sub))
}

/// Right-continuous inverse `L(q) = inf{s : H(s) > q}` of a nondecreasing path.
pub fn invert_nondecreasing(path: &SamplePath, query_grid: &[f64]) -> Result<SamplePath> {
    if !path.is_nondecreasing() {
        return Err(Error::domain("invert_nondecreasing", "path is not nondecreasing"));
    }
    let top = *path.values.last().expect("nonempty");
    let mut out = Vec::with_capacity(query_grid.len());
    for &q in query_grid {
        if !(q < top) {
            return Err(Error::range(
                "invert_nondecreasing",
                format!("level {q} is not exceeded within the horizon (max {top}); extend the horizon"),
            ));
        }
        let k = path.values.partition_point(|&h| h <= q);
        let s = if k == 0 {
            path.t_grid[0]
        } else {
            match path.interpolation {
                Interpolation::StepRight => path.t_grid[k],
                Interpolation::Linear => {
                    let (h0, h1) = (path.values[k - 1], path.values[k]);
                    let (t0, t1) = (path.t_grid[k - 1], path.t_grid[k]);
                    t0 + (q - h0) / (h1 - h0) * (t1 - t0)
                }
            }
        };
        out.push(s);
    }
    let grid: Vec<f64> = query_grid.to_vec();
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::parameter("invert_nondecreasing", "query grid must be strictly increasing"));
    }
    SamplePath::new(grid, out, PathKind::InverseSubordinator, Interpolation::Linear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path_engine::rng::{stream_rng, Component};

    #[test]
    fn identity_inverts_to_identity() {
        let grid = SamplePath::uniform_grid(0.01, 300);
        let h = SamplePath::new(grid.clone(), grid.clone(), PathKind::Subordinator, Interpolation::Linear).unwrap();
        let q: Vec<f64> = (0..100).map(|k| 0.025 * k as f64).collect();
        let l = invert_nondecreasing(&h, &q).unwrap();
        for (a, b) in q.iter().zip(&l.values) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(invert_nondecreasing(&h, &[5.0]).is_err());
    }

    #[test]
    fn staircase_has_plateau() {
        let grid = SamplePath::uniform_grid(0.01, 300);
        let vals: Vec<f64> = grid.iter().map(|&s| s + if s >= 1.0 - 1e-12 { 1.0 } else { 0.0 }).collect();
        let h = SamplePath::new(grid, vals, PathKind::Subordinator, Interpolation::StepRight).unwrap();
        let l = invert_nondecreasing(&h, &[1.2, 1.5, 1.9]).unwrap();
        for v in l.values {
            assert!((v - 1.0).abs() < 1e-9, "{v}");
        }
        let sub = SubordinatorPath::deterministic(1.0, &[(1.0, 1.0)]).unwrap();
        assert_eq!(sub.inverse(1.5).unwrap(), 1.0);
        assert_eq!(sub.overshoot(1.5).unwrap(), 2.0);
        assert_eq!(sub.overshoot(0.5).unwrap(), 0.5);
        assert_eq!(sub.value(1.0).unwrap(), 2.0);
        assert_eq!(sub.left_limit(1.0).unwrap(), 1.0);
        assert_eq!(sub.inverse(2.5).unwrap(), 1.5);
    }

    #[test]
    fn random_path_is_consistent() {
        let sym = LevySymbol::stable(0.5).unwrap();
        let mut rng = stream_rng(11, 0, Component::Subordinator);
        let (path, mut sub) = simulate_subordinator(&sym, 2.0, 1e-3, 1e-4, &mut rng).unwrap();
        assert_eq!(path.values[0], 0.0);
        assert!(path.is_nondecreasing());
        sub.extend_to_level(50.0, &mut rng);
        for k in 0..200 {
            let s = 0.01 * k as f64;
            let h = sub.value(s).unwrap();
            // Right-inverse inequalities.
            assert!(sub.inverse(h).unwrap() >= s - 1e-9, "{s}");
            let x = 0.1 * k as f64;
            assert!(sub.value(sub.inverse(x).unwrap()).unwrap() >= x - 1e-9);
            assert!(sub.overshoot(x).unwrap() >= x);
        }
    }

    #[test]
    fn too_coarse_grid_rejected() {
        let sym = LevySymbol::stable(0.5).unwrap();
        let mut rng = stream_rng(1, 0, Component::Subordinator);
        assert!(simulate_subordinator(&sym, 1.0, 0.1, 1e-6, &mut rng).is_err());
    }
}
