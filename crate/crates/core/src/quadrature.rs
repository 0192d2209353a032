//! Adaptive Gauss-Kronrod quadrature and the helpers built on it.
//!
//! Everything in the crate that integrates a deterministic function goes
//! through [`integrate`]: a 21-point Kronrod rule with an embedded 10-point
//! Gauss rule for the error estimate, bisecting the worst panel until the
//! requested tolerance is met. Oscillatory half-line tails use
//! [`oscillatory_tail`], which sums half-period panels and accelerates the
//! partial sums with Wynn's epsilon algorithm.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_323_111,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_segments: 4000,
        }
    }
}

impl QuadSettings {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl std::ops::Add for Quad {
    type Output = Quad;

    fn add(self, rhs: Quad) -> Quad {
        Quad {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

impl Quad {
    pub fn scale(self, factor: f64) -> Quad {
        Quad {
            value: self.value * factor,
            error: self.error * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut lo = [0.0; 10];
    let mut hi = [0.0; 10];
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = fc.abs() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        lo[j] = f1;
        hi[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    // QUADPACK-style rescaling of the raw Gauss/Kronrod difference.
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((lo[j] - mean).abs() + (hi[j] - mean).abs());
    }
    asc *= half.abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let res_abs = abs_sum * half.abs();
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` (finite).
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, settings: QuadSettings) -> Result<Quad> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::numeric("integrate", format!("non-finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quad::default());
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut evaluations = 0usize;
    let mut counted = |x: f64| {
        evaluations += 1;
        f(x)
    };
    let (value, error) = kronrod21(&mut counted, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a: lo, b: hi, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > settings.abs_tol.max(settings.rel_tol * total.abs()) {
        if !total.is_finite() {
            break;
        }
        if heap.len() >= settings.max_segments {
            return Err(Error::numeric(
                "integrate",
                format!(
                    "no convergence on [{lo}, {hi}] after {} segments: value {total:e}, error {total_err:e}",
                    heap.len()
                ),
            ));
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point; accept it.
            heap.push(Segment { error: 0.0, ..worst });
            total_err = heap.iter().map(|s| s.error).sum();
            continue;
        }
        let (v1, e1) = kronrod21(&mut counted, worst.a, mid);
        let (v2, e2) = kronrod21(&mut counted, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        // Re-sum occasionally to avoid drift in the running totals.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    if !value.is_finite() {
        return Err(Error::numeric("integrate", format!("non-finite integral on [{lo}, {hi}]")));
    }
    Ok(Quad {
        value: sign * value,
        error,
        evaluations,
    })
}

/// Integrate over `[a, b]` with the interval pre-split at `breakpoints`.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    settings: QuadSettings,
) -> Result<Quad> {
    let mut points: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut edges = Vec::with_capacity(points.len() + 2);
    edges.push(a);
    edges.extend(points);
    edges.push(b);
    let mut total = Quad::default();
    for w in edges.windows(2) {
        total = total + integrate(&mut f, w[0], w[1], settings)?;
    }
    Ok(total)
}

/// `∫_0^L f(y) dy` for an integrand behaving like `y^{-beta}` at the origin.
///
/// Uses `y = L s^p` with `p = 1/(1-beta)`, which turns power singularities
/// into bounded integrands. `beta <= 0` (bounded or logarithmic behaviour)
/// uses `p = 2`.
pub fn integrate_singular_origin<F: FnMut(f64) -> f64>(
    mut f: F,
    length: f64,
    beta: f64,
    settings: QuadSettings,
) -> Result<Quad> {
    let p = substitution_power(beta);
    integrate(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let sp = s.powf(p - 1.0);
            let y = length * sp * s;
            let v = f(y) * length * p * sp;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        settings,
    )
}

/// `∫_δ^L f(y) dy` for an integrand behaving like `y^{-beta}` above a small cutoff `δ`.
///
/// Same substitution as [`integrate_singular_origin`], shifted to start at
/// `δ`, so that `y` never underflows to zero even for `beta` close to one.
pub fn integrate_shifted_origin<F: FnMut(f64) -> f64>(
    mut f: F,
    delta: f64,
    length: f64,
    beta: f64,
    settings: QuadSettings,
) -> Result<Quad> {
    let p = substitution_power(beta);
    let span = length - delta;
    integrate(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let sp = s.powf(p - 1.0);
            let y = delta + span * sp * s;
            let v = f(y) * span * p * sp;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        settings,
    )
}

/// Power used by the origin substitution for singularity index `beta`.
pub fn substitution_power(beta: f64) -> f64 {
    if beta > 0.0 && beta < 1.0 {
        1.0 / (1.0 - beta)
    } else {
        2.0
    }
}

/// Fixed n-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Wynn epsilon acceleration of a sequence of partial sums.
///
/// Returns the best extrapolated limit and a crude error estimate taken from
/// the last two diagonal entries.
pub fn wynn_epsilon(partial_sums: &[f64]) -> (f64, f64) {
    let n = partial_sums.len();
    if n < 3 {
        let last = partial_sums.last().copied().unwrap_or(0.0);
        return (last, f64::INFINITY);
    }
    // e[k] holds column k of the epsilon table for the current row.
    let mut prev2 = vec![0.0; n + 1];
    let mut prev: Vec<f64> = partial_sums.to_vec();
    let mut best = *partial_sums.last().unwrap();
    let mut best_err = (partial_sums[n - 1] - partial_sums[n - 2]).abs();
    let mut column = 1;
    while prev.len() > 1 {
        let mut next = Vec::with_capacity(prev.len() - 1);
        for i in 0..prev.len() - 1 {
            let diff = prev[i + 1] - prev[i];
            let base = if column == 1 { 0.0 } else { prev2[i + 1] };
            let val = if diff == 0.0 { f64::INFINITY } else { base + 1.0 / diff };
            next.push(val);
        }
        // Even columns carry the extrapolants.
        if column % 2 == 0 && next.len() >= 2 {
            let a = next[next.len() - 1];
            let b = next[next.len() - 2];
            if a.is_finite() && b.is_finite() {
                let err = (a - b).abs();
                if err < best_err {
                    best = a;
                    best_err = err;
                }
            }
        }
        prev2 = prev;
        prev = next;
        column += 1;
    }
    (best, best_err)
}

/// `∫_a^∞ g(y) e^{-i ω y} dy` for a slowly decaying, non-oscillating `g`.
///
/// The half line is cut at the zeros of `cos` and `sin` (half periods of
/// length `π/|ω|`). The real and imaginary parts are summed panel by panel
/// and the alternating partial sums are accelerated with Wynn's epsilon.
/// For `ω = 0` the caller must use a non-oscillatory route.
pub fn oscillatory_tail<G: FnMut(f64) -> f64>(
    mut g: G,
    a: f64,
    omega: f64,
    settings: QuadSettings,
) -> Result<(f64, f64, f64)> {
    if omega == 0.0 {
        return Err(Error::numeric("oscillatory_tail", "zero frequency"));
    }
    let period = std::f64::consts::PI / omega.abs();
    let mut re_sums = Vec::new();
    let mut im_sums = Vec::new();
    let mut re_acc = 0.0;
    let mut im_acc = 0.0;
    let panels = 60;
    // First move to a multiple of the half period, then step panel by panel.
    let first_edge = (a / period).ceil() * period;
    let mut edges = vec![a];
    let mut e = if first_edge > a { first_edge } else { first_edge + period };
    for _ in 0..panels {
        edges.push(e);
        e += period;
    }
    let mut err = 0.0;
    for w in edges.windows(2) {
        let re = integrate(|y| g(y) * (omega * y).cos(), w[0], w[1], settings)?;
        let im = integrate(|y| -g(y) * (omega * y).sin(), w[0], w[1], settings)?;
        re_acc += re.value;
        im_acc += im.value;
        err += re.error + im.error;
        re_sums.push(re_acc);
        im_sums.push(im_acc);
    }
    let (re, re_err) = wynn_epsilon(&re_sums);
    let (im, im_err) = wynn_epsilon(&im_sums);
    Ok((re, im, err + re_err + im_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, QuadSettings::default()).unwrap();
        assert!((q.value - 0.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let q = integrate(f64::exp, 1.0, 0.0, QuadSettings::default()).unwrap();
        assert!((q.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn singular_origin_power() {
        // ∫_0^1 y^{-0.7} dy = 1/0.3
        let q = integrate_singular_origin(|y| y.powf(-0.7), 1.0, 0.7, QuadSettings::default()).unwrap();
        assert!((q.value - 1.0 / 0.3).abs() < 1e-10, "{}", q.value);
    }

    #[test]
    fn singular_origin_log() {
        // ∫_0^1 ln y dy = -1
        let q = integrate_singular_origin(f64::ln, 1.0, 0.0, QuadSettings::default()).unwrap();
        assert!((q.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn kink_needs_breakpoint_or_subdivision() {
        let q = integrate_with_breaks(|x: f64| x.abs(), -1.0, 2.0, &[0.0], QuadSettings::default()).unwrap();
        assert!((q.value - 2.5).abs() < 1e-13);
        let q = integrate(|x: f64| x.abs(), -1.0, 2.0, QuadSettings::default()).unwrap();
        assert!((q.value - 2.5).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn wynn_accelerates_alternating_harmonic() {
        let mut sums = Vec::new();
        let mut acc = 0.0;
        for k in 1..=20 {
            acc += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            sums.push(acc);
        }
        let (v, _) = wynn_epsilon(&sums);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-10, "{v}");
    }

    #[test]
    fn oscillatory_tail_of_power() {
        // ∫_1^∞ y^{-2} cos(y) dy = cos(1) - sin(1)·(π/2 - Si(1))... checked against
        // a brute force integral to a large cutoff plus integration by parts.
        let (re, im, _) = oscillatory_tail(|y| y.powi(-2), 1.0, 1.0, QuadSettings::default()).unwrap();
        let brute_re = integrate(|y| y.powi(-2) * y.cos(), 1.0, 2000.0 * std::f64::consts::PI, QuadSettings {
            max_segments: 100_000,
            ..QuadSettings::default()
        })
        .unwrap()
        .value;
        let brute_im = -integrate(|y| y.powi(-2) * y.sin(), 1.0, 2000.0 * std::f64::consts::PI, QuadSettings {
            max_segments: 100_000,
            ..QuadSettings::default()
        })
        .unwrap()
        .value;
        // Remainder beyond the cutoff is bounded by 2/cutoff^2.
        assert!((re - brute_re).abs() < 1e-6, "{re} {brute_re}");
        assert!((im - brute_im).abs() < 1e-6, "{im} {brute_im}");
    }
}
