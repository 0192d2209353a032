//! Named verification suites. Each returns its checks plus the raw values
//! behind them.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use nlbm_core::heat_interface_solver::{
    classical_limit_report, skew_interface_residual, sticky_interface_residual, HeatSolution, LimitProbe,
};
use nlbm_core::levy_symbols::LevySymbol;
use nlbm_core::nonlocal_operators::{
    caputo_dzherbashian, fourier_symbol_checks, laplace_identity, marchaud_right, FourierGrid, Side, SpatialFunction,
    TemporalFunction,
};
use nlbm_core::path_engine::rng::{stream_rng, Component};
use nlbm_core::path_engine::{excursions_of_reflected, simulate_reflected, skew_signs, IntervalKind, SkewConfig, SubordinatorPath};
use nlbm_core::quadrature::{integrate, integrate_singular_origin, QuadSettings};
use nlbm_core::resolvent_lab::{
    full_resolvent, mc_mean_at_time, mc_resolvent, sample_at_time, sticky_resolvent_zero, zero_resolvent,
    zero_resolvent_truncated, McSettings, ProcessKind, ProcessParams, TestFunction,
};

use crate::error::{CliError, CliResult};
use crate::report::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Symbols,
    Subordinator,
    Inverse,
    Operators,
    Fourier,
    Appendix,
    Sticky,
    Conservativity,
    Skewness,
    Interface,
    ClassicalLimit,
    Representation,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Symbols,
        Suite::Subordinator,
        Suite::Inverse,
        Suite::Operators,
        Suite::Fourier,
        Suite::Appendix,
        Suite::Sticky,
        Suite::Conservativity,
        Suite::Skewness,
        Suite::Interface,
        Suite::ClassicalLimit,
        Suite::Representation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symbols => "symbols",
            Suite::Subordinator => "subordinator",
            Suite::Inverse => "inverse",
            Suite::Operators => "operators",
            Suite::Fourier => "fourier",
            Suite::Appendix => "appendix",
            Suite::Sticky => "sticky",
            Suite::Conservativity => "conservativity",
            Suite::Skewness => "skewness",
            Suite::Interface => "interface",
            Suite::ClassicalLimit => "classical-limit",
            Suite::Representation => "representation",
        }
    }

    pub fn uses_monte_carlo(self) -> bool {
        !matches!(
            self,
            Suite::Symbols | Suite::Operators | Suite::Fourier | Suite::Interface | Suite::ClassicalLimit
        )
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of an interface residual grid, as read from and written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceRow {
    pub condition: String,
    pub nu: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub f: String,
    pub eta: Option<f64>,
    pub residual: f64,
    pub scale: f64,
    pub relative: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Deserialize)]
struct GridPoint {
    nu: f64,
    alpha: f64,
    lambda: f64,
    f: String,
    #[serde(default)]
    eta: Option<f64>,
}

#[derive(Debug, Default)]
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub results: Vec<Value>,
    pub rows: Vec<InterfaceRow>,
}

/// Keeps the Monte Carlo streams of different checks in one suite apart.
fn sub_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn with_seed(mc: &McSettings, k: u64) -> McSettings {
    McSettings {
        seed: sub_seed(mc.seed, k),
        ..*mc
    }
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn inconclusive(mc: &McSettings, se: f64) -> bool {
    mc.max_std_error.is_some_and(|m| se > m)
}

pub fn run_suite(suite: Suite, mc: &McSettings, grid: Option<&Path>) -> CliResult<SuiteOutput> {
    match suite {
        Suite::Symbols => symbols(),
        Suite::Subordinator => subordinator(mc),
        Suite::Inverse => inverse(mc),
        Suite::Operators => operators(),
        Suite::Fourier => fourier(),
        Suite::Appendix => appendix(mc),
        Suite::Sticky => sticky(mc),
        Suite::Conservativity => conservativity(mc),
        Suite::Skewness => skewness(mc),
        Suite::Interface => interface(grid),
        Suite::ClassicalLimit => classical_limit(),
        Suite::Representation => representation(mc),
    }
}

fn symbols() -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let settings = QuadSettings::with_tolerances(1e-14, 1e-11);
    for alpha in [0.3, 0.5, 0.7] {
        let sym = LevySymbol::stable(alpha)?;
        for lam in [0.25, 1.0, 4.0, 16.0] {
            let closed = sym.phi(lam)?;
            let quad = sym.phi_by_quadrature(lam)?.value;
            out.checks.push(Check::relative(format!("phi/alpha={alpha}/lambda={lam}"), closed, quad, 1e-6));
            let tail = |z: f64| (-lam * z).exp() * sym.tail(z).unwrap_or(f64::NAN);
            let split = 1.0 / lam;
            let near = integrate_singular_origin(tail, split, alpha, settings)?.value;
            let mut far = 0.0;
            let mut lo = split;
            for _ in 0..6 {
                let hi = lo * 2.0_f64.max(1.0 + 8.0 / (lam * lo));
                far += integrate(tail, lo, hi, settings)?.value;
                lo = hi;
                if lam * lo > 60.0 {
                    break;
                }
            }
            out.checks.push(Check::relative(
                format!("tail-laplace/alpha={alpha}/lambda={lam}"),
                closed / lam,
                near + far,
                1e-6,
            ));
            out.results.push(json!({"alpha": alpha, "lambda": lam, "phi": closed, "phi_quadrature": quad, "tail_laplace": near + far}));
        }
    }
    Ok(out)
}

/// `H_1` for each path, from the subordinator stream.
fn subordinator_values(sym: &LevySymbol, mc: &McSettings, s: f64, offset: u64) -> CliResult<Vec<f64>> {
    let values: nlbm_core::Result<Vec<f64>> = (0..mc.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut sub = SubordinatorPath::new(sym, mc.eps_trunc)?;
            sub.extend_to_time(s, &mut stream_rng(mc.seed, offset + i, Component::Subordinator));
            sub.value(s)
        })
        .collect();
    Ok(values?)
}

fn subordinator(mc: &McSettings) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let sym = LevySymbol::stable(0.5)?;
    let h = subordinator_values(&sym, &with_seed(mc, 0), 1.0, 0)?;
    for lam in [1.0, 4.0] {
        let samples: Vec<f64> = h.iter().map(|v| (-lam * v).exp()).collect();
        let (mean, se) = mean_se(&samples);
        let exact = (-sym.phi(lam)?).exp();
        let truncated = (-sym.phi_truncated(lam, mc.eps_trunc)?).exp();
        out.checks.push(
            Check::monte_carlo(format!("laplace-H1/alpha=0.5/lambda={lam}"), exact, mean, se, 2e-3)
                .mark_inconclusive(inconclusive(mc, se)),
        );
        out.results.push(json!({"lambda": lam, "mc": mean, "se": se, "exact": exact, "truncated_symbol": truncated}));
    }
    Ok(out)
}

fn inverse(mc: &McSettings) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let sym = LevySymbol::stable(0.5)?;
    let mc = with_seed(mc, 1);
    let n = mc.n_paths as u64;
    let below: Vec<f64> = subordinator_values(&sym, &mc, 1.0, 0)?
        .into_iter()
        .map(|h| if h < 2.0 { 1.0 } else { 0.0 })
        .collect();
    // An independent set of paths for the inverse.
    let above: nlbm_core::Result<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sub = SubordinatorPath::new(&sym, mc.eps_trunc)?;
            sub.extend_to_level(2.0, &mut stream_rng(mc.seed, n + i, Component::Subordinator));
            Ok(if sub.inverse(2.0)? > 1.0 { 1.0 } else { 0.0 })
        })
        .collect();
    let above = above?;
    let (p_h, se_h) = mean_se(&below);
    let (p_l, se_l) = mean_se(&above);
    let pooled = (se_h * se_h + se_l * se_l).sqrt();
    out.checks.push(
        Check::monte_carlo("P(H_1<2)-vs-P(L_2>1)/alpha=0.5", p_h, p_l, pooled, 0.0)
            .mark_inconclusive(inconclusive(&mc, pooled)),
    );
    // For α = 1/2, H_1 is the first passage of level 1 by a BM with generator ∂²_x.
    let exact = erfc(1.0 / (2.0 * 2.0_f64.sqrt()));
    out.checks.push(Check::monte_carlo("P(H_1<2)/alpha=0.5/closed-form", exact, p_h, se_h, 0.0));
    out.results.push(json!({"p_h1_below_2": p_h, "se_h": se_h, "p_l2_above_1": p_l, "se_l": se_l, "closed_form": exact}));
    Ok(out)
}

fn operators() -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let x = 0.5;
    for alpha in [0.3, 0.7] {
        let sym = LevySymbol::stable(alpha)?;
        for c in [0.5, 1.0, 2.0] {
            let v = marchaud_right(&sym, &SpatialFunction::exponential(-c), x)?;
            let exact = (-c * x).exp() * sym.phi(c)?;
            out.checks.push(Check::relative(format!("marchaud/exp/c={c}/alpha={alpha}"), exact, v, 1e-4));
            out.results.push(json!({"operator": "marchaud", "c": c, "alpha": alpha, "x": x, "value": v, "closed_form": exact}));
        }
    }
    let alpha = 0.5;
    let sym = LevySymbol::stable(alpha)?;
    for t in [0.5, 1.0, 2.0] {
        let v = caputo_dzherbashian(&sym, &TemporalFunction::linear(), t)?;
        let exact = t.powf(1.0 - alpha) / gamma(2.0 - alpha);
        out.checks.push(Check::relative(format!("caputo/linear/alpha={alpha}/t={t}"), exact, v, 1e-4));
        out.results.push(json!({"operator": "caputo", "alpha": alpha, "t": t, "value": v, "closed_form": exact}));
    }
    Ok(out)
}

fn fourier() -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let sym = LevySymbol::stable(0.5)?;
    let u = SpatialFunction::gaussian(0.0, 1.0);
    for side in [Side::Left, Side::Right] {
        for c in fourier_symbol_checks(&sym, &u, &[0.5, 1.0, 2.0], side, FourierGrid::default())? {
            out.checks.push(Check::new(format!("fourier/{side:?}/xi={}", c.xi).to_lowercase(), 0.0, c.residual, None, 1e-3));
            out.results.push(serde_json::to_value(c).expect("serializable"));
        }
    }
    for phi in ["linear", "exp:c=-1", "const:c=1"] {
        let p = TemporalFunction::from_key(phi)?;
        for lam in [2.0, 4.0] {
            let id = laplace_identity(&sym, &p, lam)?;
            out.checks.push(Check::new(format!("laplace/{phi}/lambda={lam}"), 0.0, id.residual, None, 1e-4));
            out.results.push(json!({"phi": phi, "lambda": lam, "identity": id}));
        }
    }
    Ok(out)
}

/// Zero-resolvent by MC against the analytic value; the allowance adds the
/// horizon truncation and the small-jump truncation bias.
fn zero_check(
    name: String,
    kind: ProcessKind,
    params: &ProcessParams,
    f: &TestFunction,
    lam: f64,
    mc: &McSettings,
) -> CliResult<(Check, Value)> {
    let analytic = zero_resolvent(kind, params, f, lam)?;
    let bias = if kind.uses_subordinator() {
        (zero_resolvent_truncated(kind, params, f, lam, mc.eps_trunc)? - analytic).abs()
    } else {
        0.0
    };
    let est = mc_resolvent(kind, params, f, 0.0, lam, mc)?;
    let check = Check::monte_carlo(name, analytic, est.value, est.std_error, est.truncation_bound + bias)
        .mark_inconclusive(est.inconclusive);
    let value = json!({
        "process": kind.name(), "f": f.key(), "lambda": lam, "alpha": params.sym.name(), "nu": params.nu, "eta": params.eta,
        "analytic": analytic, "mc": est, "bias": bias,
    });
    Ok((check, value))
}

fn appendix(mc: &McSettings) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let cases = [("exp_decay:c=1", 1.0, 0.5), ("gaussian", 4.0, 0.3), ("indicator:a=0,b=1", 1.0, 0.7)];
    for (k, (f, lam, alpha)) in cases.into_iter().enumerate() {
        let params = ProcessParams::new(LevySymbol::stable(alpha)?, 1.0, 0.0)?;
        let f = TestFunction::parse(f)?;
        let name = format!("bullet-zero/{}/lambda={lam}/alpha={alpha}", f.key());
        let (c, v) = zero_check(name, ProcessKind::Bullet, &params, &f, lam, &with_seed(mc, 10 + k as u64))?;
        out.checks.push(c);
        out.results.push(v);
    }
    Ok(out)
}

fn sticky(mc: &McSettings) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let cases = [(0.5, 1.0, 1.0, "exp_decay:c=1"), (0.7, 0.5, 2.0, "gaussian")];
    for (k, (alpha, eta, lam, f)) in cases.into_iter().enumerate() {
        let params = ProcessParams::new(LevySymbol::stable(alpha)?, 1.0, eta)?;
        let f = TestFunction::parse(f)?;
        let name = format!("sticky-zero/{}/lambda={lam}/alpha={alpha}/eta={eta}", f.key());
        let (c, v) = zero_check(name, ProcessKind::Sticky, &params, &f, lam, &with_seed(mc, 20 + k as u64))?;
        out.checks.push(c);
        out.results.push(v);
    }
    // Vanishing stickiness recovers reflecting Brownian motion.
    let sym = LevySymbol::stable(0.5)?;
    let f = TestFunction::parse("exp_decay:c=1")?;
    let reflected = zero_resolvent(ProcessKind::Reflected, &ProcessParams::new(sym.clone(), 1.0, 0.0)?, &f, 1.0)?;
    let sticky = sticky_resolvent_zero(&sym, 1e-9, &f, 1.0)?;
    out.checks.push(Check::relative("sticky-zero/eta=1e-9/reflected-limit", reflected, sticky, 1e-6));
    Ok(out)
}

fn conservativity(mc: &McSettings) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let params = ProcessParams::new(LevySymbol::stable(0.5)?, 0.7, 1.0)?;
    let one = TestFunction::One;
    for lam in [0.5, 1.0, 4.0] {
        for kind in ProcessKind::ALL {
            for x in [0.0, 0.5] {
                let v = full_resolvent(kind, &params, &one, x, lam)?;
                out.checks.push(Check::relative(format!("analytic/{kind}/lambda={lam}/x={x}"), 1.0 / lam, v, 1e-9));
            }
        }
    }
    let lam = 1.0;
    let kinds = [ProcessKind::Bullet, ProcessKind::SkewBullet, ProcessKind::Sticky, ProcessKind::SkewSticky];
    for (k, kind) in kinds.into_iter().enumerate() {
        let est = mc_resolvent(kind, &params, &one, 0.0, lam, &with_seed(mc, 30 + k as u64))?;
        // The trapezoid rule on e^{-λt} adds O((λ dt)²) relative.
        let allowance = est.truncation_bound + (lam * mc.dt).powi(2) / lam;
        out.checks.push(
            Check::monte_carlo(format!("mc/{kind}/lambda={lam}"), 1.0 / lam, est.value, est.std_error, allowance)
                .mark_inconclusive(est.inconclusive),
        );
        out.results.push(json!({"process": kind.name(), "lambda": lam, "mc": est}));
    }
    Ok(out)
}

fn skewness(mc: &McSettings) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (k, nu) in [0.3, 0.7].into_iter().enumerate() {
        let params = ProcessParams::new(LevySymbol::stable(0.5)?, nu, 0.0)?;
        let run = with_seed(mc, 40 + 2 * k as u64);
        let xs = sample_at_time(ProcessKind::Skew, &params, 0.0, 1.0, &run)?;
        // A path ending exactly at zero carries no sign.
        let away: Vec<f64> = xs.iter().filter(|v| **v != 0.0).map(|v| if *v > 0.0 { 1.0 } else { 0.0 }).collect();
        let (p, se) = mean_se(&away);
        out.checks
            .push(Check::monte_carlo(format!("P(X_1>0)/nu={nu}"), nu, p, se, 0.0).mark_inconclusive(inconclusive(mc, se)));

        let run = with_seed(mc, 41 + 2 * k as u64);
        let cfg = SkewConfig::new(nu, 0.0, run.seed)?;
        let counts: nlbm_core::Result<Vec<(u64, u64)>> = (0..run.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let rp = simulate_reflected(0.0, 1.0, run.dt, &mut stream_rng(run.seed, i, Component::Brownian))?;
                let dec = skew_signs(&excursions_of_reflected(&rp), &cfg, &mut stream_rng(run.seed, i, Component::Signs))?;
                let exc = dec.intervals.iter().filter(|iv| iv.kind == IntervalKind::Excursion);
                Ok(exc.fold((0, 0), |(pos, all), iv| (pos + u64::from(iv.sign > 0.0), all + 1)))
            })
            .collect();
        let (pos, all) = counts?.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let freq = pos as f64 / all as f64;
        let se_freq = (freq * (1.0 - freq) / all as f64).sqrt();
        out.checks.push(
            Check::monte_carlo(format!("excursion-sign-frequency/nu={nu}"), nu, freq, se_freq, 0.0)
                .mark_inconclusive(inconclusive(mc, se_freq)),
        );
        out.results.push(json!({
            "nu": nu, "p_positive": p, "se": se, "paths_away_from_zero": away.len(),
            "excursions": all, "positive_excursions": pos, "frequency": freq, "se_frequency": se_freq,
        }));
    }
    Ok(out)
}

fn default_grid() -> Vec<GridPoint> {
    let mut points = Vec::new();
    for nu in [0.3, 0.7] {
        for alpha in [0.3, 0.5, 0.7] {
            for lambda in [1.0, 4.0] {
                for f in ["gaussian", "exp_decay:c=1"] {
                    for eta in [None, Some(0.5), Some(1.0)] {
                        points.push(GridPoint {
                            nu,
                            alpha,
                            lambda,
                            f: f.to_string(),
                            eta,
                        });
                    }
                }
            }
        }
    }
    points
}

fn read_grid(path: &Path) -> CliResult<Vec<GridPoint>> {
    let grid_err = |source| CliError::Grid {
        path: path.display().to_string(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(grid_err)?;
    let points = reader.deserialize().collect::<Result<Vec<GridPoint>, _>>().map_err(grid_err)?;
    if points.is_empty() {
        return Err(CliError::Config(format!("interface grid {} has no rows", path.display())));
    }
    Ok(points)
}

fn interface(grid: Option<&Path>) -> CliResult<SuiteOutput> {
    let points = match grid {
        Some(p) => read_grid(p)?,
        None => default_grid(),
    };
    let rows: Vec<CliResult<InterfaceRow>> = points
        .par_iter()
        .map(|p| {
            let sym = LevySymbol::stable(p.alpha)?;
            let f = TestFunction::parse(&p.f)?;
            let (condition, residual, scale) = match p.eta {
                None => {
                    let r = skew_interface_residual(&sym, p.nu, &f, p.lambda)?;
                    ("skew", r.residual, r.scale)
                }
                Some(eta) => {
                    let r = sticky_interface_residual(&sym, p.nu, eta, &f, p.lambda)?;
                    ("sticky", r.residual, r.scale)
                }
            };
            let tolerance = 1e-3 * scale + 1e-12;
            Ok(InterfaceRow {
                condition: condition.to_string(),
                nu: p.nu,
                alpha: p.alpha,
                lambda: p.lambda,
                f: f.key(),
                eta: p.eta,
                residual,
                scale,
                relative: nlbm_core::heat_interface_solver::relative_residual(residual, scale),
                pass: residual.abs() <= tolerance,
            })
        })
        .collect();
    let mut out = SuiteOutput::default();
    for row in rows {
        let row = row?;
        let eta = row.eta.map_or(String::new(), |e| format!("/eta={e}"));
        let name = format!("{}/nu={}/alpha={}/lambda={}/{}{eta}", row.condition, row.nu, row.alpha, row.lambda, row.f);
        out.checks.push(Check::new(name, 0.0, row.residual, None, 1e-3 * row.scale + 1e-12));
        out.rows.push(row);
    }
    Ok(out)
}

fn classical_limit() -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let report = classical_limit_report(&[0.9, 0.99, 0.999], &LimitProbe::default())?;
    for w in report.rows.windows(2) {
        let (prev, next) = (&w[0], &w[1]);
        out.checks.push(Check::new(
            format!("flux-gap/alpha={}<alpha={}", next.alpha, prev.alpha),
            0.0,
            next.flux_gap,
            None,
            prev.flux_gap * (1.0 - 1e-12),
        ));
        out.checks.push(Check::new(
            format!("dynamic-gap/alpha={}<alpha={}", next.alpha, prev.alpha),
            0.0,
            next.dynamic_gap,
            None,
            prev.dynamic_gap * (1.0 - 1e-12),
        ));
    }
    out.results.push(serde_json::to_value(&report).expect("serializable"));
    Ok(out)
}

fn representation(mc: &McSettings) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let (t, x) = (1.0, 0.5);
    let f = TestFunction::parse("gaussian")?;
    let params = ProcessParams::new(LevySymbol::stable(0.5)?, 0.7, 1.0)?;
    for (k, kind) in [ProcessKind::SkewBullet, ProcessKind::SkewSticky].into_iter().enumerate() {
        let sol = HeatSolution::new(kind, params.clone(), f, t)?;
        let rep = sol.representation(t, x)?;
        let est = mc_mean_at_time(kind, &params, &f, x, t, &with_seed(mc, 50 + k as u64))?;
        out.checks.push(
            Check::monte_carlo(format!("u/{kind}/t={t}/x={x}"), rep.u, est.value, est.std_error, rep.trace_error)
                .mark_inconclusive(est.inconclusive),
        );
        out.results.push(json!({"process": kind.name(), "t": t, "x": x, "representation": rep, "mc": est}));
    }
    Ok(out)
}
