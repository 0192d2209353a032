use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use nlbm_core::heat_interface_solver::HeatSolution;
use nlbm_core::nonlocal_operators::{caputo_quad, fourier_symbol_checks, laplace_identity, marchaud, FourierGrid};
use nlbm_core::resolvent_lab::{full_resolvent, full_resolvent_truncated, mc_resolvent, simulate_path};

use crate::config::{Experiment, ExperimentConfig, OperatorSpec, PdeSpec, ResolventSpec, SimulateSpec, VerifySpec};
use crate::error::{CliError, CliResult};
use crate::report::{Check, Fingerprint, RunReport};
use crate::suites::run_suite;

/// Rows destined for the CSV output, serialized in order.
pub enum Table {
    Paths(Vec<PathRow>),
    Interface(Vec<crate::suites::InterfaceRow>),
    Checks(Vec<Check>),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathRow {
    pub path: u64,
    pub t: f64,
    pub x: f64,
}

/// Validate and compute without touching the file system.
pub fn execute(config: &ExperimentConfig) -> CliResult<(RunReport, Table)> {
    let experiment = config.validate()?;
    let mut report = RunReport::new(fingerprint(config));
    let table = match experiment {
        Experiment::Simulate(spec) => simulate(&spec, &mut report, config.csv.is_some())?,
        Experiment::Resolvent(spec) => {
            resolvent(&spec, &mut report)?;
            Table::Checks(report.checks().to_vec())
        }
        Experiment::Operator { sym, spec } => {
            operator(&sym, &spec, &mut report)?;
            Table::Checks(report.checks().to_vec())
        }
        Experiment::Pde(spec) => {
            pde(&spec, &mut report)?;
            Table::Checks(Vec::new())
        }
        Experiment::Verify(spec) => verify(&spec, &mut report)?,
    };
    Ok((report, table))
}

/// [`execute`], then write the JSON report to `out` and the table to `csv`,
/// each through a temporary file renamed into place.
pub fn run(config: &ExperimentConfig) -> CliResult<RunReport> {
    let (report, table) = execute(config)?;
    if let Some(path) = &config.csv {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let written = match &table {
            Table::Paths(rows) => rows.iter().try_for_each(|r| writer.serialize(r)),
            Table::Interface(rows) => rows.iter().try_for_each(|r| writer.serialize(r)),
            Table::Checks(rows) => rows.iter().try_for_each(|r| writer.serialize(CheckRow::from(r))),
        };
        let bytes = written
            .map_err(|e| e.to_string())
            .and_then(|_| writer.into_inner().map_err(|e| e.to_string()))
            .map_err(|detail| CliError::Write {
                path: path.display().to_string(),
                detail,
            })?;
        write_atomic(path, &bytes)?;
    }
    if let Some(path) = &config.out {
        write_atomic(path, report.to_json().as_bytes())?;
    }
    Ok(report)
}

#[derive(Serialize)]
struct CheckRow<'a> {
    name: &'a str,
    analytic: f64,
    estimate: f64,
    se: Option<f64>,
    tolerance: f64,
    pass: bool,
    inconclusive: bool,
}

impl<'a> From<&'a Check> for CheckRow<'a> {
    fn from(c: &'a Check) -> Self {
        Self {
            name: &c.name,
            analytic: c.analytic,
            estimate: c.estimate,
            se: c.se,
            tolerance: c.tolerance,
            pass: c.pass,
            inconclusive: c.inconclusive,
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let err = |detail: String| CliError::Write {
        path: path.display().to_string(),
        detail,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| err(e.to_string()))?;
    tmp.write_all(bytes).map_err(|e| err(e.to_string()))?;
    tmp.as_file().sync_all().map_err(|e| err(e.to_string()))?;
    tmp.persist(path).map_err(|e| err(e.error.to_string()))?;
    Ok(())
}

/// Everything in the config that can change the numbers; output paths and
/// the thread count cannot.
fn fingerprint(config: &ExperimentConfig) -> Fingerprint {
    let scrubbed = ExperimentConfig {
        out: None,
        csv: None,
        threads: None,
        ..config.clone()
    };
    let mut parameters = BTreeMap::new();
    if let serde_json::Value::Object(map) = serde_json::to_value(&scrubbed).expect("config serializes") {
        for (k, v) in map {
            if !v.is_null() && k != "experiment" && k != "seed" {
                parameters.insert(k, v.to_string());
            }
        }
    }
    Fingerprint {
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: config.experiment.map_or("unknown", |e| e.name()).to_string(),
        seed: config.seed,
        parameters,
    }
}

fn simulate(spec: &SimulateSpec, report: &mut RunReport, keep_paths: bool) -> CliResult<Table> {
    let paths: nlbm_core::Result<Vec<_>> = (0..spec.mc.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let p = simulate_path(spec.process, &spec.params, spec.x, spec.horizon, &spec.mc, i)?;
            let end = *p.values.last().expect("nonempty path");
            let min = p.min_value();
            Ok((end, min, keep_paths.then_some(p)))
        })
        .collect();
    let paths = paths?;
    let n = paths.len() as f64;
    let ends: Vec<f64> = paths.iter().map(|p| p.0).collect();
    let mean = ends.iter().sum::<f64>() / n;
    let var = ends.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let positive = ends.iter().filter(|v| **v > 0.0).count() as f64 / n;
    let at_zero = ends.iter().filter(|v| **v == 0.0).count() as f64 / n;
    let min = paths.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    report.push_result(json!({
        "process": spec.process.name(),
        "x": spec.x,
        "horizon": spec.horizon,
        "n_paths": spec.mc.n_paths,
        "end_mean": mean,
        "end_se": (var / n).sqrt(),
        "end_variance": var,
        "fraction_positive": positive,
        "fraction_at_zero": at_zero,
        "minimum": min,
    }));
    if spec.process.is_one_sided() {
        report.push(Check::new("one-sided/minimum", 0.0, min.min(0.0), None, 0.0));
    }
    let mut rows = Vec::new();
    for (i, (_, _, p)) in paths.into_iter().enumerate() {
        if let Some(p) = p {
            rows.extend(p.t_grid.iter().zip(&p.values).map(|(&t, &x)| PathRow { path: i as u64, t, x }));
        }
    }
    Ok(Table::Paths(rows))
}

fn resolvent(spec: &ResolventSpec, report: &mut RunReport) -> CliResult<()> {
    for &lam in &spec.lambda {
        for &x in &spec.x {
            let analytic = full_resolvent(spec.process, &spec.params, &spec.f, x, lam)?;
            let bias = if spec.process.uses_subordinator() {
                (full_resolvent_truncated(spec.process, &spec.params, &spec.f, x, lam, spec.mc.eps_trunc)? - analytic).abs()
            } else {
                0.0
            };
            let est = mc_resolvent(spec.process, &spec.params, &spec.f, x, lam, &spec.mc)?;
            report.push(
                Check::monte_carlo(
                    format!("resolvent/{}/{}/x={x}/lambda={lam}", spec.process, spec.f.key()),
                    analytic,
                    est.value,
                    est.std_error,
                    est.truncation_bound + bias,
                )
                .mark_inconclusive(est.inconclusive),
            );
            report.push_result(json!({
                "x": x, "lambda": lam, "analytic": analytic, "truncation_bias": bias, "mc": est,
            }));
        }
    }
    Ok(())
}

fn operator(sym: &nlbm_core::LevySymbol, spec: &OperatorSpec, report: &mut RunReport) -> CliResult<()> {
    match spec {
        OperatorSpec::Marchaud { u, side, x } => {
            for &x in x {
                let q = marchaud(sym, u, x, *side)?;
                report.push_result(json!({"operator": "marchaud", "side": side, "u": u.name(), "x": x, "value": q.value, "error": q.error}));
            }
        }
        OperatorSpec::Fourier { u, side, xi } => {
            for c in fourier_symbol_checks(sym, u, xi, *side, FourierGrid::default())? {
                report.push(Check::new(format!("fourier/{}/xi={}", u.name(), c.xi), 0.0, c.residual, None, 1e-3));
                report.push_result(serde_json::to_value(c).expect("serializable"));
            }
        }
        OperatorSpec::Caputo { phi, t } => {
            for &t in t {
                let q = caputo_quad(sym, phi, t)?;
                report.push_result(json!({"operator": "caputo", "phi": phi.name(), "t": t, "value": q.value, "error": q.error}));
            }
        }
        OperatorSpec::Laplace { phi, lambda } => {
            for &lam in lambda {
                let id = laplace_identity(sym, phi, lam)?;
                report.push(Check::new(format!("laplace/{}/lambda={lam}", phi.name()), 0.0, id.residual, None, 1e-4));
                report.push_result(json!({"phi": phi.name(), "lambda": lam, "identity": id}));
            }
        }
    }
    Ok(())
}

fn pde(spec: &PdeSpec, report: &mut RunReport) -> CliResult<()> {
    let t_max = spec.t.iter().copied().fold(0.0, f64::max);
    let sol = HeatSolution::new(spec.process, spec.params.clone(), spec.f, t_max)?.with_order(spec.order);
    for &t in &spec.t {
        for &x in &spec.x {
            let rep = sol.representation(t, x)?;
            report.push_result(json!({"t": t, "x": x, "u": rep.u, "components": rep}));
        }
    }
    Ok(())
}

fn verify(spec: &VerifySpec, report: &mut RunReport) -> CliResult<Table> {
    let out = run_suite(spec.suite, &spec.mc, spec.grid.as_deref())?;
    report.extend(out.checks);
    for r in out.results {
        report.push_result(r);
    }
    Ok(if out.rows.is_empty() {
        Table::Checks(report.checks().to_vec())
    } else {
        Table::Interface(out.rows)
    })
}
