use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nlbm_core::levy_symbols::LevySymbol;
use nlbm_core::nonlocal_operators::{Side, SpatialFunction, TemporalFunction};
use nlbm_core::resolvent_lab::{McSettings, ProcessKind, ProcessParams, TestFunction};

use crate::error::{CliError, CliResult};
use crate::suites::Suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Resolvent,
    Operator,
    Pde,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Resolvent => "resolvent",
            ExperimentKind::Operator => "operator",
            ExperimentKind::Pde => "pde",
            ExperimentKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Marchaud,
    Caputo,
    Fourier,
    Laplace,
}

/// A run as written in a TOML file or assembled from flags. Every field is
/// optional here; [`ExperimentConfig::validate`] decides what each
/// experiment needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub process: Option<String>,
    pub symbol: Option<String>,
    pub nu: Option<f64>,
    pub eta: Option<f64>,
    pub f: Option<String>,
    pub x: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub xi: Option<Vec<f64>>,
    pub n_paths: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub eps: Option<f64>,
    /// Standard errors above this make a Monte Carlo check inconclusive.
    pub max_se: Option<f64>,
    pub suite: Option<Suite>,
    pub grid: Option<PathBuf>,
    pub operator: Option<OperatorKind>,
    pub u: Option<String>,
    pub phi: Option<String>,
    pub side: Option<String>,
    pub order: Option<usize>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($field:ident),*) => {
        $(if $src.$field.is_some() { $dst.$field = $src.$field; })*
    };
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, path: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|source| CliError::ParseConfig {
            path: path.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: ExperimentConfig) -> Self {
        overlay!(
            self, other, experiment, seed, process, symbol, nu, eta, f, x, lambda, t, alpha, xi, n_paths, dt, horizon,
            eps, max_se, suite, grid, operator, u, phi, side, order, out, csv, threads
        );
        self
    }

    pub fn validate(&self) -> CliResult<Experiment> {
        let kind = self
            .experiment
            .ok_or_else(|| CliError::Config("`experiment` is required (simulate, resolvent, operator, pde, verify)".into()))?;
        if let Some(0) = self.threads {
            return Err(CliError::Config("`threads` must be at least 1".into()));
        }
        Ok(match kind {
            ExperimentKind::Simulate => Experiment::Simulate(SimulateSpec {
                process: self.process()?,
                params: self.params()?,
                x: self.single("x", &self.x, 0.0)?,
                horizon: self.horizon.unwrap_or(1.0),
                mc: self.mc(true)?,
            }),
            ExperimentKind::Resolvent => Experiment::Resolvent(ResolventSpec {
                process: self.process()?,
                params: self.params()?,
                f: self.test_function()?,
                x: positive_list_or("x", &self.x, &[0.0], false)?,
                lambda: positive_list_or("lambda", &self.lambda, &[1.0], true)?,
                mc: self.mc(true)?,
            }),
            ExperimentKind::Operator => self.operator_spec()?,
            ExperimentKind::Pde => Experiment::Pde(PdeSpec {
                process: self.process()?,
                params: self.params()?,
                f: self.test_function()?,
                t: positive_list_or("t", &self.t, &[1.0], true)?,
                x: positive_list_or("x", &self.x, &[0.5], false)?,
                order: self.order.unwrap_or(nlbm_core::heat_interface_solver::DEFAULT_STEHFEST_ORDER),
            }),
            ExperimentKind::Verify => {
                let suite = self.suite.ok_or_else(|| CliError::Config("`suite` is required for verify".into()))?;
                let needs_seed = suite.uses_monte_carlo();
                Experiment::Verify(VerifySpec {
                    suite,
                    mc: self.mc(needs_seed)?,
                    grid: self.grid.clone(),
                })
            }
        })
    }

    fn process(&self) -> CliResult<ProcessKind> {
        Ok(ProcessKind::parse(self.process.as_deref().unwrap_or("bm"))?)
    }

    fn symbol(&self) -> CliResult<LevySymbol> {
        Ok(LevySymbol::from_key(self.symbol.as_deref().unwrap_or("stable:alpha=0.5"))?)
    }

    fn params(&self) -> CliResult<ProcessParams> {
        let p = ProcessParams::new(self.symbol()?, self.nu.unwrap_or(0.5), self.eta.unwrap_or(1.0))?;
        p.validate_for(self.process()?)?;
        Ok(p)
    }

    fn test_function(&self) -> CliResult<TestFunction> {
        Ok(TestFunction::parse(self.f.as_deref().unwrap_or("exp_decay:c=1"))?)
    }

    fn single(&self, name: &str, v: &Option<Vec<f64>>, default: f64) -> CliResult<f64> {
        match v.as_deref() {
            None => Ok(default),
            Some([x]) if x.is_finite() => Ok(*x),
            Some(other) => Err(CliError::Config(format!("`{name}` must be a single finite value, got {other:?}"))),
        }
    }

    fn mc(&self, seed_required: bool) -> CliResult<McSettings> {
        let seed = match (self.seed, seed_required) {
            (Some(s), _) => s,
            (None, false) => 0,
            (None, true) => {
                return Err(CliError::Config(
                    "`seed` is required for Monte Carlo runs (there is no clock-based default)".into(),
                ))
            }
        };
        let defaults = McSettings::default();
        let mc = McSettings {
            n_paths: self.n_paths.unwrap_or(defaults.n_paths),
            dt: self.dt.unwrap_or(defaults.dt),
            horizon: self.horizon,
            eps_trunc: self.eps.unwrap_or(defaults.eps_trunc),
            seed,
            max_std_error: self.max_se,
            ..defaults
        };
        mc.validate()?;
        Ok(mc)
    }

    fn operator_spec(&self) -> CliResult<Experiment> {
        let op = self
            .operator
            .ok_or_else(|| CliError::Config("`operator` is required (marchaud, caputo, fourier, laplace)".into()))?;
        let sym = self.symbol()?;
        let side = Side::parse(self.side.as_deref().unwrap_or("right"))?;
        let spatial = || -> CliResult<SpatialFunction> {
            Ok(SpatialFunction::from_key(self.u.as_deref().unwrap_or("exp:c=-1"))?)
        };
        let temporal = || -> CliResult<TemporalFunction> {
            Ok(TemporalFunction::from_key(self.phi.as_deref().unwrap_or("linear"))?)
        };
        let spec = match op {
            OperatorKind::Marchaud => OperatorSpec::Marchaud {
                u: spatial()?,
                side,
                x: positive_list_or("x", &self.x, &[0.5], false)?,
            },
            OperatorKind::Fourier => OperatorSpec::Fourier {
                u: spatial()?,
                side,
                xi: positive_list_or("xi", &self.xi, &[0.5, 1.0, 2.0], false)?,
            },
            OperatorKind::Caputo => OperatorSpec::Caputo {
                phi: temporal()?,
                t: positive_list_or("t", &self.t, &[1.0], true)?,
            },
            OperatorKind::Laplace => OperatorSpec::Laplace {
                phi: temporal()?,
                lambda: positive_list_or("lambda", &self.lambda, &[1.0], true)?,
            },
        };
        Ok(Experiment::Operator { sym, spec })
    }
}

fn positive_list_or(name: &str, v: &Option<Vec<f64>>, default: &[f64], positive: bool) -> CliResult<Vec<f64>> {
    let list = v.clone().unwrap_or_else(|| default.to_vec());
    if list.is_empty() {
        return Err(CliError::Config(format!("`{name}` must not be empty")));
    }
    if let Some(bad) = list.iter().find(|x| !x.is_finite() || (positive && **x <= 0.0)) {
        let need = if positive { "positive and finite" } else { "finite" };
        return Err(CliError::Config(format!("`{name}` values must be {need}, got {bad}")));
    }
    Ok(list)
}

/// A validated run.
#[derive(Debug, Clone)]
pub enum Experiment {
    Simulate(SimulateSpec),
    Resolvent(ResolventSpec),
    Operator { sym: LevySymbol, spec: OperatorSpec },
    Pde(PdeSpec),
    Verify(VerifySpec),
}

#[derive(Debug, Clone)]
pub struct SimulateSpec {
    pub process: ProcessKind,
    pub params: ProcessParams,
    pub x: f64,
    pub horizon: f64,
    pub mc: McSettings,
}

#[derive(Debug, Clone)]
pub struct ResolventSpec {
    pub process: ProcessKind,
    pub params: ProcessParams,
    pub f: TestFunction,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mc: McSettings,
}

#[derive(Debug, Clone)]
pub enum OperatorSpec {
    Marchaud { u: SpatialFunction, side: Side, x: Vec<f64> },
    Fourier { u: SpatialFunction, side: Side, xi: Vec<f64> },
    Caputo { phi: TemporalFunction, t: Vec<f64> },
    Laplace { phi: TemporalFunction, lambda: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct PdeSpec {
    pub process: ProcessKind,
    pub params: ProcessParams,
    pub f: TestFunction,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct VerifySpec {
    pub suite: Suite,
    pub mc: McSettings,
    pub grid: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("experiment = \"resolvent\"\nsed = 3\n", "t.toml").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("sed"), "{err}");
    }

    #[test]
    fn seeds_are_mandatory_for_monte_carlo() {
        let c = ExperimentConfig::from_toml("experiment = \"resolvent\"\nprocess = \"bullet\"\n", "t.toml").unwrap();
        let e = c.validate().unwrap_err();
        assert!(e.to_string().contains("seed"));
        let c = c.overlay(ExperimentConfig {
            seed: Some(4),
            ..Default::default()
        });
        assert!(matches!(c.validate().unwrap(), Experiment::Resolvent(_)));
    }

    #[test]
    fn module_preconditions_are_checked_first() {
        let bad = [
            "experiment = \"resolvent\"\nseed = 1\nnu = 1.5\n",
            "experiment = \"resolvent\"\nseed = 1\nprocess = \"sticky\"\neta = 0.0\nlambda = [1.0]\n",
            "experiment = \"resolvent\"\nseed = 1\nlambda = [-1.0]\n",
            "experiment = \"resolvent\"\nseed = 1\nsymbol = \"stable:alpha=1.5\"\n",
            "experiment = \"pde\"\nf = \"indicator:a=2,b=1\"\n",
            "experiment = \"operator\"\n",
            "experiment = \"verify\"\n",
        ];
        for text in bad {
            let c = ExperimentConfig::from_toml(text, "t.toml").unwrap();
            match c.validate() {
                Err(e) => assert_eq!(e.exit_code(), 2, "{text}: {e}"),
                Ok(other) => panic!("{text} accepted: {other:?}"),
            }
        }
    }
}
