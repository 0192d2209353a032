//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nlbm_cli::config::{ExperimentConfig, ExperimentKind};
use nlbm_cli::{run, RunReport, Suite};

const SEED: u64 = 20_261_014;

fn verify(suite: Suite, n_paths: Option<usize>) -> ExperimentConfig {
    ExperimentConfig {
        experiment: Some(ExperimentKind::Verify),
        suite: Some(suite),
        seed: Some(SEED),
        n_paths,
        ..Default::default()
    }
}

type Criterion = (&'static str, Option<Duration>, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn summarize(reports: &[RunReport]) -> Outcome {
    let checks: Vec<_> = reports.iter().flat_map(|r| r.checks()).collect();
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    // Worst margin |analytic - estimate| / tolerance over all checks.
    let worst = checks
        .iter()
        .map(|c| ((c.analytic - c.estimate).abs() / c.tolerance, c.name.as_str()))
        .fold((0.0, ""), |a, b| if b.0 > a.0 { b } else { a });
    let detail = if failed.is_empty() {
        format!("{} checks, worst margin {:.3} ({})", checks.len(), worst.0, worst.1)
    } else {
        let names: Vec<_> = failed
            .iter()
            .map(|c| format!("{} |{:.6e} - {:.6e}| > {:.3e}", c.name, c.analytic, c.estimate, c.tolerance))
            .collect();
        format!("{} of {} checks failed: {}", failed.len(), checks.len(), names.join("; "))
    };
    Outcome {
        pass: !checks.is_empty() && failed.is_empty(),
        detail,
    }
}

fn suites(list: &[(Suite, Option<usize>)]) -> Outcome {
    let mut reports = Vec::new();
    for &(suite, n) in list {
        match run(&verify(suite, n)) {
            Ok(r) => reports.push(r),
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("{suite} errored: {e}"),
                }
            }
        }
    }
    summarize(&reports)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = |name: &str| ExperimentConfig {
        experiment: Some(ExperimentKind::Resolvent),
        process: Some("skew-sticky".into()),
        f: Some("gaussian".into()),
        x: Some(vec![0.0, 0.5]),
        lambda: Some(vec![2.0]),
        n_paths: Some(2000),
        seed: Some(SEED),
        out: Some(dir.path().join(name)),
        ..Default::default()
    };
    for name in ["a.json", "b.json"] {
        if let Err(e) = run(&config(name)) {
            return Outcome {
                pass: false,
                detail: format!("run errored: {e}"),
            };
        }
    }
    let read = |name: &str| std::fs::read(dir.path().join(name)).expect("report written");
    let library_same = read("a.json") == read("b.json");

    // The binary, with different worker counts.
    let toml = dir.path().join("run.toml");
    std::fs::write(
        &toml,
        "experiment = \"resolvent\"\nprocess = \"skew-bullet\"\nf = \"exp_decay:c=1\"\nx = [0.0]\nlambda = [1.0]\nn_paths = 1000\n",
    )
    .expect("config written");
    let mut binary_same = true;
    let mut outputs = Vec::new();
    for threads in ["1", "2", "1"] {
        let out = dir.path().join(format!("bin-{}.json", outputs.len()));
        let status = Command::new(env!("CARGO_BIN_EXE_nlbm"))
            .args(["resolvent", "--config"])
            .arg(&toml)
            .args(["--seed", "11", "--threads", threads, "--out"])
            .arg(&out)
            .status()
            .expect("binary runs");
        if !status.success() {
            binary_same = false;
        }
        outputs.push(std::fs::read(&out).unwrap_or_default());
    }
    binary_same &= !outputs[0].is_empty() && outputs.windows(2).all(|w| w[0] == w[1]);
    Outcome {
        pass: library_same && binary_same,
        detail: format!("library reruns identical: {library_same}; binary reruns across thread counts identical: {binary_same}"),
    }
}

fn main() -> ExitCode {
    let n = Some(100_000);
    let criteria: Vec<Criterion> = vec![
        ("symbol identities", Some(Duration::from_secs(10)), Box::new(|| suites(&[(Suite::Symbols, None)]))),
        ("subordinator law", Some(Duration::from_secs(120)), Box::new(move || suites(&[(Suite::Subordinator, n)]))),
        ("inverse relation", None, Box::new(move || suites(&[(Suite::Inverse, n)]))),
        ("operator closed forms", None, Box::new(|| suites(&[(Suite::Operators, None)]))),
        ("fourier and laplace symbols", None, Box::new(|| suites(&[(Suite::Fourier, None)]))),
        ("bullet zero-resolvent", Some(Duration::from_secs(600)), Box::new(move || suites(&[(Suite::Appendix, n)]))),
        (
            "sticky zero-resolvent and conservativity",
            None,
            Box::new(move || suites(&[(Suite::Sticky, n), (Suite::Conservativity, Some(20_000))])),
        ),
        ("skewness", None, Box::new(move || suites(&[(Suite::Skewness, n)]))),
        ("interface conditions", None, Box::new(|| suites(&[(Suite::Interface, None)]))),
        ("classical limits", None, Box::new(|| suites(&[(Suite::ClassicalLimit, None)]))),
        ("representation formula", None, Box::new(move || suites(&[(Suite::Representation, n)]))),
        ("determinism", None, Box::new(determinism)),
    ];
    let mut failures = 0;
    for (k, (title, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > *limit {
                outcome.pass = false;
                outcome.detail.push_str(&format!("; runtime {elapsed:.1?} over {limit:?}"));
            }
        }
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} [{:.1?}] {}",
            k + 1,
            title,
            if outcome.pass { "PASS" } else { "FAIL" },
            elapsed,
            outcome.detail
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
