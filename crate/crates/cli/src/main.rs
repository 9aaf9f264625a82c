//! `handover-tb`: generate, run and report handover test suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use handover_core::harness::{
    compare_curves, generate, generate_paper, load_tests, read_json, run_paper_suite, run_suite, write_json,
    write_reports, write_tests, Mode, SuiteConfig, SuiteResult, TestOutcome,
};
use handover_core::scenario::ScenarioConfig;
use handover_core::testgen::parse_constraints;

const EXIT_MONITOR_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "handover-tb", version, about = "BDI-driven testbench for a simulated human-robot handover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write abstract and concrete test files.
    Generate(GenerateArgs),
    /// Run concrete tests and write reports.
    Run(RunArgs),
    /// Re-render reports from a result directory.
    Report(ReportArgs),
    /// Compare coverage speed of the suites in result directories.
    Compare(CompareArgs),
    /// Generate and run the reference suite end to end.
    PaperSuite(PaperArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PaperSuite,
    Bdi,
    Random,
    Single,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PaperSuite => Mode::PaperSuite,
            ModeArg::Bdi => Mode::Bdi,
            ModeArg::Random => Mode::Random,
            ModeArg::Single => Mode::Single,
        }
    }
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario config (TOML). Defaults are used when absent.
    #[arg(long, env = "HANDOVER_TB_CONFIG")]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<ScenarioConfig> {
        match &self.config {
            Some(p) => ScenarioConfig::load(p).with_context(|| format!("loading {}", p.display())),
            None => Ok(ScenarioConfig::default()),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "bdi")]
    mode: ModeArg,
    /// Take the tests from the reference suite instead of generating afresh.
    #[arg(long)]
    paper_suite: bool,
    #[arg(long, default_value_t = 30)]
    count: usize,
    /// Seed of the first test; test k uses seed + k - 1.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// JSON constraint list for random mode.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Abstract sequence file for single mode.
    #[arg(long = "abstract")]
    abstract_file: Option<PathBuf>,
    #[arg(long, default_value = "tests-out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Concrete test file, a directory of them, or a `generate` output directory.
    tests: PathBuf,
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Suite name in reports; defaults to the input's file name.
    #[arg(long)]
    name: Option<String>,
    /// Exit with status 2 if any monitor failed.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding `outcomes.json`.
    results: PathBuf,
    /// Where to write; defaults to the input directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(required = true, num_args = 1..)]
    results: Vec<PathBuf>,
    /// Write the comparison CSV here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PaperArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, default_value = "paper-results")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    strict: bool,
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let mode = Mode::from(a.mode);
    let g = if a.paper_suite {
        generate_paper(mode)?
    } else {
        let constraints = match &a.constraints {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                parse_constraints(&text)?
            }
            None => Vec::new(),
        };
        let cfg = SuiteConfig {
            mode,
            count: if mode == Mode::Single { 1 } else { a.count },
            first_seed: a.seed,
            config_path: None,
            out: a.out.clone(),
            jobs: 1,
        };
        generate(&cfg, &constraints, a.abstract_file.as_deref())?
    };
    write_tests(&a.out, &g.abstracts, &g.tests)?;
    println!(
        "wrote {} abstract and {} concrete tests to {}",
        g.abstracts.len(),
        g.tests.len(),
        a.out.display()
    );
    Ok(())
}

fn suite_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty() && s != "concrete")
        .unwrap_or_else(|| "suite".into())
}

fn summarize(suites: &[&SuiteResult]) {
    for s in suites {
        let t = s.tuples();
        let hit = t.iter().filter(|c| **c > 0).count();
        println!(
            "{}: {} tests, {} errors, {} of 13 tuples hit, monitor failures: {}",
            s.name,
            s.outcomes.len(),
            s.errors().count(),
            hit,
            if s.any_monitor_failed() { "yes" } else { "no" }
        );
    }
}

fn exit_for(suites: &[&SuiteResult], strict: bool) -> ExitCode {
    if strict && suites.iter().any(|s| s.any_monitor_failed()) {
        ExitCode::from(EXIT_MONITOR_FAILED)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_run(a: &RunArgs) -> Result<ExitCode> {
    if a.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let cfg = a.config.load()?;
    let concrete = a.tests.join("concrete");
    let input = if concrete.is_dir() { concrete } else { a.tests.clone() };
    let tests = load_tests(&input)?;
    let name = a.name.clone().unwrap_or_else(|| suite_name(&a.tests));
    let result = run_suite(&name, &tests, &cfg, a.jobs)?;
    write_reports(&a.out, &[&result])?;
    summarize(&[&result]);
    Ok(exit_for(&[&result], a.strict))
}

fn load_results(dir: &Path) -> Result<Vec<SuiteResult>> {
    let path = dir.join("outcomes.json");
    if !path.exists() {
        bail!("missing suite: {} has no outcomes.json", dir.display());
    }
    let map: std::collections::BTreeMap<String, Vec<TestOutcome>> = read_json(&path)?;
    Ok(map.into_iter().map(|(n, o)| SuiteResult::from_outcomes(n, o)).collect())
}

fn cmd_report(a: &ReportArgs) -> Result<ExitCode> {
    let suites = load_results(&a.results)?;
    let refs: Vec<&SuiteResult> = suites.iter().collect();
    let out = a.out.as_ref().unwrap_or(&a.results);
    write_reports(out, &refs)?;
    summarize(&refs);
    Ok(exit_for(&refs, a.strict))
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let mut curves: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, dir) in a.results.iter().enumerate() {
        for s in load_results(dir)? {
            let name = if curves.iter().any(|(n, _)| *n == s.name) {
                format!("{}#{}", s.name, i + 1)
            } else {
                s.name.clone()
            };
            curves.push((name, s.curve()));
        }
    }
    let refs: Vec<(&str, &[usize])> = curves.iter().map(|(n, c)| (n.as_str(), c.as_slice())).collect();
    let cmp = compare_curves(&refs);
    let csv = cmp.to_csv();
    print!("{csv}");
    for e in &cmp.empty {
        eprintln!("warning: suite `{e}` has no tests");
    }
    if let Some(p) = &a.out {
        std::fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_paper(a: &PaperArgs) -> Result<ExitCode> {
    if a.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let cfg = a.config.load()?;
    let run = run_paper_suite(&cfg, a.jobs)?;
    write_tests(&a.out.join("tests"), &run.suite.bdi_abstract, &run.suite.bdi.iter().map(|t| t.test.clone()).collect::<Vec<_>>())?;
    write_tests(&a.out.join("tests"), &run.suite.random_abstract, &run.suite.random.iter().map(|t| t.test.clone()).collect::<Vec<_>>())?;
    run.write_reports(&a.out)?;
    let bdi_curve = run.bdi.curve();
    let rnd_curve = run.random.curve();
    let cmp = compare_curves(&[("bdi", &bdi_curve), ("random", &rnd_curve)]);
    std::fs::write(a.out.join("comparison.csv"), cmp.to_csv()).context("writing comparison.csv")?;
    write_json(&a.out.join("comparison.json"), &cmp)?;
    summarize(&[&run.bdi, &run.random]);
    println!("reports in {}", a.out.display());
    Ok(exit_for(&[&run.bdi, &run.random], a.strict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a).map(|_| ExitCode::SUCCESS),
        Command::Run(a) => cmd_run(a),
        Command::Report(a) => cmd_report(a),
        Command::Compare(a) => cmd_compare(a).map(|_| ExitCode::SUCCESS),
        Command::PaperSuite(a) => cmd_paper(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
