use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use infospec_cli::{
    emit_outputs, parse_grid, parse_structure, run_stages, CliError, ConfigIssue, ExperimentConfig, Stage,
    EXIT_CONFIG, EXIT_FINDING, EXIT_OK,
};
use infospec_core::models::validate::{validate_channel, validate_source};

#[derive(Debug, Clone)]
struct Grid(Vec<usize>);

fn grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

#[derive(Debug, Parser)]
#[command(name = "infospec", version, about = "Information-spectrum experiments for general sources and channels")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Monte Carlo seed; overrides the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for the compute modules.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Block lengths, `a..b` (inclusive) or a comma-separated list.
    #[arg(long = "n-grid", global = true, value_name = "GRID", value_parser = grid_arg)]
    n_grid: Option<Grid>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy and information spectra with p-lim summaries.
    Spectrum,
    /// Finite-blocklength bound on the grid.
    Bound { kind: BoundArg },
    /// Random-coding ensemble error against the Feinstein bound.
    Simulate,
    /// Condition check over the grid.
    Check { kind: CheckArg },
    /// Built-in worked examples.
    Example { kind: ExampleArg },
    /// Validate the config and print model diagnostics.
    Validate,
    /// Run the stages listed in the config.
    Run,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundArg {
    Feinstein,
    Converse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    Direct,
    Converse,
    Domination,
    Separation,
    Epsilon,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExampleArg {
    Alternating,
    Mixed,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let Some(path) = &cli.config else {
        return Err(CliError::Config(vec![ConfigIssue::new("", "--config is required for this command")]));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![ConfigIssue::new("", format!("cannot read {}: {e}", path.display()))]))?;
    parse_structure(&text).map_err(CliError::Config)
}

fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) {
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(Grid(g)) = &cli.n_grid {
        cfg.n_grid = g.clone();
    }
}

fn example_config(cli: &Cli, kind: ExampleArg) -> Result<ExperimentConfig, CliError> {
    let ex = match kind {
        ExampleArg::Alternating => ExperimentConfig::example_alternating((1..=10).collect()),
        ExampleArg::Mixed => ExperimentConfig::example_mixed(vec![128, 256, 512, 1024]),
    };
    if cli.config.is_none() {
        return Ok(ex);
    }
    // A supplied config contributes grid, evaluation and tolerances; the
    // models are the example's.
    let mut cfg = load(cli)?;
    cfg.source = ex.source;
    cfg.channel = ex.channel;
    cfg.coupling = ex.coupling;
    cfg.candidates = ex.candidates;
    cfg.stages = ex.stages;
    Ok(cfg)
}

fn validate(cli: &Cli) -> Result<u8, CliError> {
    let mut cfg = load(cli)?;
    apply_overrides(cli, &mut cfg);
    let issues = cfg.validate(&[]);
    let report = json!({
        "valid": issues.is_empty(),
        "config_sha256": cfg.hash(),
        "issues": issues,
        "source": validate_source(&cfg.source, &cfg.n_grid),
        "channel": validate_channel(&cfg.channel),
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(if issues.is_empty() { EXIT_OK } else { EXIT_CONFIG })
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    if let Some(jobs) = cli.jobs {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let (mut cfg, stages) = match &cli.command {
        Command::Validate => return validate(cli),
        Command::Example { kind } => {
            let stage = match kind {
                ExampleArg::Alternating => Stage::ExampleAlternating,
                ExampleArg::Mixed => Stage::ExampleMixed,
            };
            (example_config(cli, *kind)?, vec![stage])
        }
        Command::Run => {
            let cfg = load(cli)?;
            let plan = cfg.stage_plan(&[]);
            (cfg, plan)
        }
        cmd => {
            let stage = match cmd {
                Command::Spectrum => Stage::Spectrum,
                Command::Bound { kind: BoundArg::Feinstein } => Stage::BoundFeinstein,
                Command::Bound { kind: BoundArg::Converse } => Stage::BoundConverse,
                Command::Simulate => Stage::Simulate,
                Command::Check { kind } => match kind {
                    CheckArg::Direct => Stage::CheckDirect,
                    CheckArg::Converse => Stage::CheckConverse,
                    CheckArg::Domination => Stage::CheckDomination,
                    CheckArg::Separation => Stage::CheckSeparation,
                    CheckArg::Epsilon => Stage::CheckEpsilon,
                },
                _ => unreachable!("handled above"),
            };
            (load(cli)?, vec![stage])
        }
    };
    apply_overrides(cli, &mut cfg);
    let out = run_stages(&cfg, &stages)?;
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    if let Some(manifest) = emit_outputs(&out, &dir)? {
        for f in &manifest.files {
            println!("{}", dir.join(&f.name).display());
        }
    }
    for f in &out.findings {
        eprintln!("finding: {f}");
    }
    Ok(if out.findings.is_empty() { EXIT_OK } else { EXIT_FINDING })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
