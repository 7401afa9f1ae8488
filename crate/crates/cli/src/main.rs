use std::path::PathBuf;
use std::process::ExitCode;

use chernoff_lab_cli::config::ExperimentConfig;
use chernoff_lab_cli::error::{check_exit_code, CliError, EXIT_USAGE};
use chernoff_lab_cli::output::write_report;
use chernoff_lab_cli::{presets, runner};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chernoff-lab", version, about = "Numerical experiments on Chernoff product formulas")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the data-parallel kernels.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List built-in presets, or print one preset's config.
    Presets { name: Option<String> },
}

fn set_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    let Some(n) = jobs else { return Ok(()) };
    if n == 0 {
        return Err(CliError::usage("--jobs", "must be positive"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage("--jobs", e.to_string()))?;
    Ok(())
}

fn run(config: PathBuf, out: Option<PathBuf>, jobs: Option<usize>) -> Result<u8, CliError> {
    set_jobs(jobs)?;
    let text = std::fs::read_to_string(&config).map_err(|source| CliError::Io {
        path: config.display().to_string(),
        source,
    })?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let report = runner::run(&cfg)?;
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    write_report(&dir, &report, cfg.seed)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {}", dir.display());
    Ok(report.first_failure().map_or(0, check_exit_code))
}

fn presets(name: Option<String>) -> Result<u8, CliError> {
    match name {
        None => {
            for p in presets::catalog() {
                println!("{:<30} {}", p.name, p.formula);
                println!("{:<30} {}", "", p.description);
            }
        }
        Some(n) => {
            let p = presets::find(&n).ok_or_else(|| CliError::usage("/", format!("unknown preset {n:?}")))?;
            println!("{}", serde_json::to_string_pretty(&p.config).expect("preset serializes"));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Cmd::Run { config, out, jobs } => run(config, out, jobs),
        Cmd::Presets { name } => presets(name),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
