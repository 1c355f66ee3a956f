//! Config-driven experiment runner for Levy-type process simulation and
//! diagnostics. One experiment per invocation; results are a function of
//! the configuration and seed alone.

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use levytype_cli::config::ExperimentConfig;
use levytype_cli::plotdata::emit_plot_data;
use levytype_cli::runner::{run_experiment, RunOverrides};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "levytype", version, about = "Levy-type process experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment described by a TOML config.
    Run(RunArgs),
    /// Emit tidy plot CSVs from a completed run directory.
    PlotData {
        /// Artifact directory of a completed run.
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; affects speed only, never results.
    #[arg(long)]
    threads: Option<usize>,
    /// Validate the configuration without running.
    #[arg(long)]
    check: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let config = ExperimentConfig::load(&args.config)?;
    let overrides = RunOverrides {
        out: args.out,
        seed: args.seed,
        check_only: args.check,
    };
    let go = || -> Result<()> {
        let summary = run_experiment(config, &overrides)?;
        if args.check {
            println!("configuration valid");
        } else {
            println!("run complete: {}", summary.out_dir.display());
            for a in &summary.artifacts {
                println!("  {a}");
            }
            if summary.condition_failures > 0 {
                println!(
                    "  ({} condition check(s) reported fail; see conditions.csv)",
                    summary.condition_failures
                );
            }
        }
        Ok(())
    };
    match args.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(go)
        }
        None => go(),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => run(args),
        Cmd::PlotData { dir } => emit_plot_data(&dir).map(|files| {
            for f in files {
                println!("{f}");
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
