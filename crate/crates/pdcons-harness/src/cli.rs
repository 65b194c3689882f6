//! Command-line front-end.
//!
//! ```text
//! pdcons <run|sweep|compare|certify> --config <path> [--out <dir>]
//!        [--seed <u64>] [--quiet] [--set key=value ...]
//! ```
//!
//! Exit codes: 0 success, 1 runtime failure or failed certification,
//! 2 usage/config errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::experiments::{expected_kind, run_certify, run_compare, run_quadratic_sweep};
use crate::records::{render_averages_csv, render_runs_csv, render_series_csv};
use crate::{HarnessError, Result};

#[derive(Parser)]
#[command(name = "pdcons", version, about = "Consensus primal-dual experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured algorithm once on a single instance.
    Run(CommonArgs),
    /// Multi-seed quadratic sweep over network sizes.
    Sweep(CommonArgs),
    /// Relative-error comparison of the configured algorithms on one instance.
    Compare(CommonArgs),
    /// Compute a rate certificate and verify it along a trajectory.
    Certify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the first seed of the configured seed range.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress output.
    #[arg(long)]
    quiet: bool,
    /// Override a config value by dotted path, e.g. stopping.epsilon=0.001.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Run(_) => "run",
            Command::Sweep(_) => "sweep",
            Command::Compare(_) => "compare",
            Command::Certify(_) => "certify",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Run(a) | Command::Sweep(a) | Command::Compare(a) | Command::Certify(a) => a,
        }
    }
}

fn timestamp_line(subcommand: &str) -> String {
    let unix =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or_default();
    format!("# pdcons {subcommand} generated_unix={unix}")
}

/// Run the CLI and return the process exit code.
pub fn cli_main<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, everything else is usage.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };

    match execute(&cli.command) {
        Ok(code) => code,
        Err(HarnessError::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: &Command) -> Result<i32> {
    let args = command.args();
    if !args.config.exists() {
        return Err(HarnessError::Config(format!(
            "config file not found: {}",
            args.config.display()
        )));
    }

    let mut overrides = args.set.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("graph.seeds.start={seed}"));
    }
    let cfg = ExperimentConfig::load(&args.config, &overrides)?;

    let sub = command.name();
    match expected_kind(sub) {
        Some(kind) if kind == cfg.kind => {}
        Some(_) => {
            return Err(HarnessError::Config(format!(
                "config kind {:?} does not match subcommand `{sub}`",
                cfg.kind
            )));
        }
        None => unreachable!("clap restricts subcommands"),
    }

    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    fs::create_dir_all(&out_dir)?;
    fs::write(out_dir.join("config_resolved.json"), cfg.to_json_pretty())?;

    if !args.quiet {
        for w in cfg.warnings() {
            println!("note: {w}");
        }
    }

    let status = match command {
        Command::Sweep(_) => {
            let out = run_quadratic_sweep(&cfg)?;
            write_file(
                &out_dir.join("sweep_runs.csv"),
                &render_runs_csv(&out.records, Some(&timestamp_line(sub))),
            )?;
            write_file(
                &out_dir.join("sweep_averages.csv"),
                &render_averages_csv(&out.averages, Some(&timestamp_line(sub))),
            )?;
            if !args.quiet {
                println!(
                    "sweep: {} runs over n={:?}, seeds {}..{}",
                    out.records.len(),
                    cfg.graph.n,
                    cfg.graph.seeds.start,
                    cfg.graph.seeds.start + cfg.graph.seeds.count
                );
                println!("wrote {}", out_dir.join("sweep_runs.csv").display());
                println!("wrote {}", out_dir.join("sweep_averages.csv").display());
            }
            0
        }
        Command::Run(_) | Command::Compare(_) => {
            let prefix = if matches!(command, Command::Run(_)) { "run" } else { "compare" };
            let out = run_compare(&cfg)?;
            write_file(
                &out_dir.join(format!("{prefix}_results.csv")),
                &render_runs_csv(&out.records, Some(&timestamp_line(sub))),
            )?;
            write_file(
                &out_dir.join(format!("{prefix}_series.csv")),
                &render_series_csv(&out.series, Some(&timestamp_line(sub))),
            )?;
            if !args.quiet {
                println!("{prefix}: {} algorithms recorded", out.records.len());
                println!("wrote {}", out_dir.join(format!("{prefix}_results.csv")).display());
                println!("wrote {}", out_dir.join(format!("{prefix}_series.csv")).display());
            }
            0
        }
        Command::Certify(_) => {
            let out = run_certify(&cfg)?;
            write_file(&out_dir.join("certify_report.txt"), &out.report)?;
            if !args.quiet {
                print!("{}", out.report);
            }
            if out.passed {
                0
            } else {
                eprintln!("certification failed; see report above");
                1
            }
        }
    };
    Ok(status)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)?;
    Ok(())
}
