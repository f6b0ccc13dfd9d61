//! `mfes`: run extremum-seeking scenarios, sweeps, and the verification
//! suite from the command line.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use mfes_cli::acceptance;
use mfes_cli::config_file::{from_scenario, RawConfig};
use mfes_cli::runner::{self, EXIT_DIVERGED, EXIT_VALIDATION};
use mfes_core::scenario::{preset_cart, preset_example1};

#[derive(Parser)]
#[command(
    name = "mfes",
    about = "Output-feedback extremum seeking via monitoring functions: scenario runner and verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRunArgs {
    /// Output directory for trace.csv, metrics.txt, metadata.txt
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a config key, e.g. --set controller.r=0.05 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Measurement-noise seed shorthand for --set noise.seed=N
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file
    Run {
        /// Scenario config path
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Run the multi-extremum numerical example preset
    Example1 {
        /// Initial plant output z(0)
        #[arg(long, default_value_t = 4.0)]
        z0: f64,
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Run the light-seeking servo cart preset
    Cart {
        /// Move the source along the track per the experiment-II schedule
        #[arg(long)]
        moving: bool,
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Run a scenario once per value of a config key, concurrently
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted config key to sweep, e.g. controller.mu
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long)]
        values: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the acceptance-criteria suite and print one line per criterion
    Verify {
        /// Directory for the verification report
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load_raw(path: &PathBuf) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    RawConfig::parse(&text)
}

fn apply_common(raw: &mut RawConfig, common: &CommonRunArgs) -> Result<()> {
    for kv in &common.set {
        let (key, value) = kv
            .split_once('=')
            .with_context(|| format!("--set `{kv}` must look like section.key=value"))?;
        raw.set(key.trim(), value.trim())?;
    }
    if let Some(seed) = common.seed {
        raw.set("noise.seed", &seed.to_string())?;
    }
    Ok(())
}

fn execute_run(mut raw: RawConfig, common: &CommonRunArgs) -> Result<u8> {
    apply_common(&mut raw, common)?;
    let config = raw.build()?;
    if let Err(violations) = config.validate() {
        eprintln!("scenario validation failed:");
        for v in violations {
            eprintln!("  {v}");
        }
        return Ok(EXIT_VALIDATION as u8);
    }
    let art = runner::run_to_dir(&config, &common.out)?;
    println!(
        "wrote {} ({} samples, {} switches)",
        art.trace_path.display(),
        art.outcome.trace.rows.len(),
        art.outcome.switch_count
    );
    println!(
        "terminal oscillation {:.6}, first entry {}",
        art.metrics.terminal_oscillation,
        art.metrics
            .first_entry_time
            .map(|t| format!("{t:.3} s"))
            .unwrap_or_else(|| "absent".into())
    );
    if !art.outcome.completed() {
        eprintln!("trajectory diverged; partial trace written");
        return Ok(EXIT_DIVERGED as u8);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<u8> = (|| match cli.command {
        Command::Run { config, common } => execute_run(load_raw(&config)?, &common),
        Command::Example1 { z0, common } => execute_run(from_scenario(&preset_example1(z0)), &common),
        Command::Cart { moving, common } => execute_run(from_scenario(&preset_cart(moving)), &common),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let raw = load_raw(&config)?;
            let values: Vec<String> = values
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if values.is_empty() {
                eprintln!("sweep needs a nonempty --values list");
                return Ok(EXIT_VALIDATION as u8);
            }
            let rows = runner::sweep(&raw, &param, &values, &out)?;
            println!("value,status,first_entry,terminal_oscillation,switches");
            for (value, metrics, status) in &rows {
                match metrics {
                    Some(m) => println!(
                        "{value},{status},{},{},{}",
                        m.first_entry_time.map(|t| t.to_string()).unwrap_or_default(),
                        m.terminal_oscillation,
                        m.switch_count
                    ),
                    None => println!("{value},{status},,,"),
                }
            }
            println!("summary written to {}", out.join("sweep.csv").display());
            Ok(0)
        }
        Command::Verify { out } => {
            let started = Instant::now();
            let results = acceptance::run_all();
            let mut text = String::new();
            let all = acceptance::report(&results, &mut text);
            print!("{text}");
            println!(
                "{} of {} criteria passed in {:.1} s",
                results.iter().filter(|r| r.passed).count(),
                results.len(),
                started.elapsed().as_secs_f64()
            );
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("verify_report.txt"), &text)?;
            Ok(if all { 0 } else { 1 })
        }
    })();

    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_VALIDATION as u8)
        }
    }
}
