use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use metaspin_cli::cache::Cache;
use metaspin_cli::commands;
use metaspin_cli::config::{CommonArgs, Format, RunConfig};
use metaspin_cli::output::Report;
use metaspin_cli::verify;

/// Steady states, Liouvillian gaps and instanton barriers of a driven-dissipative collective spin.
#[derive(Parser)]
#[command(name = "metaspin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// QME and mean-field magnetization over a Γ grid
    SteadySweep(CommonArgs),
    /// Quantum and SW barriers over a Γ grid, with their crossings
    Barriers(CommonArgs),
    /// Liouvillian gaps against J, with fitted slopes and estimators
    GapScaling(CommonArgs),
    /// Mean-field velocity field and fixed points at one Γ
    Portrait(CommonArgs),
    /// Instanton samples and running actions at one Γ
    Instanton(CommonArgs),
    /// Coefficients of the auxiliary Hamiltonians by momentum monomial
    Derive(CommonArgs),
    /// Run the built-in consistency checks
    Verify,
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(cfg: &RunConfig, r: &Report) -> Result<()> {
    let mut w = sink(cfg)?;
    r.write(cfg.format, &mut w)?;
    w.flush()?;
    if cfg.format == Format::Csv {
        for line in r.summary_lines() {
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let report = match &cli.command {
        Command::Verify => {
            let outcomes = verify::run_all();
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
            println!("{} checks, {failed} failed", outcomes.len());
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Derive(a) => {
            let cfg = RunConfig::resolve(a)?;
            let mut w = sink(&cfg)?;
            w.write_all(commands::derive(cfg.format)?.as_bytes())?;
            w.flush()?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::SteadySweep(a) | Command::GapScaling(a) => {
            let cfg = RunConfig::resolve(a)?;
            let cache = Cache::new(cfg.cache_dir.clone())?;
            let r = if matches!(cli.command, Command::SteadySweep(_)) {
                commands::steady_sweep(&cfg, &cache)?
            } else {
                commands::gap_scaling(&cfg, &cache)?
            };
            (cfg, r)
        }
        Command::Barriers(a) => {
            let cfg = RunConfig::resolve(a)?;
            let r = commands::barriers(&cfg)?;
            (cfg, r)
        }
        Command::Portrait(a) => {
            let cfg = RunConfig::resolve(a)?;
            let r = commands::portrait(&cfg)?;
            (cfg, r)
        }
        Command::Instanton(a) => {
            let cfg = RunConfig::resolve(a)?;
            let r = commands::instanton(&cfg)?;
            (cfg, r)
        }
    };
    emit(&report.0, &report.1)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
