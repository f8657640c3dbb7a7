use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use instexp::harness::{
    expand_cells, load_config, resolve_output, run_grid, write_csv, ExperimentConfig, GridOptions,
    StreamSource,
};
use instexp::streams::PRESETS;

/// Online active learning with instance exploitation: experiment runner.
#[derive(Debug, Parser)]
#[command(name = "instexp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every budget/strategy/seed cell of a config and write the result CSV.
    Run {
        config: PathBuf,
        /// Cells run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Overrides the config's `output` and the output directory variable.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run a single seed instead of the configured list.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Fill the elapsed_ms column. Timed output is not byte-reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Built-in synthetic streams.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
    /// Parse a config and print it with every default filled in.
    Validate { config: PathBuf },
}

#[derive(Debug, Subcommand)]
enum PresetsAction {
    List,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            jobs,
            output,
            seed_override,
            timing,
        } => run(config, jobs, output, seed_override, timing),
        Command::Presets {
            action: PresetsAction::List,
        } => {
            list_presets(&mut std::io::stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            let parsed = load_config(&config)
                .with_context(|| format!("invalid config {}", config.display()))?;
            describe(&parsed, &mut std::io::stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(
    config_path: PathBuf,
    jobs: usize,
    output: Option<PathBuf>,
    seed_override: Option<u64>,
    timing: bool,
) -> Result<ExitCode> {
    let config = load_config(&config_path)
        .with_context(|| format!("invalid config {}", config_path.display()))?;
    let options = GridOptions {
        jobs: jobs.max(1),
        seed_override,
        timing,
    };
    let out_path = resolve_output(&config, output.as_deref());
    let budgets = &config.budgets;
    let strategies = &config.strategies;
    let outcome = run_grid(&config, &options, &|cell, done, total| {
        eprintln!(
            "[{done}/{total}] B={} {} seed {}",
            budgets[cell.budget_index],
            strategies[cell.strategy_index].name(),
            cell.seed
        );
    });

    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    let file = fs::File::create(&out_path)
        .with_context(|| format!("cannot write {}", out_path.display()))?;
    write_csv(&outcome.rows, file)?;
    eprintln!(
        "wrote {} rows to {}",
        outcome.rows.len(),
        out_path.display()
    );

    for f in &outcome.failures {
        eprintln!(
            "failed: B={} {} seed {}: {}",
            budgets[f.cell.budget_index],
            strategies[f.cell.strategy_index].name(),
            f.cell.seed,
            f.message
        );
    }
    Ok(if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn list_presets(out: &mut impl Write) -> Result<()> {
    writeln!(
        out,
        "{:<8} {:<10} {:>9} {:>4} {:>7} {:>7} {:>6} {:>5}",
        "name", "family", "length", "dim", "classes", "width", "drifts", "noise"
    )?;
    for p in PRESETS {
        writeln!(
            out,
            "{:<8} {:<10} {:>9} {:>4} {:>7} {:>7} {:>6} {:>5}",
            p.name,
            format!("{:?}", p.family),
            p.length,
            p.dim,
            p.classes,
            p.width,
            p.drifts,
            p.noise
        )?;
    }
    Ok(())
}

fn describe(c: &ExperimentConfig, out: &mut impl Write) -> Result<()> {
    let stream = match &c.stream {
        StreamSource::Preset(p) => format!("preset {}", p.name),
        StreamSource::File { path, .. } => format!("file {}", path.display()),
    };
    let strategies: Vec<&str> = c.strategies.iter().map(|s| s.name()).collect();
    writeln!(out, "name          {}", c.name)?;
    writeln!(out, "stream        {stream}")?;
    if let Some(n) = c.length {
        writeln!(out, "length        {n}")?;
    }
    writeln!(out, "learner       {}", c.learner.kind.name())?;
    writeln!(out, "query         {}", c.query.name())?;
    writeln!(out, "budgets       {:?}", c.budgets)?;
    writeln!(out, "alpha_theta   {:?}", c.alpha_theta)?;
    writeln!(out, "strategies    {}", strategies.join(", "))?;
    writeln!(out, "lambda_max    {:?} ({})", c.lambda_max, c.lambda_label)?;
    writeln!(out, "window        {}", c.window.describe())?;
    writeln!(
        out,
        "intensity     {}",
        if c.dynamic_intensity {
            "dynamic"
        } else {
            "fixed"
        }
    )?;
    writeln!(out, "gamma         {}", c.gamma)?;
    writeln!(out, "ensemble      {}", c.ensemble.describe())?;
    writeln!(out, "seeds         {:?}", c.seeds)?;
    writeln!(
        out,
        "cells         {}",
        expand_cells(c, &GridOptions::default()).len()
    )?;
    writeln!(out, "output        {}", resolve_output(c, None).display())?;
    Ok(())
}
