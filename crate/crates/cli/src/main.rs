use std::io::Write as _;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use ratiolist_cli::config::CommonArgs;
use ratiolist_cli::record::{records_text, to_csv, OutputFormat};
use ratiolist_cli::{run, CommandKind};

/// Numerical laboratory for ratio list decoding over discrete memoryless
/// channels.
#[derive(Parser)]
#[command(name = "ratiolist", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channel capacity via the certified Blahut-Arimoto solver.
    Capacity(CommonArgs),
    /// Exact constant-list error probability by both enumeration routes.
    Exact(CommonArgs),
    /// Monte Carlo decoding error estimates with Wilson standard errors.
    Simulate(CommonArgs),
    /// Converse floor, random-coding ceiling, and ratio-converse at a point.
    Bounds(CommonArgs),
    /// Monte Carlo sweep over grids of n, rate, and list exponent.
    Sweep(CommonArgs),
    /// Identification list-size bound 1 - C/(C + delta - eps).
    Idbound(CommonArgs),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Capacity(a) => (CommandKind::Capacity, a),
        Command::Exact(a) => (CommandKind::Exact, a),
        Command::Simulate(a) => (CommandKind::Simulate, a),
        Command::Bounds(a) => (CommandKind::Bounds, a),
        Command::Sweep(a) => (CommandKind::Sweep, a),
        Command::Idbound(a) => (CommandKind::IdBound, a),
    };
    let experiment = args.resolve()?;
    let started = Instant::now();
    let mut records = run(kind, &experiment)?;
    let elapsed = started.elapsed().as_secs_f64();
    for record in &mut records {
        record.wall_clock_secs = elapsed;
    }

    match experiment.format {
        OutputFormat::Text => {
            if experiment.out.is_some() {
                bail!("--format text prints to standard output; drop --out or pick csv/records");
            }
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            for record in &records {
                handle.write_all(record.human_text().as_bytes())?;
            }
        }
        OutputFormat::Csv | OutputFormat::Records => {
            let Some(path) = &experiment.out else {
                bail!("--format csv/records writes to a file; pass --out PATH");
            };
            let body = match experiment.format {
                OutputFormat::Csv if kind == CommandKind::Sweep => {
                    let columns = ratiolist_cli::commands::sweep_csv_columns(
                        experiment.spectrum_trials.is_some(),
                    );
                    ratiolist_cli::record::to_csv_with_columns(&records, &columns)
                }
                OutputFormat::Csv => to_csv(&records),
                _ => records_text(&records),
            };
            std::fs::write(path, body)?;
            println!(
                "wrote {} record(s) to {} in {:.3}s",
                records.len(),
                path.display(),
                elapsed
            );
        }
    }
    Ok(())
}
