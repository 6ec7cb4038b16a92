use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod catalog;
mod commands;
mod load;
mod report;

use commands::Operation;
use load::{Config, Loader};
use report::{render, write_text, Report};

#[derive(Debug, Parser)]
#[command(name = "roebench", version, about = "Doubles of metric spaces, support masks and partial bijections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: Config,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compact sorted-key JSON with no timing data.
    #[arg(long, global = true)]
    canonical: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(flatten)]
    Op(Operation),
    /// Run a named experiment (built in, or a file in $ROEBENCH_CATALOG_DIR).
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
struct CatalogArgs {
    #[arg(required_unless_present = "list")]
    name: Option<String>,
    /// List the available entries.
    #[arg(long)]
    list: bool,
}

fn execute(cli: &Cli) -> Result<(Report, Option<PathBuf>)> {
    cli.config.coarse()?;
    match &cli.command {
        Command::Op(op) => Ok((commands::run(op, &cli.config, &Loader::new(".", &cli.config))?, None)),
        Command::Catalog(args) => catalog::run(args.name.as_deref().unwrap_or_default(), &cli.config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Catalog(CatalogArgs { list: true, .. }) = &cli.command {
        return match catalog::list() {
            Ok(entries) => {
                for (name, source) in entries {
                    let about = catalog::BUILTIN.iter().find(|(n, _)| *n == name && source == "built-in");
                    println!("{name}\t{source}\t{}", about.map_or("", |(_, a)| a));
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        };
    }
    let started = Instant::now();
    let (report, file_out) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let elapsed = (!cli.canonical).then(|| started.elapsed().as_millis());
    let text = render(&report.to_value(elapsed), cli.canonical);
    let written = match cli.out.as_ref().or(file_out.as_ref()) {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let status = report.status();
    if let Some(c) = report.first_failure() {
        eprintln!("{}: {:?} ({})", c.name, c.status, c.detail);
    }
    ExitCode::from(status.exit_code() as u8)
}
