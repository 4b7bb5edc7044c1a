use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use slopekit::RadiusSchedule;
use slopekit_cli::analyze::{analyze, Overrides};
use slopekit_cli::catalog;
use slopekit_cli::error::{CliError, EXIT_NEGATIVE, EXIT_OK, EXIT_PROPERTY};
use slopekit_cli::render::{json, render, Format};
use slopekit_cli::spec::load;
use slopekit_cli::verify;

#[derive(Parser)]
#[command(name = "slopekit", version, about = "Slopes, error bounds and subregularity on sampled spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a spec file or a `catalog:<name>` entry.
    Analyze {
        /// Path to a JSON spec, or `catalog:<name>`.
        input: String,
        /// Base point override: comma-separated coordinates (`x,y` for
        /// mappings), or an index for finite value tables.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Point for the pointwise quantities; defaults to the base.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Radius schedule as `rho0,gamma,steps`.
        #[arg(long)]
        schedule: Option<String>,
        /// Convergence tolerance of the limit estimates.
        #[arg(long)]
        tol: Option<f64>,
        /// Threshold of the criteria conditions.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Exit with status 1 unless the headline property matches.
        #[arg(long)]
        expect: Option<bool>,
        /// Also write report.json, report.txt and report.csv into this directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the seeded property suite.
    Verify {
        /// Comma-separated check ids; `*` is a wildcard.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "table")]
        format: VerifyFormat,
    },
    /// List the built-in fixtures.
    Catalog {
        #[arg(long, value_enum, default_value = "table")]
        format: VerifyFormat,
        /// Print the spec file of one entry instead.
        #[arg(long)]
        spec: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyFormat {
    Json,
    Table,
}

fn numbers(flag: &'static str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::Flag { flag, message: format!("`{t}`: {e}") }))
        .collect()
}

fn schedule(s: &str) -> Result<RadiusSchedule, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = |message: String| CliError::Flag { flag: "--schedule", message };
    let [rho0, gamma, steps] = parts[..] else {
        return Err(bad(format!("expected rho0,gamma,steps, got `{s}`")));
    };
    Ok(RadiusSchedule {
        rho0: rho0.parse().map_err(|e| bad(format!("rho0 `{rho0}`: {e}")))?,
        gamma: gamma.parse().map_err(|e| bad(format!("gamma `{gamma}`: {e}")))?,
        steps: steps.parse().map_err(|e| bad(format!("steps `{steps}`: {e}")))?,
    })
}

fn write_outputs(dir: &PathBuf, report: &slopekit_cli::analyze::Report) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io { path: dir.display().to_string(), message: e.to_string() };
    std::fs::create_dir_all(dir).map_err(io)?;
    for format in [Format::Json, Format::Table, Format::Csv] {
        let path = dir.join(format!("report.{}", format.extension()));
        std::fs::write(&path, render(report, format))
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze { input, at, point, schedule: sched, tol, gamma, format, expect, output } => {
            let overrides = Overrides {
                at: at.as_deref().map(|s| numbers("--at", s)).transpose()?,
                point: point.as_deref().map(|s| numbers("--point", s)).transpose()?,
                schedule: sched.as_deref().map(schedule).transpose()?,
                tol,
                gamma,
            };
            let loaded = load(&input)?;
            let report = analyze(&loaded, &overrides)?;
            print!("{}", render(&report, format));
            if let Some(dir) = output {
                write_outputs(&dir, &report)?;
            }
            Ok(match expect {
                Some(e) if e != report.headline.holds => EXIT_NEGATIVE,
                _ => EXIT_OK,
            })
        }
        Command::Verify { filter, seed, format } => {
            if verify::selected(filter.as_deref()).is_empty() {
                return Err(CliError::Flag { flag: "--filter", message: format!("no check matches `{}`", filter.unwrap_or_default()) });
            }
            let report = verify::run(filter.as_deref(), seed);
            match format {
                VerifyFormat::Json => print!("{}", json(&report)),
                VerifyFormat::Table => print!("{}", verify::render_text(&report)),
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_PROPERTY })
        }
        Command::Catalog { format, spec } => {
            if let Some(name) = spec {
                let e = catalog::entry(&name).ok_or(CliError::UnknownFixture(name))?;
                print!("{}", json(&e.spec));
                return Ok(EXIT_OK);
            }
            let entries = catalog::entries();
            match format {
                VerifyFormat::Json => print!("{}", json(&entries)),
                VerifyFormat::Table => print!("{}", catalog::render_table(&entries)),
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
