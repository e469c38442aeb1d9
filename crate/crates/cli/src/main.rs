mod commands;
mod error;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use terrain_guard::{Profile, SampleGrid};

use commands::{AtcMode, OracleQuery};
use error::CliError;
use report::{CommandEcho, RunReport};

#[derive(Parser, Debug)]
#[command(name = "terrain-guard", version, about = "Altitude guarding of x-monotone terrains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// One or more terrain files (JSON or CSV); several files give a JSON array of reports.
#[derive(Args, Debug)]
struct Batch {
    #[arg(long = "terrain", required = true, num_args = 1..)]
    terrains: Vec<PathBuf>,
    /// Instances solved concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest altitude admitting k covering guards.
    Atc {
        #[command(flatten)]
        batch: Batch,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = AtcMode::Exact)]
        mode: AtcMode,
        /// Bisection tolerance (bisect mode).
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// Samples per edge for the cover check.
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Fewest subchain/guard pairs at a fixed altitude.
    BatcCount {
        #[command(flatten)]
        batch: Batch,
        #[arg(long)]
        height: String,
    },
    /// Lowest altitude admitting k subchain/guard pairs.
    BatcAltitude {
        #[command(flatten)]
        batch: Batch,
        #[arg(long)]
        k: usize,
    },
    /// Deterministic random terrain as JSON.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "random")]
        profile: String,
        #[arg(long, default_value_t = 20)]
        amplitude: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extreme-viewer curves f and g as JSON, for `plot --curves`.
    Curves {
        #[arg(long)]
        terrain: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// SVG of a terrain with an optional solution and curve panel.
    Plot {
        #[arg(long)]
        terrain: PathBuf,
        /// A run report (or its solution object).
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long)]
        curves: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        query: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Sampled interval-stabbing guard count at a height.
    MinGuards {
        #[command(flatten)]
        batch: Batch,
        #[arg(long)]
        height: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Bisection on the sampled guard count.
    Atc {
        #[command(flatten)]
        batch: Batch,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Dynamic program over vertex partitions.
    Batc {
        #[command(flatten)]
        batch: Batch,
        #[arg(long)]
        k: usize,
    },
    /// Whether guards at a height see every sampled terrain point.
    Cover {
        #[command(flatten)]
        batch: Batch,
        #[arg(long)]
        height: String,
        /// Comma-separated guard abscissae.
        #[arg(long, value_delimiter = ',')]
        guards: Vec<String>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

fn grid(per_edge: usize) -> Result<SampleGrid, CliError> {
    if per_edge < 2 {
        return Err(CliError::Invalid("--grid needs at least 2 samples per edge".into()));
    }
    Ok(SampleGrid::new(per_edge))
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => commands::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Print one report (or an array for several terrains) and fold failures into one error.
fn finish(results: Vec<Result<RunReport, CliError>>) -> Result<(), CliError> {
    let mut reports = Vec::new();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(rep) => reports.push(rep),
            // the first error is reported by main, later ones here
            Err(e) if first_error.is_some() => eprintln!("error: {e}"),
            Err(e) => first_error = Some(e),
        }
    }
    if !reports.is_empty() {
        let json = if reports.len() == 1 && first_error.is_none() {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        };
        println!("{}", json.expect("reports serialize"));
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    let failed: Vec<String> = reports
        .iter()
        .filter_map(|r| {
            r.verification
                .as_ref()
                .filter(|v| !v.passed)
                .map(|v| format!("{}: {}", r.instance.path, v.detail))
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}

fn run(cli: Cli, echo: CommandEcho) -> Result<(), CliError> {
    let echo = &echo;
    match cli.command {
        Command::Atc {
            batch,
            k,
            mode,
            eps,
            grid: g,
        } => {
            let g = grid(g)?;
            finish(commands::run_batch(&batch.terrains, batch.jobs, |p| {
                commands::atc(echo, p, k, mode, eps, g)
            }))
        }
        Command::BatcCount { batch, height } => {
            let h = commands::parse_height(&height)?;
            finish(commands::run_batch(&batch.terrains, batch.jobs, |p| {
                commands::batc_count_cmd(echo, p, &h)
            }))
        }
        Command::BatcAltitude { batch, k } => finish(commands::run_batch(&batch.terrains, batch.jobs, |p| {
            commands::batc_altitude_cmd(echo, p, k)
        })),
        Command::Gen {
            n,
            seed,
            profile,
            amplitude,
            output,
        } => {
            let profile: Profile = profile.parse()?;
            emit(&commands::gen(n, seed, profile, amplitude)?, output.as_ref())
        }
        Command::Curves { terrain, output } => emit(&commands::curves(&terrain)?, output.as_ref()),
        Command::Plot {
            terrain,
            solution,
            curves,
            output,
        } => {
            let t = commands::load(&terrain)?;
            let overlay = solution
                .map(|p| commands::read(&p).and_then(|s| plot::parse_overlay(&s)))
                .transpose()?;
            let curves = curves
                .map(|p| commands::read(&p).and_then(|s| plot::parse_curves(&s)))
                .transpose()?;
            commands::write(&output, &plot::render(&t, overlay.as_ref(), curves.as_deref()))
        }
        Command::Oracle { query } => {
            let (batch, q, g) = match query {
                OracleCommand::MinGuards { batch, height, grid: g } => (
                    batch,
                    OracleQuery::MinGuards {
                        height: commands::parse_height(&height)?,
                    },
                    g,
                ),
                OracleCommand::Atc { batch, k, eps, grid: g } => (batch, OracleQuery::Atc { k, eps }, g),
                OracleCommand::Batc { batch, k } => (batch, OracleQuery::Batc { k }, 64),
                OracleCommand::Cover {
                    batch,
                    height,
                    guards,
                    grid: g,
                } => {
                    let height = commands::parse_height(&height)?;
                    let guards = guards
                        .iter()
                        .map(|s| commands::parse_height(s))
                        .collect::<Result<_, _>>()?;
                    (batch, OracleQuery::Cover { height, guards }, g)
                }
            };
            let g = grid(g)?;
            finish(commands::run_batch(&batch.terrains, batch.jobs, |p| {
                commands::oracle(echo, p, &q, g)
            }))
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let echo = CommandEcho {
        name: args.first().cloned().unwrap_or_default(),
        args,
    };
    match run(cli, echo) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
