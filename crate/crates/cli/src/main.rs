//! `sog`: structural observability analysis from the command line.
//!
//! Exit status: 0 for success or a positive verdict, 1 for a negative
//! verdict, 2 for usage, input and I/O errors.

mod commands;
mod report;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::{CliError, Input, InputDigest, Outcome, Report};

#[derive(Parser)]
#[command(name = "sog", version, about = "Structural observability of marked digraphs and Boolean networks")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write a Graphviz rendering of the relevant graph to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test P1 and P2 and decompose into observed paths.
    Check { graph: PathBuf },
    /// Fewest extra sensors that make the graph an SOG.
    MarkMin { graph: PathBuf },
    /// Fewest vertices whose in-neighbors must be replaced to get an SOG.
    ControlMin { graph: PathBuf },
    /// Sensors whose failure destroys structural observability.
    CriticalSensors { graph: PathBuf },
    /// Boolean network commands.
    #[command(subcommand)]
    Bn(BnCommand),
    /// Linear networks over a prime field.
    #[command(subcommand)]
    Ffn(FfnCommand),
    /// Erdős–Rényi experiment on minimum marking and control.
    RandExp(RandExpArgs),
    /// Print a graph in Graphviz format.
    ExportDot {
        graph: PathBuf,
        /// Color the vertices that fail P1.
        #[arg(long)]
        p1: bool,
    },
}

#[derive(Subcommand)]
enum BnCommand {
    /// Dependency graph of the network.
    Deps { bn: PathBuf },
    /// Exhaustive observability test (at most 24 nodes).
    Obs { bn: PathBuf },
    /// Whether the dependency graph is an SOG.
    StructuralCheck { bn: PathBuf },
    /// Design pinning controllers from a minimum control plan.
    Pin(PinArgs),
    /// Recover the initial state of the pinned network from an output log.
    Estimate {
        bn: PathBuf,
        /// CSV with a `y` column of output bit strings, one row per step.
        #[arg(long)]
        outputs: PathBuf,
        #[command(flatten)]
        pin: PolarityArgs,
    },
    /// Simulate the network and print the trajectory as CSV.
    Simulate {
        bn: PathBuf,
        /// Initial state as a bit string, x1 first.
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Simulate the pinned network instead.
        #[arg(long)]
        pinned: bool,
        #[command(flatten)]
        pin: PolarityArgs,
    },
}

#[derive(Args)]
struct PinArgs {
    bn: PathBuf,
    #[command(flatten)]
    pin: PolarityArgs,
}

#[derive(Args, Clone)]
struct PolarityArgs {
    /// Pinned nodes that copy the negation of their new input.
    #[arg(long, value_delimiter = ',', value_name = "NODES")]
    negate: Vec<usize>,
}

#[derive(Subcommand)]
enum FfnCommand {
    /// Choose weights on a subgraph so the network is observable.
    Design {
        graph: PathBuf,
        #[arg(long)]
        prime: u64,
    },
    /// Rank test of a weighted network file, plus the structural test of its graph.
    Check { ffn: PathBuf },
}

#[derive(Args)]
struct RandExpArgs {
    #[arg(short = 'n', long)]
    n: usize,
    #[arg(short = 'p', long)]
    p: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Random sensors to place before measuring the control cost.
    #[arg(long, default_value_t = 0)]
    sensors: usize,
}

fn run(cli: &Cli, inputs: &mut Vec<Input>) -> Result<Outcome, CliError> {
    let mut load = |path: &PathBuf| -> Result<usize, CliError> {
        inputs.push(Input::read(path)?);
        Ok(inputs.len() - 1)
    };
    match &cli.command {
        Command::Check { graph } => {
            let i = load(graph)?;
            commands::check(&inputs[i])
        }
        Command::MarkMin { graph } => {
            let i = load(graph)?;
            commands::mark_min(&inputs[i])
        }
        Command::ControlMin { graph } => {
            let i = load(graph)?;
            commands::control_min(&inputs[i])
        }
        Command::CriticalSensors { graph } => {
            let i = load(graph)?;
            commands::critical(&inputs[i])
        }
        Command::ExportDot { graph, p1 } => {
            let i = load(graph)?;
            commands::export_dot(&inputs[i], *p1)
        }
        Command::Bn(bn) => match bn {
            BnCommand::Deps { bn } => {
                let i = load(bn)?;
                commands::bn_deps(&inputs[i])
            }
            BnCommand::Obs { bn } => {
                let i = load(bn)?;
                commands::bn_obs(&inputs[i])
            }
            BnCommand::StructuralCheck { bn } => {
                let i = load(bn)?;
                commands::bn_structural(&inputs[i])
            }
            BnCommand::Pin(args) => {
                let i = load(&args.bn)?;
                commands::bn_pin(&inputs[i], &args.pin.negate)
            }
            BnCommand::Estimate { bn, outputs, pin } => {
                let i = load(bn)?;
                let j = load(outputs)?;
                commands::bn_estimate(&inputs[i], &inputs[j], &pin.negate)
            }
            BnCommand::Simulate {
                bn,
                init,
                steps,
                pinned,
                pin,
            } => {
                let i = load(bn)?;
                commands::bn_simulate(&inputs[i], init, *steps, pinned.then_some(&pin.negate[..]))
            }
        },
        Command::Ffn(FfnCommand::Design { graph, prime }) => {
            let i = load(graph)?;
            commands::ffn_design(&inputs[i], *prime)
        }
        Command::Ffn(FfnCommand::Check { ffn }) => {
            let i = load(ffn)?;
            commands::ffn_check(&inputs[i])
        }
        Command::RandExp(a) => commands::rand_exp(a.n, a.p, a.trials, a.seed, a.sensors),
    }
}

/// Write to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let mut inputs = Vec::new();
    let outcome = match run(&cli, &mut inputs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    if let (Some(path), Some(dot)) = (&cli.dot, &outcome.dot) {
        if let Err(e) = std::fs::write(path, dot) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        let report = Report {
            command: &argv[1..],
            inputs: inputs
                .iter()
                .map(|i| InputDigest {
                    path: i.path.display().to_string(),
                    sha256: i.digest.clone(),
                })
                .collect(),
            verdict: outcome.verdict,
            result: &outcome.result,
            timings_ms: cli.timings.then_some(elapsed_ms),
        };
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        emit(&format!("{json}\n"));
    } else {
        emit(&outcome.text);
        if cli.timings {
            emit(&format!("time: {elapsed_ms:.3} ms\n"));
        }
    }
    ExitCode::from(if outcome.verdict { 0 } else { 1 })
}
