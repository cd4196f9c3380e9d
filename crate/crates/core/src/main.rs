use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_frac::cesaro::build_basis;
use bergman_frac::cli::{self, Experiment, RunConfig};
use bergman_frac::{norms, RadialWeight, TaylorSeries};
use bergman_frac::verify::run_experiment;
use clap::{Parser, Subcommand};

/// Radial-weight experiments: classification, fractional-derivative norm
/// equivalences, integral means, lacunary sums and block norms.
///
/// Exit status: 0 when every asserted verdict passes, 1 when one fails,
/// 2 on a configuration or numerical error.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Option<Command>,

    /// `key = value` experiment definition.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Report path; `.json` selects JSON, anything else CSV.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Extra `key=value` setting applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Print the experiment ids and exit.
    #[arg(long)]
    list_experiments: bool,
}

#[derive(Subcommand, Clone)]
enum Command {
    Classify,
    LpSweep,
    MonomialCurve,
    MeansCheck,
    SumaCheck,
    NormEquiv,
    /// Cesàro basis utilities.
    #[command(subcommand)]
    Cesaro(CesaroCommand),
    /// One norm of one series.
    Norm {
        /// CSV file of `n,re,im` lines, or a named series such as `geometric:0.9,1`.
        #[arg(long = "f")]
        f: String,
        /// Weight spec (`standard:1`, `log:2`, `exp:1,1`); required for bergman and block.
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = NormKind::Hardy)]
        kind: NormKind,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
}

#[derive(Subcommand, Clone)]
enum CesaroCommand {
    /// Prints `n,j,coefficient` for every basis coefficient.
    Dump {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "N", default_value_t = 64)]
        n: usize,
    },
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum NormKind {
    Bergman,
    Hardy,
    Block,
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::Classify => Experiment::Classify,
            Command::LpSweep => Experiment::LpSweep,
            Command::MonomialCurve => Experiment::MonomialCurve,
            Command::MeansCheck => Experiment::MeansCheck,
            Command::SumaCheck => Experiment::SumaCheck,
            Command::NormEquiv => Experiment::NormEquiv,
            Command::Cesaro(_) | Command::Norm { .. } => return None,
        })
    }
}

fn build_config(args: &Args) -> bergman_frac::Result<RunConfig> {
    let mut text = match &args.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    if let Some(e) = args.command.as_ref().and_then(Command::experiment) {
        if args.config.is_some() {
            let from_file = cli::parse_config(&text)?.experiment;
            if from_file != e {
                return Err(bergman_frac::Error::Config {
                    location: bergman_frac::error::Location { line: None, field: Some("experiment".into()) },
                    message: format!("config names `{from_file}` but the subcommand is `{e}`"),
                });
            }
        } else {
            text = format!("experiment = {e}\n");
        }
    }
    for kv in &args.set {
        text.push_str(kv);
        text.push('\n');
    }
    if let Some(out) = &args.out {
        text.push_str(&format!("out = {}\n", out.display()));
    }
    cli::parse_config(&text)
}

fn read_series(spec: &str) -> bergman_frac::Result<TaylorSeries> {
    let path = Path::new(spec);
    if path.is_file() {
        TaylorSeries::from_csv(&std::fs::read_to_string(path)?)
    } else {
        spec.parse()
    }
}

fn run_tool(cmd: &Command) -> bergman_frac::Result<()> {
    match cmd {
        Command::Cesaro(CesaroCommand::Dump { k, n }) => {
            print!("{}", build_basis(*k, *n)?.to_csv());
        }
        Command::Norm { f, weight, p, kind, k } => {
            let f = read_series(f)?;
            let weight = || -> bergman_frac::Result<RadialWeight> {
                weight
                    .as_deref()
                    .ok_or_else(|| bergman_frac::Error::Domain("--weight is required for this norm".into()))?
                    .parse()
            };
            let v = match kind {
                NormKind::Hardy => norms::hardy_norm(&f, *p)?,
                NormKind::Bergman => norms::bergman_norm(&f, &weight()?, *p)?,
                NormKind::Block => norms::block_norm(&f, &weight()?, *k, *p)?,
            };
            println!("{v}");
        }
        _ => unreachable!("experiments are dispatched through run_experiment"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_experiments {
        for e in Experiment::ALL {
            println!("{:<16}{}", e.id(), e.about());
        }
        return ExitCode::SUCCESS;
    }
    if let Some(cmd) = args.command.as_ref().filter(|c| c.experiment().is_none()) {
        return match run_tool(cmd) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    if args.command.is_none() && args.config.is_none() {
        eprintln!("error: name an experiment subcommand or pass --config (see --help)");
        return ExitCode::from(2);
    }
    let outcome = build_config(&args).and_then(|cfg| {
        let report = run_experiment(&cfg)?;
        if let Some(path) = &cfg.out {
            cli::emit(&report, path, &cfg)?;
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            for s in &report.summary {
                eprintln!("{}: min {:.6e}, max {:.6e}, max/min {:.6}", s.column, s.min, s.max, s.spread);
            }
            for n in &report.notes {
                eprintln!("note: {n}");
            }
            println!("{}", report.verdict_line());
            if report.verdict.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
