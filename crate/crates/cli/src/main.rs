use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matderiv::textio::to_text;
use matderiv::StemFunction;
use matderiv_cli::custom::{parse_multi_index, parse_term, read_matrix, run_custom, CustomRequest, Route};
use matderiv_cli::experiments::{run_density_demo, run_fig1, run_fig2};
use matderiv_cli::{write_csv, CliError, CliResult, ConvergenceRecord, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "matderiv",
    version,
    about = "Derivatives of matrix functions: convergence experiments and route comparisons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// RNG seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Matrix dimension
    #[arg(long)]
    n: Option<usize>,
    /// Largest step in the grid
    #[arg(long)]
    h_max: Option<f64>,
    /// Smallest step in the grid
    #[arg(long)]
    h_min: Option<f64>,
    /// Number of log-spaced steps
    #[arg(long)]
    points: Option<usize>,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write zero runtimes so output depends only on the inputs
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// First derivative of cos at A = E = 1
    Fig1Real(Common),
    /// First derivative of cos at random complex scalars
    Fig1Complex(Common),
    /// Mixed second partial of cos along a random complex 3×3 jet
    Fig2(Common),
    /// Density-matrix and eigenvector response checks
    DensityDemo {
        #[command(flatten)]
        common: Common,
        /// Chemical potential (mid-gap if omitted)
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
    },
    /// Evaluate a partial derivative on user-supplied matrices
    Custom(CustomArgs),
}

#[derive(Args)]
struct CustomArgs {
    /// exp, cos, sin, identity or x^p
    #[arg(long)]
    function: String,
    /// One or more of blocktri, frechet_sum, dk, cs, hybrid, fd
    #[arg(long, value_delimiter = ',', required = true)]
    route: Vec<String>,
    /// Multi-index such as 1,1
    #[arg(long)]
    alpha: String,
    /// File holding A at the expansion point
    #[arg(long)]
    base: PathBuf,
    /// Jet term as multi-index=file, e.g. 1,0=ax.txt
    #[arg(long)]
    term: Vec<String>,
    /// Step for cs, hybrid and fd
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
    /// Matrix output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Route comparison CSV (stdout if omitted and several routes are given)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write zero runtimes
    #[arg(long)]
    deterministic: bool,
}

fn config(experiment: Experiment, c: &Common) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(experiment);
    cfg.seed = c.seed;
    if let Some(n) = c.n {
        cfg.n = n;
    }
    if let Some(h) = c.h_max {
        cfg.grid.h_max = h;
    }
    if let Some(h) = c.h_min {
        cfg.grid.h_min = h;
    }
    if let Some(p) = c.points {
        cfg.grid.points = p;
    }
    cfg.output = c.out.clone();
    cfg.deterministic = c.deterministic;
    cfg
}

fn sink(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(records: &[ConvergenceRecord], path: Option<&PathBuf>) -> CliResult<()> {
    write_csv(records, sink(path)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Fig1Real(c) | Command::Fig1Complex(c) if c.n.is_some_and(|n| n != 1) => {
            Err(CliError::Config("first-order experiments use scalar input; --n must be 1".into()))
        }
        Command::Fig1Real(c) => emit(&run_fig1(&config(Experiment::Fig1Real, &c))?.records, c.out.as_ref()),
        Command::Fig1Complex(c) => {
            let outcome = run_fig1(&config(Experiment::Fig1Complex, &c))?;
            for m in &outcome.flagged {
                eprintln!("flagged: {m} cannot represent complex derivatives; its errors are expected to be O(1)");
            }
            emit(&outcome.records, c.out.as_ref())
        }
        Command::Fig2(c) => {
            let outcome = run_fig2(&config(Experiment::Fig2Partial, &c))?;
            eprintln!("reference check: relative discrepancy {:.3e}", outcome.reference_discrepancy);
            emit(&outcome.records, c.out.as_ref())
        }
        Command::DensityDemo { common, mu } => {
            let report = run_density_demo(&config(Experiment::DensityDemo, &common), mu)?;
            eprint!("{}", report.table());
            emit(&report.to_records(), common.out.as_ref())?;
            match report.worst() {
                Some(c) => Err(CliError::ReferenceValidation {
                    check: c.name.into(),
                    discrepancy: c.value,
                    limit: c.threshold,
                }),
                None => Ok(()),
            }
        }
        Command::Custom(a) => {
            let function = StemFunction::parse(&a.function).map_err(|e| CliError::Config(e.to_string()))?;
            let routes = a.route.iter().map(|r| Route::parse(r)).collect::<CliResult<Vec<_>>>()?;
            let terms = a
                .term
                .iter()
                .map(|t| {
                    let (beta, path) = parse_term(t)?;
                    Ok((beta, read_matrix(&path)?))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let req = CustomRequest {
                function,
                routes,
                alpha: parse_multi_index(&a.alpha)?,
                base: read_matrix(&a.base)?,
                terms,
                h: a.h,
                deterministic: a.deterministic,
            };
            let outcome = run_custom(&req)?;
            sink(a.out.as_ref())?.write_all(to_text(&outcome.result).as_bytes())?;
            if a.csv.is_some() || req.routes.len() > 1 {
                emit(&outcome.comparison, a.csv.as_ref())?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).format_timestamp(None).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
