mod commands;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gfmi::Group;

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(
    name = "gfmi",
    version,
    about = "Moment invariants built from generating functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Relative tolerance for numerical checks (defaults depend on the check).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

fn parse_group(s: &str) -> Result<Group, String> {
    s.parse().map_err(|e: gfmi::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Raw and central moments of a point-set or PGM file.
    Moments {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
    },
    /// Normalized values of a named descriptor set: hu, pi, affine19 or 3d.
    Invariants {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        set: String,
        #[arg(long, value_parser = parse_group)]
        group: Option<Group>,
    },
    /// Catalog translations, algebraic relations and invariance campaigns.
    Verify {
        #[arg(long)]
        relations: bool,
        #[arg(long)]
        catalog: bool,
        /// Evaluate catalog entries before and after random group transformations.
        #[arg(long)]
        invariance: bool,
        /// Restrict catalog and invariance checks to one group.
        #[arg(long, value_parser = parse_group)]
        group: Option<Group>,
        /// Shape for the invariance campaign (default: a seeded random point set).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        transforms: usize,
    },
    /// Jacobian rank of a descriptor set or a comma-separated list of names.
    Independence {
        #[arg(long)]
        set: String,
        #[arg(long, value_parser = parse_group)]
        group: Option<Group>,
        /// Highest moment order of the variable space (default: highest order in the set).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = gfmi::independence::DEFAULT_TRIALS)]
        trials: usize,
        /// Exit with status 1 unless the whole set is independent.
        #[arg(long)]
        require_independent: bool,
    },
    /// Enumerate cores, translate, prune, and select an independent set.
    Discover {
        #[arg(long, value_parser = parse_group)]
        group: Group,
        /// Highest occurrence of one point (invariant order).
        #[arg(long)]
        order: usize,
        /// Number of distinct points (invariant degree).
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        max_factors: Option<usize>,
        /// Number of invariants wanted (default: number of free moments).
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, default_value_t = gfmi::discovery::DEFAULT_BUDGET)]
        budget: u64,
        /// Keep cores with an odd number of g factors.
        #[arg(long)]
        allow_skew: bool,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<gfmi::Error>() {
        Some(gfmi::Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> anyhow::Result<()> {
    let text = match cli.format {
        Format::Json => json::to_string(&outcome.value)?,
        Format::Table => outcome.table.clone(),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli).and_then(|outcome| emit(&cli, &outcome).map(|_| outcome));
    match result {
        Ok(outcome) if outcome.pass => ExitCode::SUCCESS,
        Ok(outcome) => {
            eprintln!("check failed: {}", outcome.summary);
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
