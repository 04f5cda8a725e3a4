mod commands;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kanalg::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "kanalg", version, about = "Left Kan extensions and free algebras on finite categories")]
struct Cli {
    /// Also print a human-readable table on stderr.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a manifest against its schema and laws.
    Validate { file: PathBuf },
    /// Connected components of the category of elements of a set functor.
    Colim {
        #[arg(long)]
        functor: PathBuf,
    },
    /// Pointwise left Kan extension of X along F.
    Lan {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        x: PathBuf,
        /// Restrict the report to one object of the target.
        #[arg(long)]
        at: Option<String>,
    },
    /// Free algebra on `gens` generators over a truncated theory.
    Free(TheoryArgs),
    /// Decide one property.
    #[command(subcommand)]
    Check(Check),
    /// Compare a free algebra with its closed-form description.
    OracleCompare(TheoryArgs),
    /// Compare free algebras at ranks N and N+1.
    Stability(TheoryArgs),
    /// Print a bundled adjunction instance as a manifest.
    Instance {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(clap::Args)]
struct TheoryArgs {
    /// A built-in theory name, or a clone manifest.
    #[arg(long)]
    theory: String,
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    gens: usize,
}

#[derive(Subcommand)]
enum Check {
    /// Whether a functor is final; with --instance, the functor W of the instance.
    Final {
        #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
        functor: Option<PathBuf>,
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Weak cofilteredness of a category, or of d/G with --functor and --at.
    Cofiltered {
        #[arg(long, conflicts_with = "functor", required_unless_present = "functor")]
        category: Option<PathBuf>,
        #[arg(long, requires = "at")]
        functor: Option<PathBuf>,
        #[arg(long)]
        at: Option<String>,
    },
    /// The weak pullback condition for a functor.
    Wpc {
        #[arg(long)]
        functor: PathBuf,
    },
    /// Product preservation of X, or of Lan_F X when --f is given.
    Products {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// The adjunction L -| W of an instance, and finality of W.
    Adjunction {
        #[arg(long)]
        instance: PathBuf,
    },
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("KANALG_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("KANALG_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| commands::run(cli.command));
    match outcome {
        Ok(report) => {
            print!("{}", report.render());
            if cli.pretty {
                eprint!("{}", report.table());
            }
            ExitCode::from(report.exit)
        }
        Err(e) => {
            let code = match e {
                Error::ArityOverflow { .. } => 3,
                _ => 2,
            };
            println!("{}", serde_json::to_string_pretty(&json!({ "error": e.to_string() })).expect("serializes"));
            eprintln!("kanalg: {e}");
            ExitCode::from(code)
        }
    }
}
