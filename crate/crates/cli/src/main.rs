//! `distinguo`: compare structures by formula realization counts.
//!
//! Exit status 0 means success or equivalent, 1 a negative verdict, 2 an
//! input error (or, for `borel-check`, routes that disagree).

mod commands;
mod doc;
mod report;

use clap::{ArgGroup, Parser, Subcommand};
use commands::{ClassifyBy, CliResult, FamilySource};
use report::Report;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "distinguo",
    version,
    about = "Counting-quantifier equivalence of relational structures"
)]
struct Cli {
    /// Print a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Evaluate pairs on all cores (classify, vaught-demo).
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of tuples realizing a formula.
    Count {
        structure: PathBuf,
        formula: String,
        /// Print the realization set even when it is large.
        #[arg(long)]
        show: bool,
    },
    /// Find a formula of A with different counts in two structures.
    Distinguish {
        left: PathBuf,
        right: PathBuf,
        /// One formula per line.
        formulas: Option<PathBuf>,
        /// Without a formula file, use all formulas of quantifier rank at most N.
        #[arg(long, value_name = "N")]
        max_fragment: Option<u64>,
        /// Also play the EF game with q rounds.
        #[arg(long, value_name = "q")]
        ef_rank: Option<u32>,
    },
    /// Partition a directory of structures.
    #[command(group(ArgGroup::new("relation").required(true).args(["ea", "iso", "ef_rank", "max_fragment"])))]
    Classify {
        dir: PathBuf,
        /// E_A with A read from a formula file.
        #[arg(long, value_name = "A_FILE")]
        ea: Option<PathBuf>,
        /// E_A with A the fragment of rank at most N.
        #[arg(long, value_name = "N")]
        max_fragment: Option<u64>,
        #[arg(long)]
        iso: bool,
        /// EF equivalence with q rounds.
        #[arg(long, visible_alias = "ef", value_name = "q")]
        ef_rank: Option<u32>,
    },
    /// Decide E_A through its set-theoretic description and cross-check it.
    BorelCheck {
        left: PathBuf,
        right: PathBuf,
        formulas: Option<PathBuf>,
        #[arg(long, value_name = "N")]
        max_fragment: Option<u64>,
        /// Truncation of the counting conjunction; defaults to the lossless bound.
        #[arg(long, value_name = "k")]
        nmax: Option<u64>,
    },
    /// Check iso and E_{R, ~R} agree on all small periodic unary structures.
    VaughtDemo {
        #[arg(long, default_value_t = 6)]
        prefix: usize,
        #[arg(long, default_value_t = 4)]
        cycle: usize,
    },
}

fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Count {
            structure,
            formula,
            show,
        } => commands::count(structure, formula, *show),
        Command::Distinguish {
            left,
            right,
            formulas,
            max_fragment,
            ef_rank,
        } => {
            let family = FamilySource {
                file: formulas.as_deref(),
                max_fragment: *max_fragment,
            };
            commands::distinguish(left, right, &family, *ef_rank)
        }
        Command::Classify {
            dir,
            ea,
            max_fragment,
            iso,
            ef_rank,
        } => {
            let by = match (ea, max_fragment, iso, ef_rank) {
                (_, _, true, _) => ClassifyBy::Iso,
                (_, _, _, Some(q)) => ClassifyBy::Ef(*q),
                (file, rank, ..) => ClassifyBy::Family(FamilySource {
                    file: file.as_deref(),
                    max_fragment: *rank,
                }),
            };
            commands::classify(dir, by, cli.parallel)
        }
        Command::BorelCheck {
            left,
            right,
            formulas,
            max_fragment,
            nmax,
        } => {
            let family = FamilySource {
                file: formulas.as_deref(),
                max_fragment: *max_fragment,
            };
            commands::borel_check(left, right, &family, *nmax)
        }
        Command::VaughtDemo { prefix, cycle } => commands::vaught_demo(*prefix, *cycle, cli.parallel),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.json, &args, start.elapsed()));
            ExitCode::from(report.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(2)
        }
    }
}
