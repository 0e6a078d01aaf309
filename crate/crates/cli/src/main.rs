use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dynlis_cli::{commands, CliError};

#[derive(Parser, Debug)]
#[command(name = "dynlis", version, about = "Approximate longest increasing subsequence under updates")]
struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact LIS length of the integers in a file.
    Lis {
        input: PathBuf,
        /// Also print the positions of one longest subsequence.
        #[arg(long)]
        witness: bool,
    },
    /// Greedy k-cover, or (k1, k2)-cover when two numbers are given.
    Cover { input: PathBuf, k1: usize, k2: Option<usize> },
    /// Replay an update script, printing one line per query.
    Simulate {
        script: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Use the deletion-only structure; the script must not insert.
        #[arg(long)]
        decremental: bool,
    },
    /// Partition a sequence into few monotone subsequences.
    Espartition {
        input: PathBuf,
        #[arg(long)]
        tight: bool,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Random scripts checked against the brute-force reference.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of updates; each is followed by a query.
        #[arg(long, default_value_t = 1000)]
        ops: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 64)]
        preload: usize,
        #[arg(long, default_value_t = 256)]
        max_len: usize,
    },
    /// Time updates and queries on random permutations.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1024,4096")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Updates per configuration, alternating delete and insert.
        #[arg(long, default_value_t = 1000)]
        ops: usize,
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let out = match cli.cmd {
        Cmd::Lis { input, witness } => commands::lis(&input, witness, json),
        Cmd::Cover { input, k1, k2 } => commands::cover(&input, k1, k2, json),
        Cmd::Simulate { script, eps, decremental } => commands::simulate(&script, eps, decremental, json),
        Cmd::Espartition { input, tight, eps } => commands::espartition(&input, tight.then_some(eps), json),
        Cmd::Fuzz { seed, ops, eps, preload, max_len } => commands::fuzz(seed, ops, eps, preload, max_len, json),
        Cmd::Bench { n, eps, seed, ops, queries, csv } => commands::bench(&n, &eps, seed, ops, queries, csv, json),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Violation { repro, .. } = &e {
                print!("{repro}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
