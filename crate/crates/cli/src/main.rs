mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Schur multipliers, tensor and exterior squares, and capability of p-groups.
#[derive(Parser, Debug)]
#[command(name = "pgx", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Prime, or a comma-separated list of primes where a command accepts several.
    #[arg(long = "p", global = true, value_delimiter = ',')]
    pub primes: Vec<u32>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Leave out timestamps and timings so that output is reproducible.
    #[arg(long, global = true)]
    pub no_meta: bool,
    /// Per-group time limit in seconds.
    #[arg(long, global = true, default_value_t = 120.0)]
    pub timeout: f64,
}

impl Global {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Md,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report on one group: a catalog name, X or Y, SmallGroup(order,id), or a .pc file.
    Info {
        group: String,
    },
    /// Regenerate a results table.
    Table {
        /// p3, p4 or p5 for the catalog groups, 32 or 243 for the fixtures.
        #[arg(long)]
        order: String,
        /// Capability and epicenter columns instead of the invariants.
        #[arg(long)]
        capability: bool,
    },
    /// Compare computed values with the expected tables.
    Verify {
        /// Comma-separated scopes: theorem-p3p4, table1, table2, table3, table4. Default: all.
        #[arg(long, value_delimiter = ',')]
        scope: Vec<String>,
        /// Also compare the two multiplier engines on the Phi4 and Phi5 groups.
        #[arg(long)]
        be_cross: bool,
    },
    /// List catalog members, or print one presentation.
    Catalog {
        name: Option<String>,
        /// p3, p4, p5, 32 or 243.
        #[arg(long)]
        order: Option<String>,
    },
    /// Multiplier by the linear-algebra construction, next to the nu(G) result.
    BeCheck {
        /// Groups to check; default: every Phi4 and Phi5 group.
        groups: Vec<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pgx: {e}");
            ExitCode::from(2)
        }
    }
}
