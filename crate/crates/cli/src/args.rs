use clap::{Args, Parser, Subcommand, ValueEnum};
use nicetop::order::{HARD_POSET_CAP, MAX_FAMILY_GROUND, MAX_FAMILY_MEMBERS};
use nicetop::spectra::LAZY_DEPTH_CAP;
use nicetop::{Cut, Rational};
use serde::Serialize;

pub const MAX_CHAIN_DEPTH: usize = 64;
pub const MAX_CHAIN_N: usize = 8;
pub const MAX_FIXTURE_PRIMES: usize = 6;
pub const MAX_GRID_Q: i64 = 256;
pub const MAX_GRID_B: i64 = 64;
pub const MAX_PER_FAMILY: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "nicetop", version, about = "Finite and symbolic checks on spaces of nice subalgebras")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    /// Worker threads; NICETOP_THREADS takes precedence.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep finite posets and families through every ladder check.
    Verify(VerifyArgs),
    /// Build one of the symbolic example families and certify it.
    Example(ExampleArgs),
    /// Search for reversals of the open-set implications.
    Search {
        #[command(subcommand)]
        what: SearchCommand,
    },
    /// Prime covers and lying over.
    Spectra {
        #[command(subcommand)]
        what: SpectraCommand,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Largest poset size to enumerate.
    #[arg(long, default_value_t = 5)]
    pub max_n: usize,
    /// Also sweep intersection-closed families.
    #[arg(long)]
    pub families: bool,
    /// Largest ground set for the family sweep.
    #[arg(long, default_value_t = 3)]
    pub ground: usize,
    /// Largest member count for the family sweep.
    #[arg(long, default_value_t = 5)]
    pub max_members: usize,
    /// Denominator of the cut oracle grid.
    #[arg(long, default_value_t = 64)]
    pub grid_q: i64,
    /// Half-width of the cut oracle grid.
    #[arg(long, default_value_t = 16)]
    pub grid_b: i64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    /// Descending corner family: (e) holds, (d) fails.
    #[value(name = "2.7")]
    #[serde(rename = "2.7")]
    Descending,
    /// Pinned corner family: (f) holds, (e) fails.
    #[value(name = "2.7p", alias = "2.7'")]
    #[serde(rename = "2.7p")]
    Pinned,
    /// Ascending column chain: closed, irreducible, no generic point.
    #[value(name = "2.13")]
    #[serde(rename = "2.13")]
    Column,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    #[arg(value_enum)]
    pub which: Which,
    /// Right end of the parameter interval, a positive rational.
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub r0: String,
    /// Lower-left cut: `>=g`, `>g`, or a bare `g` for the closed cut.
    #[arg(long, allow_hyphen_values = true)]
    pub j1: Option<String>,
    /// Lower-left cut of the pinned generator.
    #[arg(long, allow_hyphen_values = true, default_value = "2")]
    pub j2: String,
    /// Matrix size of the column chain.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of chain members to check.
    #[arg(long, default_value_t = 50)]
    pub depth: usize,
}

#[derive(Subcommand, Debug)]
pub enum SearchCommand {
    /// Emit the three reversal certificates and the finite-collapse facts.
    Reversals {
        #[arg(long, default_value_t = 4)]
        ground: usize,
        #[arg(long, default_value_t = 6)]
        max_members: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Intersection,
    Greedy,
}

#[derive(Subcommand, Debug)]
pub enum SpectraCommand {
    /// Seeded finite fixtures: refinement runs and closed-set lying over.
    Demo {
        /// Largest number of primes per fixture.
        #[arg(long, default_value_t = 4)]
        primes: usize,
        #[arg(long, default_value_t = 3)]
        ground: usize,
        #[arg(long, default_value_t = 8)]
        max_members: usize,
        /// Witness assignments per family.
        #[arg(long, default_value_t = 3)]
        per_family: usize,
        #[arg(long, default_value_t = 9)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OracleKind::Intersection)]
        oracle: OracleKind,
    },
    /// The infinite descending chain over the prime numbers.
    Lazy {
        #[arg(long, default_value_t = 100)]
        depth: usize,
        /// Member `k` covers the first `stride·k` primes.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
}

/// Bad input; maps to exit code 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn cap(what: &str, value: usize, lo: usize, hi: usize) -> Result<(), ConfigError> {
    if value > hi {
        return Err(ConfigError(format!("cap exceeded: {what} = {value} > {hi}")));
    }
    if value < lo {
        return Err(ConfigError(format!("{what} = {value} must be at least {lo}")));
    }
    Ok(())
}

pub fn parse_rational(what: &str, s: &str) -> Result<Rational, ConfigError> {
    s.trim().parse::<Rational>().map_err(|_| ConfigError(format!("{what}: cannot parse {s:?} as a rational")))
}

pub fn parse_cut(what: &str, s: &str) -> Result<Cut, ConfigError> {
    s.parse::<Cut>().map_err(|_| ConfigError(format!("{what}: cannot parse {s:?} as a cut (use >=g, >g, g or zero)")))
}

impl VerifyArgs {
    pub fn validate(&self) -> Result<(), ConfigError> {
        cap("max-n", self.max_n, 1, HARD_POSET_CAP)?;
        if self.families {
            cap("ground", self.ground, 0, MAX_FAMILY_GROUND)?;
            cap("max-members", self.max_members, 1, MAX_FAMILY_MEMBERS)?;
        }
        cap("grid-q", self.grid_q.max(0) as usize, 1, MAX_GRID_Q as usize)?;
        cap("grid-b", self.grid_b.max(0) as usize, 2, MAX_GRID_B as usize)?;
        Ok(())
    }
}

impl SpectraCommand {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            SpectraCommand::Demo { primes, ground, max_members, per_family, .. } => {
                cap("primes", *primes, 1, MAX_FIXTURE_PRIMES)?;
                cap("ground", *ground, 0, MAX_FAMILY_GROUND)?;
                cap("max-members", *max_members, 1, MAX_FAMILY_MEMBERS)?;
                cap("per-family", *per_family, 1, MAX_PER_FAMILY)
            }
            SpectraCommand::Lazy { depth, stride } => {
                cap("depth", *depth, 1, LAZY_DEPTH_CAP)?;
                cap("stride", *stride, 1, 64)
            }
        }
    }
}
