//! `endolab` command-line front end.

/// Shorthand for building a `Report` parameter map.
macro_rules! params {
    ($($key:literal => $value:expr),* $(,)?) => {{
        let mut m = serde_json::Map::new();
        $( m.insert($key.to_string(), serde_json::json!($value)); )*
        m
    }};
}

mod commands;
mod report;
mod verify;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "endolab", version, about = "Exact endoscopy computations for special orthogonal groups")]
struct Cli {
    /// Add wall-clock timing to the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local and global invariants of a quadratic form.
    Quadspace(QuadspaceArgs),
    /// Elliptic endoscopic data of SO(d), or G-endoscopic data of a Levi.
    Endoscopy(EndoscopyArgs),
    /// Transfer-factor sign tables.
    Signs {
        #[command(subcommand)]
        command: SignsCommand,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("form").required(true).args(["diag", "gram"]))]
pub struct QuadspaceArgs {
    /// Comma-separated diagonal entries, e.g. `1,1,-1` or `1/2,3`.
    #[arg(long, allow_hyphen_values = true)]
    pub diag: Option<String>,
    /// Gram matrix as a JSON array of rows, entries numbers or "p/q" strings.
    #[arg(long)]
    pub gram: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Args, Debug)]
pub struct EndoscopyArgs {
    #[arg(long)]
    pub d: usize,
    /// Discriminant of G as a rational representative.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub delta: String,
    /// `real`, `qp:<p>` or `global:<p1>,<p2>,...`.
    #[arg(long, default_value = "real")]
    pub context: String,
    /// `G`, `M1`, `M2` or `M12`.
    #[arg(long, default_value = "G")]
    pub levi: String,
    /// List both members of each swap pair instead of one representative.
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
enum SignsCommand {
    /// The (case, A) table of det(omega_0), sun and tasho.
    Table {
        #[arg(long, default_value_t = 2)]
        m_min: u64,
        #[arg(long, default_value_t = 6)]
        m_max: u64,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Arch,
    Vanishing,
    Satake,
    Signs,
    Hilbert,
    Kostant,
    Waldspurger,
    Invariants,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Samples per configuration (arch, vanishing) or configurations (waldspurger).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Dimensions, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Residue degrees for the satake suite, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<u32>,
    /// Residue characteristic for the satake suite.
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// Ranks for the vanishing suite, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<usize>,
    /// Levi (arch: M1, M2, M12) or parity (vanishing: odd, even).
    #[arg(long)]
    pub case: Option<String>,
    /// Sample range for the arch suite: stated, vanishing or out-of-range.
    #[arg(long)]
    pub range: Option<String>,
    /// Highest weight, comma-separated integer coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Largest rank for the signs, kostant and waldspurger suites.
    #[arg(long)]
    pub m_max: Option<u64>,
    /// Coordinate bound for weights (kostant) or integers (hilbert).
    #[arg(long)]
    pub bound: Option<i64>,
    /// Random pairs for the hilbert suite.
    #[arg(long, default_value_t = 500)]
    pub pairs: usize,
}

fn configure_workers() -> Result<(), String> {
    let workers = match std::env::var("ENDOLAB_WORKERS") {
        Ok(v) => v.parse::<usize>().map_err(|_| format!("ENDOLAB_WORKERS must be a positive integer, got {v:?}"))?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let start = Instant::now();
    let (mut report, table) = match cli.command {
        Command::Quadspace(args) => (commands::quadspace(&args), None),
        Command::Endoscopy(args) => commands::endoscopy(&args),
        Command::Signs { command: SignsCommand::Table { m_min, m_max, format } } => commands::signs_table(m_min, m_max, format),
        Command::Verify(args) => (verify::run(&args), None),
    };
    report.set_timing(start, cli.timing);
    match table {
        Some(tsv) if report.status != report::Status::Error => print!("{tsv}"),
        _ => println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("reports serialize")),
    }
    if report.status == report::Status::Error {
        if let Some(msg) = report.result.get("error").and_then(|m| m.as_str()) {
            eprintln!("error: {msg}");
        }
    }
    ExitCode::from(report.status.exit_code() as u8)
}
