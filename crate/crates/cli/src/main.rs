mod commands;
mod error;
mod output;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vhshift_core::spectral::{DEFAULT_DENSE_LIMIT, DEFAULT_EXACT_LIMIT, DEFAULT_TOL};

use crate::error::CliError;

/// Quaternionic VH-data, their automata, Ramanujan level graphs and the
/// regular subshifts built from them.
#[derive(Parser, Debug)]
#[command(name = "vhshift", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, validate and certify a quaternionic datum; write it as JSON.
    Datum(DatumCmd),
    /// Export the Mealy automaton of a datum (or its dual).
    Automaton(AutomatonCmd),
    /// Export a level graph A_n or B_n.
    Graph(GraphCmd),
    /// Export a product level graph for a parameter set S0.
    ProductGraph(ProductGraphCmd),
    /// Check connectivity, degree, non-bipartiteness and the Ramanujan bound per level.
    VerifyRamanujan(VerifyCmd),
    /// Compare the non-backtracking spectrum with its transfer from the graph spectrum.
    BassIhara(BassIharaCmd),
    /// Regularity and unique-extendability report for a matrix subshift.
    SubshiftCheck(SubshiftCmd),
    /// Exact mixing table of a transition graph against the C·n·θ^n envelope.
    Mixing(MixingCmd),
    /// Render the Wang tiles of a datum as SVG.
    Tiles(TilesCmd),
}

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Output file (written atomically); standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the timestamp out of the provenance header.
    #[arg(long)]
    no_timestamp: bool,
    /// Deterministic mode. Every computation is deterministic, so this is
    /// accepted for compatibility and changes nothing.
    #[arg(long)]
    seedless: bool,
}

/// Where the datum comes from: field parameters, or a datum file.
#[derive(Args, Debug, Clone, Serialize)]
struct DatumSource {
    /// Characteristic (odd prime).
    #[arg(long, default_value_t = 3)]
    p: u32,
    /// Extension degree, q = p^e.
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Code of tau in F_q (for e = 1 the integer itself).
    #[arg(long, default_value_t = 1)]
    tau: u32,
    /// Code of sigma in F_q.
    #[arg(long, default_value_t = 2)]
    sigma: u32,
    /// Read the datum from this file instead.
    #[arg(long, conflicts_with_all = ["p", "e", "tau", "sigma"])]
    datum: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct DatumCmd {
    #[command(flatten)]
    src: DatumSource,
    /// Validation report path (JSON); a summary goes to standard error regardless.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GraphFormat {
    Dot,
    Json,
    /// Eigenvalues with trivial/nontrivial classification.
    SpectrumCsv,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TextFormat {
    Dot,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct AutomatonCmd {
    #[command(flatten)]
    src: DatumSource,
    /// Export the dual automaton (states H, alphabet V).
    #[arg(long)]
    dual: bool,
    #[arg(long, value_enum, default_value_t = TextFormat::Dot)]
    format: TextFormat,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum Side {
    A,
    B,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Sides {
    A,
    B,
    Both,
}

#[derive(Args, Debug, Serialize)]
struct GraphCmd {
    #[command(flatten)]
    src: DatumSource,
    #[arg(long)]
    level: usize,
    #[arg(long, value_enum, ignore_case = true, default_value_t = Side::A)]
    side: Side,
    #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
    format: GraphFormat,
    /// Largest dimension for a dense eigensolve (spectrum-csv only).
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct ProductGraphCmd {
    #[arg(long, default_value_t = 5)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    e: u32,
    #[arg(long, default_value_t = 1)]
    tau: u32,
    /// Parameter set S0 as comma-separated codes; must contain tau.
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    s0: Vec<u32>,
    /// One level per element of S0 other than tau, in S0 order.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 1])]
    levels: Vec<usize>,
    #[arg(long, value_enum, default_value_t = TextFormat::Dot)]
    format: TextFormat,
    /// Also run the Ramanujan check (JSON only); exits 1 if it fails.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    #[command(flatten)]
    common: Common,
}

fn parse_levels(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad level `{t}`: {e}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!(
            "level range `{s}` must be N or LO..HI with 1 ≤ LO ≤ HI"
        ));
    }
    Ok(lo..=hi)
}

#[derive(Args, Debug, Serialize)]
struct VerifyCmd {
    #[command(flatten)]
    src: DatumSource,
    /// Level or inclusive range, e.g. `4` or `1..6`.
    #[arg(long, default_value = "1..4", value_parser = parse_levels)]
    levels: RangeInclusive<usize>,
    #[arg(long, value_enum, ignore_case = true, default_value_t = Sides::Both)]
    side: Sides,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Levels with more vertices than this are skipped.
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    /// Check this graph file (`n_vertices` plus `adjacency` triples) instead of level graphs.
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// Report path; same as `--out`.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write one spectrum CSV per checked graph into this directory.
    #[arg(long)]
    spectra_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct BassIharaCmd {
    #[command(flatten)]
    src: DatumSource,
    #[arg(long)]
    level: usize,
    #[arg(long, value_enum, ignore_case = true, default_value_t = Side::A)]
    side: Side,
    /// Largest acceptable set mismatch.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Largest dart count for the direct eigensolve.
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Example {
    /// The non-backtracking subshift of the datum.
    Xd,
    /// The full Wang shift of the datum's tiles.
    Wang,
    /// A 2-regular example on four symbols that is not uniquely extendable.
    FourByFour,
    /// Non-backtracking subshift of the two-symbol free-product datum.
    FreeProduct,
}

#[derive(Args, Debug, Serialize)]
struct SubshiftCmd {
    #[command(flatten)]
    src: DatumSource,
    #[arg(long, value_enum, default_value_t = Example::Xd)]
    example: Example,
    /// Read `{"A": [[r, c], ...], "B": [[r, c], ...] | null, "s": n}` instead.
    #[arg(long, conflicts_with = "example")]
    matrices: Option<PathBuf>,
    /// Largest side length of the square pattern counts reported.
    #[arg(long, default_value_t = 3)]
    max_count: usize,
    /// Largest height of the transition graphs reported.
    #[arg(long, default_value_t = 2)]
    max_k: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Dir {
    Horizontal,
    Vertical,
}

#[derive(Args, Debug, Serialize)]
struct MixingCmd {
    #[command(flatten)]
    src: DatumSource,
    /// Height of the transition graph.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    max_n: usize,
    /// Exact rational arithmetic. This is the only mode; the flag is accepted for clarity.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value_t = Dir::Horizontal)]
    direction: Dir,
    /// Largest transition-matrix dimension for exact powers.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
    /// Also write the table metadata (C, θ, second modulus, best r) as JSON.
    #[arg(long)]
    meta: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct TilesCmd {
    #[command(flatten)]
    src: DatumSource,
    #[command(flatten)]
    common: Common,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Datum(c) => commands::datum(c),
        Command::Automaton(c) => commands::automaton(c),
        Command::Graph(c) => commands::graph(c),
        Command::ProductGraph(c) => commands::product_graph(c),
        Command::VerifyRamanujan(c) => commands::verify_ramanujan(c),
        Command::BassIhara(c) => commands::bass_ihara(c),
        Command::SubshiftCheck(c) => commands::subshift_check(c),
        Command::Mixing(c) => commands::mixing(c),
        Command::Tiles(c) => commands::tiles(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vhshift: {e}");
            e.exit_code()
        }
    }
}
