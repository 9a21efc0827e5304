//! Command-line front end: argument parsing, JSON input and output, SVG pictures.
//!
//! [`run`] is the whole program as a function of its arguments, so it can be tested without
//! spawning a process. Results are pretty-printed JSON (or SVG for `render`) on stdout, or in the
//! file given by `--out`. Errors are reported on stderr, first as a one-line JSON diagnostic
//! `{"error": {"code": …, "message": …}}` and, for usage errors, followed by the help of the
//! subcommand. Exit status: 0 on success, 1 when the computation reports a domain error, 2 on
//! usage errors.

pub mod commands;
pub mod error;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

pub use error::{CliError, ErrorClass};

/// Environment variable overriding the default solver tolerance of `voronoi`.
pub const TOLERANCE_ENV: &str = "TORIC_MIRROR_TOL";

#[derive(Parser, Debug)]
#[command(name = "toric-mirror", version, about = "Toric mirror symmetry for A_{n-1} stacky fans: Picard groups, cohomology, Ext tables, cylinder graphs, power diagrams and braid actions")]
pub struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Picard group of a stacky fan.
    Pic(FanSource),
    /// Čech cohomology of a line bundle, degree by degree over a box of characters.
    Cohomology(CohomologyArgs),
    /// Ext dimensions and Euler pairing of two skyscraper sheaves on [C²/Z_n].
    Ext(ExtArgs),
    /// Checks the local mutation sequence and its homotopies.
    MutationCheck(MutationArgs),
    /// Graph of a VGIT chamber, with its face areas and liftability.
    Fltz(FltzArgs),
    /// Legendrian lift of a cylinder graph.
    Lift(LiftArgs),
    /// Discrete flux primitive of an isotopy of graphs.
    Flux(FluxArgs),
    /// Canonical exact graph of a point configuration via semi-discrete optimal transport.
    Voronoi(VoronoiArgs),
    /// K₀ matrix of an annular braid word.
    Braid(BraidArgs),
    /// Checks the defining relations of the annular braid group on K₀.
    BraidVerify(BraidVerifyArgs),
    /// Bondal–Thomsen labels after a sequence of moves.
    Bt(BtArgs),
    /// SVG picture of a graph, a power diagram or a front projection.
    Render(RenderArgs),
}

/// A fan from a file, or the standard `A_{n−1}` fan.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct FanSource {
    /// Fan file: {"rank", "rays", "b", "max_cones"}.
    #[arg(long, value_name = "PATH")]
    pub fan: Option<PathBuf>,
    /// Use the fan of [C²/Z_N] with rays (1, 0) and (1, N).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(i64).range(1..=10_000))]
    pub an: Option<i64>,
}

#[derive(Args, Debug)]
pub struct CohomologyArgs {
    #[command(flatten)]
    pub source: FanSource,
    /// Divisor coefficients, one per ray, e.g. "0,-1" or "1/2,0".
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rational_list)]
    pub divisor: RationalList,
    /// Character box, e.g. "-3..3,-3..3" (inclusive ranges).
    #[arg(long = "box", allow_hyphen_values = true, value_parser = parse_box)]
    pub bounds: BoxArg,
}

#[derive(Args, Debug)]
pub struct ExtArgs {
    /// Order of the cyclic group.
    #[arg(long, value_parser = clap::value_parser!(i64).range(2..=64))]
    pub n: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub i: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub j: i64,
}

#[derive(Args, Debug)]
pub struct MutationArgs {
    #[arg(long, value_parser = clap::value_parser!(i64).range(2..=64))]
    pub n: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub i: i64,
    /// Polynomial-degree truncation.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(i64).range(0..=12))]
    pub trunc: i64,
    /// Also check that the cone is the ideal sheaf and its linking disk the skyscraper.
    #[arg(long)]
    pub linking: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Partial,
}

#[derive(Args, Debug)]
pub struct FltzArgs {
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=1000))]
    pub n: i64,
    /// The chamber I ⊂ {0, …, n}, containing 0 and n, e.g. "0,2,4".
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub chamber: Vec<i64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    pub mode: ModeArg,
    /// Also write the graph's SVG here.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    /// Graph JSON file.
    #[arg(long, value_name = "PATH")]
    pub graph: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("frames_source").required(true).args(["frames_file", "generator"]))]
pub struct FluxArgs {
    /// JSON array of graph frames of one isotopy.
    #[arg(long, value_name = "PATH")]
    pub frames_file: Option<PathBuf>,
    /// Built-in loop: "t<i>" (exchange across segment i of φ_n) or "r" (rotation by 1/n).
    #[arg(long = "loop", value_name = "LETTER")]
    pub generator: Option<String>,
    /// Number of strands for the built-in loop.
    #[arg(long, requires = "generator", value_parser = clap::value_parser!(i64).range(1..=64))]
    pub n: Option<i64>,
    /// Number of frames for the built-in loop.
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(2..=1000))]
    pub frames: u64,
    /// Cylinder bounds "R-,R+" for the built-in loop (default: -1, n+1).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rational_list)]
    pub bounds: Option<RationalList>,
    /// Frame at which to evaluate (default: the middle frame). The frame and its neighbours
    /// must share their combinatorics.
    #[arg(long)]
    pub t: Option<usize>,
    /// Time between frames (default: 1/(frames − 1)).
    #[arg(long, value_parser = parse_rational_arg)]
    pub dt: Option<String>,
}

#[derive(Args, Debug)]
pub struct VoronoiArgs {
    /// Sites file: {"R": [R-, R+], "sites": [[r, q], …], "targets": [..]} or a bare list of sites.
    #[arg(long, value_name = "PATH")]
    pub sites: PathBuf,
    /// Cylinder bounds "R-,R+", overriding the file.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub bounds: Option<Vec<f64>>,
    /// Area of each site's cell (default 1 each); the rest is split between the boundary circles.
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<f64>>,
    /// Solver tolerance on the largest area residual.
    #[arg(long, env = TOLERANCE_ENV, value_parser = parse_tolerance)]
    pub tol: Option<f64>,
    /// Also write the exact graph's SVG here.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Also write the floating-point power diagram's SVG here.
    #[arg(long, value_name = "PATH")]
    pub diagram_svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BraidArgs {
    #[arg(long, value_parser = clap::value_parser!(i64).range(2..=64))]
    pub n: i64,
    /// Word such as "t1 t2 T1 r" (capital letter or ^-1 for inverses).
    #[arg(long, allow_hyphen_values = true)]
    pub word: String,
    /// Send τ_i to the twist by O_0(+i) instead of O_0(−i).
    #[arg(long)]
    pub dual: bool,
}

#[derive(Args, Debug)]
pub struct BraidVerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(i64).range(2..=64))]
    pub n: i64,
    #[arg(long)]
    pub dual: bool,
}

#[derive(Args, Debug)]
pub struct BtArgs {
    #[arg(long, value_parser = clap::value_parser!(i64).range(2..=64))]
    pub n: i64,
    /// Moves applied in order, e.g. "r t1".
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub moves: String,
    /// Start from this labeling (JSON) instead of O, O(-1), …
    #[arg(long, value_name = "PATH")]
    pub labeling: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("object").required(true).args(["graph", "phi", "front", "fan", "sites"]))]
pub struct RenderArgs {
    /// Lagrangian projection of the graph in this JSON file.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    /// Lagrangian projection of φ_N.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(i64).range(1..=1000))]
    pub phi: Option<i64>,
    /// Front projection of the FLTZ skeleton of the A_{N-1} fan.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(i64).range(1..=1000))]
    pub front: Option<i64>,
    /// Front projection of the FLTZ skeleton of the fan in this file.
    #[arg(long, value_name = "PATH")]
    pub fan: Option<PathBuf>,
    /// Power diagram of the solved configuration in this sites file.
    #[arg(long, value_name = "PATH")]
    pub sites: Option<PathBuf>,
    /// Cylinder bounds "R-,R+" for --phi (default -1, N+1) and --sites.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rational_list)]
    pub bounds: Option<RationalList>,
}

/// Inclusive ranges of a character box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxArg(pub Vec<(i64, i64)>);

fn parse_box(s: &str) -> Result<BoxArg, String> {
    s.split(',')
        .map(|part| {
            let (lo, hi) = part.split_once("..").ok_or_else(|| format!("expected lo..hi, got {part:?}"))?;
            let lo: i64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
            let hi: i64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
            if lo > hi {
                return Err(format!("empty range {lo}..{hi}"));
            }
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(BoxArg)
}

fn parse_rational_arg(s: &str) -> Result<String, String> {
    toric_mirror::rational::parse_rational(s.trim()).map(|_| s.trim().to_string())
}

/// Comma-separated rationals, validated and kept as text (parsing them again is exact).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalList(pub Vec<String>);

fn parse_rational_list(s: &str) -> Result<RationalList, String> {
    s.split(',').map(parse_rational_arg).collect::<Result<_, _>>().map(RationalList)
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must be positive and finite, got {s}"))
    }
}

/// Everything the process would produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// The result of a subcommand: text for stdout (or `--out`) and possibly a failure to report
/// alongside it (as `braid-verify` does when a relation fails).
pub struct Report {
    pub text: String,
    pub failure: Option<CliError>,
}

fn usage_outcome(err: clap::Error, args: &[OsString]) -> Outcome {
    use clap::error::ErrorKind;
    if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
        let code = if err.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
        let text = err.render().to_string();
        return if code == 0 {
            Outcome { exit_code: 0, stdout: text, stderr: String::new() }
        } else {
            Outcome { exit_code: code, stdout: String::new(), stderr: text }
        };
    }
    let kind = error::variant_code(&err.kind());
    let rendered = err.to_string();
    let first = rendered.lines().next().unwrap_or_default();
    let message = first.strip_prefix("error: ").unwrap_or(first).to_string();
    let diag = CliError::usage(&kind, message).to_json();
    let mut stderr = format!("{diag}\n{}", err.render());
    let mut cmd = Cli::command();
    cmd.build();
    let sub = args.iter().skip(1).filter_map(|a| a.to_str()).find(|a| cmd.find_subcommand(a).is_some()).map(str::to_string);
    if let Some(name) = sub {
        if let Some(sc) = cmd.find_subcommand_mut(&name) {
            stderr.push('\n');
            stderr.push_str(&sc.render_help().to_string());
        }
    }
    Outcome { exit_code: 2, stdout: String::new(), stderr }
}

fn failure_outcome(e: &CliError, stdout: String) -> Outcome {
    Outcome { exit_code: e.exit_code(), stdout, stderr: format!("{}\n", e.to_json()) }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => return usage_outcome(e, &args),
    };
    let report = match commands::dispatch(&cli.command) {
        Ok(r) => r,
        Err(e) => return failure_outcome(&e, String::new()),
    };
    let stdout = match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &report.text) {
                return failure_outcome(&CliError::io("write_failed", path, &e), String::new());
            }
            String::new()
        }
        None => report.text,
    };
    match report.failure {
        Some(e) => failure_outcome(&e, stdout),
        None => Outcome { exit_code: 0, stdout, stderr: String::new() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_parser_accepts_negative_ranges() {
        assert_eq!(parse_box("-3..3,0..2").unwrap(), BoxArg(vec![(-3, 3), (0, 2)]));
        assert!(parse_box("3..-3").is_err());
        assert!(parse_box("1,2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert_eq!(parse_tolerance("1e-6"), Ok(1e-6));
        assert!(parse_tolerance("0").is_err());
        assert!(parse_tolerance("nan").is_err());
    }
}
