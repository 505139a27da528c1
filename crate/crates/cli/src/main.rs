use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use tropdol::cohomology::{cohomology_table, pd_check, Ambient, CohomologyTable, Region};
use tropdol::io::{self, DecodeError};
use tropdol::mumford::{random_skeleton, theorem_table_global, verify_skeleton, SkeletonGraph};
use tropdol::selftest::{self, SelftestConfig};
use tropdol::tropicalize::{modify, tropicalize_direct, tropicalize_incremental, TropicalizeError};
use tropdol::valuation::{from_padic_points, validate_ultrametric};
use tropdol::value::parse_rational_lenient;
use tropdol::TropicalCurve;

#[derive(Parser)]
#[command(name = "tropdol", version, about = "Tropicalizations of the affine line and tropical Dolbeault cohomology tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Incremental,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Log-distance matrix of rational points under the p-adic absolute value
    IngestPoints {
        #[arg(long)]
        p: i64,
        /// Comma-separated rationals, e.g. `0,1,5` or `0,1/2`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tropical curve of the linear embedding given by a matrix
    Tropicalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "direct")]
        method: Method,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate a matrix or curve; reports balancing and smoothness of curves
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tropical modification of a curve along a piecewise affine function
    Modify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        paf: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cohomology table of a region (the whole space by default)
    Cohomology {
        #[command(flatten)]
        space: SpaceArgs,
        /// Print only the compactly supported table
        #[arg(long)]
        compact: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Poincare duality check on the table of a region
    Pd {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dimension table of a Mumford curve of given genus or skeleton
    Mumford {
        #[arg(long, conflicts_with = "skeleton")]
        genus: Option<usize>,
        #[arg(long)]
        skeleton: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare against the cellular computation on the skeleton
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized acceptance checks
    Selftest {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
#[group(required = true, multiple = false)]
struct SpaceInput {
    /// Embedded curve JSON
    #[arg(long)]
    input: Option<PathBuf>,
    /// Skeleton JSON; loops are subdivided by two new vertices each
    #[arg(long)]
    skeleton: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SpaceArgs {
    #[command(flatten)]
    input: SpaceInput,
    /// Region JSON referencing ids of the curve or skeleton
    #[arg(long)]
    region: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        match e {
            DecodeError::Function(TropicalizeError::Invariant(m)) => CliError::Invariant(m),
            e => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<TropicalizeError> for CliError {
    fn from(e: TropicalizeError) -> Self {
        match e {
            TropicalizeError::Invariant(m) => CliError::Invariant(m),
            e => CliError::Invalid(e.to_string()),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

/// Region, and whether its table is covered by duality (smooth or skeleton).
fn load_region(space: &SpaceArgs) -> Result<(Region, bool), CliError> {
    let (ambient, skeleton) = match (&space.input.input, &space.input.skeleton) {
        (Some(path), _) => (Ambient::Embedded(io::decode_curve(&read(path)?)?), false),
        (None, Some(path)) => {
            let s: SkeletonGraph = io::decode_skeleton(&read(path)?)?;
            (s.ambient().map_err(invalid)?, true)
        }
        (None, None) => return Err(CliError::Invalid("one of --input and --skeleton is required".into())),
    };
    let region = match &space.region {
        Some(path) => io::decode_region(&read(path)?, &ambient)?,
        None => Region::whole(ambient).map_err(invalid)?,
    };
    let covered = skeleton || region.in_validated_envelope();
    if !covered {
        eprintln!("warning: region contains non-smooth points; the table is outside the validated range");
    }
    Ok((region, covered))
}

fn table_of(region: &Region) -> Result<CohomologyTable, CliError> {
    cohomology_table(region).map_err(invalid)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::IngestPoints { p, points, output } => {
            let points = points.iter().map(|s| parse_rational_lenient(s)).collect::<Result<Vec<_>, _>>().map_err(invalid)?;
            let m = from_padic_points(p, &points).map_err(invalid)?;
            emit(output.as_deref(), &io::encode_matrix(&m))
        }
        Command::Tropicalize { input, method, output } => {
            let m = io::decode_matrix(&read(&input)?)?;
            let curve = match method {
                Method::Direct => tropicalize_direct(&m)?,
                Method::Incremental => tropicalize_incremental(&m)?,
                Method::Both => {
                    let direct = tropicalize_direct(&m)?;
                    let agree = tropicalize_incremental(&m)? == direct;
                    eprintln!("methods agree: {agree}");
                    if !agree {
                        emit(output.as_deref(), &io::encode_curve(&direct))?;
                        return Err(CliError::Invariant("direct and incremental constructions differ".into()));
                    }
                    direct
                }
            };
            emit(output.as_deref(), &io::encode_curve(&curve))
        }
        Command::Check { input, output } => {
            let text = read(&input)?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| invalid(format!("$: {e}")))?;
            if value.get("L").is_some() {
                let m = io::decode_matrix_unchecked(&text)?;
                let report = validate_ultrametric(&m).map_err(invalid)?;
                emit(output.as_deref(), &io::encode_matrix_check(&report))?;
                if !report.is_ok() {
                    return Err(CliError::Invalid("matrix is not a valid ultrametric configuration".into()));
                }
                Ok(())
            } else {
                let curve: TropicalCurve = io::decode_curve(&text)?;
                let balancing = curve.check_balancing();
                emit(output.as_deref(), &io::encode_curve_check(&balancing, &curve.check_smooth()))?;
                if !balancing.is_balanced() {
                    return Err(CliError::Invalid("curve is not balanced".into()));
                }
                Ok(())
            }
        }
        Command::Modify { input, paf, output } => {
            let curve = io::decode_curve(&read(&input)?)?;
            let p = io::decode_paf(&read(&paf)?, &curve)?;
            let map = modify(&curve, &p)?;
            emit(output.as_deref(), &io::encode_modification(&map))
        }
        Command::Cohomology { space, compact, output } => {
            let (region, _) = load_region(&space)?;
            let t = table_of(&region)?;
            let text = if compact { io::encode_table_compact(&t) } else { io::encode_table(&t) };
            emit(output.as_deref(), &text)
        }
        Command::Pd { space, output } => {
            let (region, covered) = load_region(&space)?;
            let t = table_of(&region)?;
            let (holds, failures) = pd_check(&t);
            let report = serde_json::json!({
                "h": t.h,
                "hc": t.hc,
                "pd": holds,
                "failures": failures.iter().map(|&(p, q)| [p, q]).collect::<Vec<_>>(),
            });
            emit(output.as_deref(), &io::encode_value(&report))?;
            eprintln!("poincare duality: {holds}");
            if !holds && covered {
                return Err(CliError::Invariant(format!("duality fails at {failures:?}")));
            }
            Ok(())
        }
        Command::Mumford { genus, skeleton, seed, verify, output } => {
            let s = match (&skeleton, genus) {
                (Some(path), _) => io::decode_skeleton(&read(path)?)?,
                (None, Some(g)) => random_skeleton(g, seed),
                (None, None) => return Err(CliError::Invalid("one of --genus and --skeleton is required".into())),
            };
            let expected = theorem_table_global(s.genus());
            if verify {
                let report = verify_skeleton(&s, seed, 8).map_err(invalid)?;
                let ok = report.verified();
                eprintln!("verified: {ok}");
                emit(output.as_deref(), &io::encode_table(&expected))?;
                if !ok {
                    let bad: Vec<String> = report
                        .simple
                        .iter()
                        .filter(|c| !c.matches || !c.duality)
                        .map(|c| c.description.clone())
                        .collect();
                    return Err(CliError::Invariant(format!(
                        "cellular tables disagree (global match: {}, regions: {bad:?})",
                        report.global_matches
                    )));
                }
                return Ok(());
            }
            emit(output.as_deref(), &io::encode_table(&expected))
        }
        Command::Selftest { seed, cases, jobs, output } => {
            let results = selftest::run_all(&SelftestConfig { seed, cases, jobs });
            for r in &results {
                eprintln!("criterion {} [{}] {}: {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            let passed = results.iter().all(|r| r.passed);
            let report = serde_json::json!({
                "seed": seed,
                "cases": cases,
                "passed": passed,
                "criteria": results.iter().map(|r| serde_json::json!({
                    "id": r.id,
                    "name": r.name,
                    "passed": r.passed,
                    "cases": r.cases,
                    "detail": r.detail,
                })).collect::<Vec<_>>(),
            });
            emit(output.as_deref(), &io::encode_value(&report))?;
            if !passed {
                return Err(CliError::Invariant("selftest failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
