use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitforge::catalog::{self, CatalogEntry};
use orbitforge::coadjoint::WalkParams;
use orbitforge::{Error, LieAlgebra, Scalar};
use serde::Serialize;

mod commands;
mod report;

use report::Report;

/// Coadjoint orbits, polynomial invariants, quadratic overgroups and
/// convex-hull experiments for low-dimensional real Lie algebras.
#[derive(Parser)]
#[command(name = "orbitforge", version)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, env = "ORBITFORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for parallel trials (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Jacobi identity check of the structure constants.
    Validate(AlgebraArgs),
    /// Catalog of low-dimensional algebras from the classification tables.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Coadjoint orbits: dimensions, seeded samples and flows.
    #[command(subcommand)]
    Orbit(OrbitCmd),
    /// Exact search for polynomial invariants of the coadjoint action.
    Invariants(InvariantsArgs),
    /// Search for an abelian ideal of half the generic orbit codimension.
    Special(SpecialArgs),
    /// Quadratic overgroups and their equivariance checks.
    #[command(subcommand)]
    Overgroup(OvergroupCmd),
    /// Strict-convexity lemma and orbit hull experiments.
    #[command(subcommand)]
    Convexity(ConvexityCmd),
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    /// Catalog name, parameters may be inline: `g4_9(1/2)`.
    #[arg(long, conflicts_with = "algebra_json")]
    algebra: Option<String>,
    /// Structure constants as JSON (the format written by `catalog export`).
    #[arg(long, value_name = "PATH")]
    algebra_json: Option<PathBuf>,
    /// Family parameter, repeatable: `--param alpha=1/2`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Names, dimensions, parameters and families.
    List,
    /// Full entry as JSON, reusable with `--algebra-json`.
    Export(AlgebraArgs),
}

#[derive(Args, Clone)]
struct WalkArgs {
    /// Number of sample points.
    #[arg(long, default_value_t = 2000)]
    count: usize,
    /// Flows composed per point.
    #[arg(long, default_value_t = 8)]
    steps: usize,
    /// Flow times are uniform in (-tau, tau).
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Keep only points within this Euclidean radius.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    retry_cap: usize,
}

impl WalkArgs {
    fn params(&self) -> WalkParams {
        WalkParams {
            steps: self.steps,
            tau: self.tau,
            radius: self.radius,
            retry_cap: self.retry_cap,
        }
    }
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Orbit and stabilizer dimension at a point, or the generic dimension.
    Dim {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Covector, comma separated; `sqrt(3)` and `p/q` are accepted.
        #[arg(long, value_parser = parse_point)]
        point: Option<Point>,
        /// Random covectors tried for the generic dimension.
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Seeded random-walk sample of an orbit.
    Sample {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, value_parser = parse_point)]
        point: Point,
        #[command(flatten)]
        walk: WalkArgs,
        /// Write the points as CSV instead of listing them.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// `exp(t F_u) l` for a direction `u` of the algebra.
    Flow {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, value_parser = parse_point)]
        point: Point,
        #[arg(long, value_parser = parse_point)]
        direction: Point,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Numerical search for a group element joining two covectors.
    Connect {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        /// Residual below which the covectors are reported on one orbit.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Args)]
struct InvariantsArgs {
    #[command(flatten)]
    alg: AlgebraArgs,
    #[arg(long, default_value_t = 2)]
    max_degree: u32,
}

#[derive(Args)]
struct SpecialArgs {
    #[command(flatten)]
    alg: AlgebraArgs,
    /// Random covectors tried for the generic orbit dimension.
    #[arg(long, default_value_t = 50)]
    trials: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    All,
    Equivariance,
    Dims,
    None,
}

#[derive(Args, Clone)]
struct CheckArgs {
    #[arg(long, value_enum, default_value_t = Check::All)]
    check: Check,
    /// Equivariance trials.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Covector for the orbit dimension comparison (default: a generic one).
    #[arg(long, value_parser = parse_point)]
    point: Option<Point>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    So4Wedge,
}

#[derive(Subcommand)]
enum OvergroupCmd {
    /// `G ⋉ S²(a)` with `φ(l) = (l, l|a ⊗ l|a)` for an abelian ideal `a`.
    Sym2 {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Ideal as basis labels, e.g. `X4,X5,X6` (default: the listed or first special ideal).
        #[arg(long)]
        ideal: Option<String>,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// `G × R^k` lifted by the invariants of degree at most 2.
    Product {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// User-supplied module and quadratic components, or a preset.
    Custom {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// JSON with `labels`, `action` (one matrix per basis element) and `components`.
        #[arg(long, value_name = "PATH", required_unless_present = "preset")]
        module: Option<PathBuf>,
        /// Built-in lift; `so4-wedge` uses `so4_r4` when no algebra is given.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[command(flatten)]
        check: CheckArgs,
    },
}

#[derive(Args, Clone)]
struct EpsArgs {
    /// Absolute L∞ tolerance (overrides --eps-frac).
    #[arg(long)]
    eps: Option<f64>,
    /// Tolerance as a fraction of the sample diameter.
    #[arg(long, default_value_t = 0.05)]
    eps_frac: f64,
}

#[derive(Args, Clone)]
struct ProbeArgs {
    /// Probe at most this many points per direction.
    #[arg(long)]
    max_probes: Option<usize>,
    /// Probe only points within this radius of the origin.
    #[arg(long)]
    probe_radius: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LiftChoice {
    Sym2,
    So4Wedge,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expect {
    Separated,
    NotSeparated,
}

#[derive(Subcommand)]
enum ConvexityCmd {
    /// LP membership of a point in the hull of an orbit sample.
    Member {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Orbit origin.
        #[arg(long, value_parser = parse_point)]
        point: Point,
        /// Point tested for membership.
        #[arg(long, value_parser = parse_point)]
        probe: Point,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        eps: EpsArgs,
    },
    /// Recovery bound of the strict-convexity lemma on random point sets.
    LemmaDemo {
        #[arg(long, default_value_t = 6)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Points are uniform in [-spread, spread]^dim.
        #[arg(long, default_value_t = 3.0)]
        spread: f64,
    },
    /// Mutual ε-membership rates of two orbit samples.
    HullEq {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, value_parser = parse_point)]
        l1: Point,
        #[arg(long, value_parser = parse_point)]
        l2: Point,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        eps: EpsArgs,
        #[command(flatten)]
        probes: ProbeArgs,
        /// Both rates must reach this for the check to pass.
        #[arg(long, default_value_t = 0.9)]
        min_rate: f64,
    },
    /// Search for a lifted point of one orbit outside the other's lifted hull.
    Separate {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, value_enum, default_value_t = LiftChoice::Sym2)]
        lift: LiftChoice,
        /// Ideal for the sym2 lift (default: the listed or first special ideal).
        #[arg(long)]
        ideal: Option<String>,
        #[arg(long, value_parser = parse_point)]
        l1: Point,
        #[arg(long, value_parser = parse_point)]
        l2: Point,
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long, default_value_t = 1.5)]
        tau: f64,
        #[arg(long, default_value_t = 6.0)]
        radius: f64,
        #[command(flatten)]
        eps: EpsArgs,
        #[arg(long, default_value_t = 60)]
        max_probes: usize,
        #[arg(long, default_value_t = 3.0)]
        probe_radius: f64,
        #[arg(long, value_enum, default_value_t = Expect::Separated)]
        expect: Expect,
    },
}

/// Algebra resolved from the command line, with catalog metadata when known.
struct Loaded {
    algebra: LieAlgebra,
    entry: Option<CatalogEntry>,
}

impl AlgebraArgs {
    fn load(&self) -> orbitforge::Result<Loaded> {
        let mut params = BTreeMap::new();
        for p in &self.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected NAME=VALUE, got `{p}`")))?;
            params.insert(k.trim().to_owned(), Scalar::parse(v)?);
        }
        match (&self.algebra, &self.algebra_json) {
            (Some(name), _) => {
                let entry = catalog::get(name, &params)?;
                Ok(Loaded {
                    algebra: entry.algebra.clone(),
                    entry: Some(entry),
                })
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                let v: serde_json::Value = serde_json::from_str(&text)?;
                let v = v.get("algebra").cloned().unwrap_or(v);
                Ok(Loaded {
                    algebra: LieAlgebra::from_json(&v)?,
                    entry: None,
                })
            }
            (None, None) => Err(Error::Parse(
                "an algebra is required (--algebra or --algebra-json)".into(),
            )),
        }
    }
}

/// Comma-separated covector.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct Point(Vec<f64>);

impl std::ops::Deref for Point {
    type Target = Vec<f64>;

    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if let Some(inner) = tok.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
                return Scalar::parse(inner)
                    .map(|x| x.to_f64().sqrt())
                    .map_err(|e| e.to_string());
            }
            Scalar::parse(tok)
                .map(|x| x.to_f64())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()
        .map(Point)
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INFRA: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownAlgebra(_)
        | Error::MissingParameter { .. }
        | Error::ParameterOutOfDomain { .. }
        | Error::DimensionMismatch { .. }
        | Error::DependentBasis { .. }
        | Error::InvalidAlgebra(_)
        | Error::RequiresExact(_)
        | Error::Parse(_)
        | Error::Json(_) => EXIT_USAGE,
        Error::NotAnIdeal { .. }
        | Error::NotAbelian
        | Error::RepresentationViolation { .. }
        | Error::DegreeTooHigh { .. }
        | Error::NotInvariant { .. }
        | Error::ComponentCount { .. } => EXIT_CHECK_FAILED,
        Error::SamplingExhausted { .. } | Error::Lp(_) | Error::Io(_) => EXIT_INFRA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_INFRA);
        }
    }
    match commands::run(&cli) {
        Ok(report) => {
            print_report(&report, cli.format, cli.seed);
            ExitCode::from(if report.ok { 0 } else { EXIT_CHECK_FAILED })
        }
        Err(e) => {
            if cli.format == Format::Json {
                let v = serde_json::json!({"error": e.to_string(), "seed": cli.seed});
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("serializable")
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn print_report(r: &Report, format: Format, seed: u64) {
    match format {
        Format::Json => {
            let mut v = r.json.clone();
            if let Some(obj) = v.as_object_mut() {
                obj.insert("seed".into(), seed.into());
                obj.insert("ok".into(), r.ok.into());
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("serializable")
            );
        }
        Format::Text => {
            for line in &r.lines {
                println!("{line}");
            }
            println!("seed: {seed}");
        }
    }
}
