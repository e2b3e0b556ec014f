//! `todadual`: build Lax pairs, run the verification suite, apply the
//! duality map and integrate Toda flows from the command line.
//!
//! Exit codes: 0 success, 1 verification failure or runtime error, 2 usage
//! error, 3 non-generic point.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use toda_duality::duality::{goldfish_to_toda, toda_to_goldfish};
use toda_duality::{
    build_lax, integrate_flow_with, lax_spectrum, run_verification_suite, toda_hamiltonians,
    verify_duality_identities, DualityReport, Error, Family, FlowScheme, GoldfishPoint,
    RootDatum, SeededSampler, SuiteConfig, TodaPoint,
};

use output::{emit, float, table, to_json, MatrixJson};

/// Ranks above this still run but can take minutes in `verify`.
const RANK_WARNING: usize = 8;

#[derive(Parser)]
#[command(name = "todadual", version, about = "Open Toda chains and their dual Goldfish models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Toda-gauge pair (g, X).
    Lax(PointArgs),
    /// Run the invariant suite on seeded samples.
    Verify(VerifyArgs),
    /// Map a Toda point to the Goldfish side (or back with --qhat/--phat).
    DualMap(DualMapArgs),
    /// Integrate a Toda Hamiltonian flow and tabulate the trajectory.
    Integrate(IntegrateArgs),
}

#[derive(Args)]
struct Common {
    /// Root system family: A, B, C or D.
    #[arg(long = "type", value_name = "FAMILY")]
    family: Family,
    #[arg(long)]
    rank: usize,
    /// Seed for sampled points; flags win over the environment.
    #[arg(long, env = "TODADUAL_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated positions; sampled from the seed when both --q and --p are absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    q: Option<Vec<f64>>,
    /// Comma-separated momenta.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Option<Vec<f64>>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = SuiteConfig::default().points)]
    points: usize,
    /// Samples used by the finite-difference properties.
    #[arg(long, default_value_t = SuiteConfig::default().fd_points)]
    fd_points: usize,
    #[arg(long, default_value_t = SuiteConfig::default().dt, allow_hyphen_values = true)]
    dt: f64,
    #[arg(long, default_value_t = SuiteConfig::default().steps)]
    steps: usize,
}

#[derive(Args)]
struct DualMapArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Goldfish positions; with --phat maps in the Goldfish -> Toda direction.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["q", "p"])]
    qhat: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "qhat")]
    phat: Option<Vec<f64>>,
    /// Number of Hamiltonians compared (default: all).
    #[arg(long)]
    kmax: Option<usize>,
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    dt: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Generating Hamiltonian (default: the quadratic one).
    #[arg(long)]
    index: Option<usize>,
    #[arg(long, value_enum, default_value_t = Scheme::Composed)]
    scheme: Scheme,
    /// Write every k-th step.
    #[arg(long, default_value_t = 1)]
    every: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    /// Plain implicit midpoint (second order).
    Midpoint,
    /// Triple-jump composition of implicit midpoint steps (fourth order).
    Composed,
}

enum Failure {
    Usage(String),
    NonGeneric(String),
    Runtime(String),
    /// The report was written; some property failed.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidAlgebra(_) | Error::InvalidArgument(_) | Error::Dimension(_) => {
                Failure::Usage(e.to_string())
            }
            e if e.is_non_generic() => Failure::NonGeneric(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("I/O error: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Lax(args) => cmd_lax(args),
        Command::Verify(args) => cmd_verify(args),
        Command::DualMap(args) => cmd_dualmap(args),
        Command::Integrate(args) => cmd_integrate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NonGeneric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(msg)) | Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn datum(common: &Common) -> Result<RootDatum, Failure> {
    let d = RootDatum::new(common.family, common.rank)?;
    if common.rank > RANK_WARNING {
        eprintln!(
            "warning: rank {} exceeds the desk-scale bound {RANK_WARNING}; expect long runtimes",
            common.rank
        );
    }
    Ok(d)
}

/// Explicit point, a missing half filled with zeros, or a seeded generic sample.
fn toda_point(d: &RootDatum, args: &PointArgs) -> Result<TodaPoint, Failure> {
    let n = d.rank();
    if args.q.is_none() && args.p.is_none() {
        return Ok(SeededSampler::new(args.common.seed).toda_point(d, 0)?);
    }
    let q = args.q.clone().unwrap_or_else(|| vec![0.0; n]);
    let p = args.p.clone().unwrap_or_else(|| vec![0.0; n]);
    if q.len() != n || p.len() != n {
        return Err(Failure::Usage(format!(
            "{} needs {n} values in --q and --p, got {} and {}",
            d.algebra(),
            q.len(),
            p.len()
        )));
    }
    Ok(TodaPoint::new(q, p)?)
}

fn format_or(common: &Common, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = common.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(Failure::Usage(format!(
            "this command writes {}",
            allowed.iter().map(|f| f.name()).collect::<Vec<_>>().join(" or ")
        )));
    }
    Ok(f)
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Tsv => "tsv",
        }
    }

    fn separator(self) -> char {
        if self == Format::Tsv {
            '\t'
        } else {
            ','
        }
    }
}

#[derive(Serialize)]
struct LaxOutput {
    algebra: String,
    q: Vec<f64>,
    p: Vec<f64>,
    g: MatrixJson,
    x: MatrixJson,
}

fn cmd_lax(args: PointArgs) -> Outcome {
    let d = datum(&args.common)?;
    let pt = toda_point(&d, &args)?;
    let lax = build_lax(&d, &pt)?;
    let bytes = match format_or(&args.common, Format::Json, &[Format::Json, Format::Csv, Format::Tsv])? {
        Format::Json => to_json(&LaxOutput {
            algebra: d.algebra().to_string(),
            q: pt.q,
            p: pt.p,
            g: (&lax.g).into(),
            x: (&lax.x).into(),
        })?,
        f => {
            let header = ["matrix", "row", "col", "re", "im"].map(String::from);
            let mut rows = Vec::new();
            for (name, m) in [("g", &lax.g), ("x", &lax.x)] {
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        rows.push(vec![
                            name.to_string(),
                            i.to_string(),
                            j.to_string(),
                            float(m[(i, j)].re),
                            float(m[(i, j)].im),
                        ]);
                    }
                }
            }
            table(f.separator(), &header, &rows)
        }
    };
    Ok(emit(args.common.out.as_deref(), &bytes)?)
}

fn cmd_verify(args: VerifyArgs) -> Outcome {
    let d = datum(&args.common)?;
    format_or(&args.common, Format::Json, &[Format::Json])?;
    let config = SuiteConfig {
        seed: args.common.seed,
        points: args.points,
        fd_points: args.fd_points,
        dt: args.dt,
        steps: args.steps,
    };
    let report = run_verification_suite(&d, &config)?;
    emit(args.common.out.as_deref(), &to_json(&report)?)?;
    let failed: Vec<&str> = report.failed().map(|p| p.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failed properties: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct DualMapOutput {
    algebra: String,
    direction: &'static str,
    toda: TodaPoint,
    goldfish: GoldfishPoint,
    /// Sup-norm distance of the input from its image mapped back.
    round_trip_error: f64,
    /// For C2: the normalization `Hhat_2 = m_2 / 2` next to `m_2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    sp4_hhat2_half_m2: Option<f64>,
    report: DualityReport,
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn cmd_dualmap(args: DualMapArgs) -> Outcome {
    let common = &args.point.common;
    let d = datum(common)?;
    format_or(common, Format::Json, &[Format::Json])?;
    let n = d.rank();
    let kmax = args.kmax.unwrap_or(n);
    let (direction, toda, goldfish, round_trip_error) = match &args.qhat {
        Some(qhat) => {
            let phat = args.phat.clone().unwrap_or_else(|| vec![0.0; qhat.len()]);
            if qhat.len() != n || phat.len() != n {
                return Err(Failure::Usage(format!("{} needs {n} values in --qhat and --phat", d.algebra())));
            }
            let gp = GoldfishPoint::new(qhat.clone(), phat)?;
            let toda = goldfish_to_toda(&d, &gp)?;
            let back = toda_to_goldfish(&d, &toda)?;
            let err = sup_distance(&gp.to_vec(), &back.to_vec());
            ("goldfish-to-toda", toda, gp, err)
        }
        None => {
            let toda = toda_point(&d, &args.point)?;
            let gp = toda_to_goldfish(&d, &toda)?;
            let back = goldfish_to_toda(&d, &gp)?;
            let err = sup_distance(&toda.to_vec(), &back.to_vec());
            ("toda-to-goldfish", toda, gp, err)
        }
    };
    let report = verify_duality_identities(&d, &toda, kmax)?;
    let sp4 = (d.family() == Family::C && n == 2 && kmax >= 2).then(|| 0.5 * report.goldfish_values[1]);
    let out = DualMapOutput {
        algebra: d.algebra().to_string(),
        direction,
        toda,
        goldfish,
        round_trip_error,
        sp4_hhat2_half_m2: sp4,
        report,
    };
    Ok(emit(common.out.as_deref(), &to_json(&out)?)?)
}

#[derive(Serialize)]
struct Trajectory {
    algebra: String,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn cmd_integrate(args: IntegrateArgs) -> Outcome {
    let common = &args.point.common;
    let d = datum(common)?;
    let format = format_or(common, Format::Csv, &[Format::Csv, Format::Tsv, Format::Json])?;
    if args.every == 0 {
        return Err(Failure::Usage("--every must be at least 1".into()));
    }
    let n = d.rank();
    let index = args.index.unwrap_or(d.algebra().quadratic_hamiltonian_index());
    let scheme = match args.scheme {
        Scheme::Midpoint => FlowScheme::Midpoint,
        Scheme::Composed => FlowScheme::ComposedMidpoint,
    };
    let pt = toda_point(&d, &args.point)?;
    let path = integrate_flow_with(&d, &pt, index, args.dt, args.steps, scheme)?;

    let mut columns = vec!["t".to_string()];
    columns.extend((1..=n).map(|i| format!("q{i}")));
    columns.extend((1..=n).map(|i| format!("p{i}")));
    columns.extend((1..=n).map(|k| format!("H{k}")));
    columns.extend((1..=d.dim()).map(|i| format!("lambda{i}")));
    let mut rows = Vec::new();
    for (step, point) in path.iter().enumerate() {
        if step % args.every != 0 && step != args.steps {
            continue;
        }
        let mut row = vec![step as f64 * args.dt];
        row.extend(&point.q);
        row.extend(&point.p);
        row.extend(toda_hamiltonians(&d, point, n)?);
        row.extend(lax_spectrum(&d, point)?);
        rows.push(row);
    }
    let bytes = match format {
        Format::Json => to_json(&Trajectory { algebra: d.algebra().to_string(), columns, rows })?,
        f => {
            let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| float(*v)).collect()).collect();
            table(f.separator(), &columns, &text)
        }
    };
    Ok(emit(common.out.as_deref(), &bytes)?)
}
