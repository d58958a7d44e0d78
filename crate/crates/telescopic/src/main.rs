use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use telescopic::betti::{is_disconnected, profile_with_engine, Engine};
use telescopic::error::{Error, Result};
use telescopic::linkage::LengthVector;
use telescopic::oracle::{enum_subsets_foreach, grid_b0, GridConfig};
use telescopic::scalar::{format_rational_decimal, parse_rational};
use telescopic::verify::{render_text, run_verify, VerifyConfig};
use telescopic::xy::{
    euler_growth_xy, kink_scan, p_of_v, rate_curve, tau_analytic, total_betti_xy,
    BettiMode, KinkEstimate, VGrid, XYParams, EXACT_LIMIT,
};

#[derive(Parser)]
#[command(
    name = "telescopic",
    version,
    about = "Exact Betti numbers of planar linkages with one telescopic leg, \
             applied to the anti-ferromagnetic mean-field XY model"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Betti profile of a length vector
    Betti(BettiArgs),
    /// Invariants of the mean-field XY model at one parameter point
    Xy(XyArgs),
    /// CSV table of growth rates across an energy grid
    TauCurve(TauCurveArgs),
    /// Locate the second-derivative jump of the growth rate at v = 0
    Kink(KinkArgs),
    /// Count connected components on a rasterized workspace torus
    OracleB0(OracleB0Args),
    /// Stream the short/median/long classification of every leg subset
    OracleEnum(OracleEnumArgs),
    /// Run the self-check suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Enumeration,
    SubsetSum,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exact,
    LogSpace,
}

#[derive(Args)]
struct BettiArgs {
    /// Comma-separated leg lengths (rationals or sqrt(X)); the last leg
    /// is the telescopic one unless --telescopic is given
    #[arg(long)]
    lengths: String,
    /// Telescopic leg length appended to --lengths
    #[arg(long)]
    telescopic: Option<String>,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct XyArgs {
    /// Number of rotators N (the linkage has N + 2 legs)
    #[arg(long)]
    rotators: usize,
    /// External field h as a rational, h > 1/N
    #[arg(long)]
    field: String,
    /// Energy v as a rational inside the admissible interval
    #[arg(long, allow_hyphen_values = true)]
    energy: String,
    /// exact keeps integer totals; log-space scales to millions of rotators
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TauCurveArgs {
    #[arg(long)]
    field: String,
    /// Left edge of the energy grid (rational)
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// Right edge of the energy grid (rational)
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    /// Number of grid points, endpoints included
    #[arg(long)]
    steps: usize,
    /// Comma-separated rotator counts, one tau/sigma column group each
    #[arg(long)]
    rotators: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KinkArgs {
    #[arg(long)]
    field: String,
    #[arg(long, default_value = "-1/20", allow_hyphen_values = true)]
    from: String,
    #[arg(long, default_value = "1/20", allow_hyphen_values = true)]
    to: String,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Optional comma-separated rotator counts for empirical curves
    #[arg(long)]
    rotators: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleB0Args {
    #[arg(long)]
    lengths: String,
    #[arg(long)]
    telescopic: Option<String>,
    /// Cells per torus axis at the coarsest pass
    #[arg(long, default_value_t = 48)]
    resolution: usize,
    /// Resolution doublings to try beyond the base pass
    #[arg(long, default_value_t = 2)]
    rounds: usize,
    /// Genericity margin below which the run is refused; defaults to
    /// one cell arc of the longest leg
    #[arg(long)]
    margin_threshold: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleEnumArgs {
    #[arg(long)]
    lengths: String,
    #[arg(long)]
    telescopic: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Shrink trial counts and skip latency checks
    #[arg(long)]
    quick: bool,
    /// Override the per-suite trial count where one applies
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated criterion ids; default runs all of them
    #[arg(long)]
    suites: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Betti(args) => cmd_betti(args),
        Cmd::Xy(args) => cmd_xy(args),
        Cmd::TauCurve(args) => cmd_tau_curve(args),
        Cmd::Kink(args) => cmd_kink(args),
        Cmd::OracleB0(args) => cmd_oracle_b0(args),
        Cmd::OracleEnum(args) => cmd_oracle_enum(args),
        Cmd::Verify(args) => cmd_verify(args),
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_vector(lengths: &str, telescopic: &Option<String>) -> Result<LengthVector> {
    match telescopic {
        Some(tel) => LengthVector::parse(&format!("{lengths},{tel}")),
        None => LengthVector::parse(lengths),
    }
}

fn parse_rotator_list(input: &str) -> Result<Vec<usize>> {
    input
        .split(',')
        .map(|part| {
            part.trim().parse::<usize>().map_err(|_| Error::Parse {
                input: part.trim().to_string(),
                expected: "a positive rotator count",
            })
        })
        .collect()
}

fn big_number(x: &BigUint) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_string()).expect("integer digits form a JSON number")
}

fn big_int_number(x: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_string()).expect("integer digits form a JSON number")
}

#[derive(Serialize)]
struct BettiJson {
    lengths: String,
    n: usize,
    dimension: usize,
    b: Vec<serde_json::Number>,
    total: serde_json::Number,
    euler: serde_json::Number,
    generic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    disconnected: Option<bool>,
}

fn cmd_betti(args: BettiArgs) -> Result<ExitCode> {
    let lv = parse_vector(&args.lengths, &args.telescopic)?;
    let engine = match args.engine {
        EngineArg::Auto => Engine::Auto,
        EngineArg::Enumeration => Engine::Enumeration,
        EngineArg::SubsetSum => Engine::SubsetSum,
    };
    let profile = profile_with_engine(&lv, engine)?;
    let disconnected = if lv.n() > 3 {
        Some(is_disconnected(&lv)?)
    } else {
        None
    };
    let content = match args.format {
        Format::Json => {
            let doc = BettiJson {
                lengths: lv.to_string(),
                n: profile.n,
                dimension: profile.dimension,
                b: profile.b.iter().map(big_number).collect(),
                total: big_number(&profile.total),
                euler: big_int_number(&profile.euler),
                generic: profile.generic,
                disconnected,
            };
            to_pretty_json(&doc)?
        }
        Format::Text => {
            let ranks: Vec<String> = profile.b.iter().map(|b| b.to_string()).collect();
            let mut out = String::new();
            out.push_str(&format!("lengths: {lv}\n"));
            out.push_str(&format!(
                "n = {}, space dimension {}\n",
                profile.n, profile.dimension
            ));
            out.push_str(&format!("b = [{}]\n", ranks.join(", ")));
            out.push_str(&format!("total = {}\n", profile.total));
            out.push_str(&format!("euler = {}\n", profile.euler));
            out.push_str(&format!(
                "generic: {}\n",
                if profile.generic { "yes" } else { "no" }
            ));
            if let Some(d) = disconnected {
                out.push_str(&format!("disconnected: {}\n", if d { "yes" } else { "no" }));
            }
            out
        }
    };
    emit(&args.output, &content)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct XyJson {
    rotators: usize,
    field: String,
    energy: String,
    legs: usize,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_total: Option<serde_json::Number>,
    ln_b_total: f64,
    tau_empirical: f64,
    tau_analytic: f64,
    p_v: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi: Option<serde_json::Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi_sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
}

fn cmd_xy(args: XyArgs) -> Result<ExitCode> {
    let field = parse_rational(&args.field)?;
    let energy = parse_rational(&args.energy)?;
    let params = XYParams::new(args.rotators, field.clone(), energy.clone())?;
    let exact = match args.mode {
        ModeArg::Exact => true,
        ModeArg::LogSpace => false,
        ModeArg::Auto => args.rotators <= EXACT_LIMIT,
    };
    let mode = if exact {
        BettiMode::Exact
    } else {
        BettiMode::LogSpace
    };
    let total = total_betti_xy(&params, mode)?;
    let tau_n = total.ln / params.n() as f64;
    let tau_inf = tau_analytic(&field, &energy)?;
    let p = p_of_v(&field, &energy)?.to_f64();
    let euler = if exact {
        Some(euler_growth_xy(&params)?)
    } else {
        None
    };
    let content = match args.format {
        Format::Json => {
            let doc = XyJson {
                rotators: args.rotators,
                field: field.to_string(),
                energy: energy.to_string(),
                legs: params.n(),
                mode: if exact { "exact" } else { "log-space" },
                b_total: total.exact.as_ref().map(big_number),
                ln_b_total: total.ln,
                tau_empirical: tau_n,
                tau_analytic: tau_inf,
                p_v: p,
                chi: euler.as_ref().map(|e| big_int_number(&e.chi)),
                chi_sign: euler.as_ref().map(|e| e.sign),
                sigma: euler.as_ref().and_then(|e| {
                    if e.sign == 0 {
                        None
                    } else {
                        Some(e.ln_abs_over_n)
                    }
                }),
            };
            to_pretty_json(&doc)?
        }
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "XY model: N = {}, h = {}, v = {}\n",
                args.rotators, field, energy
            ));
            out.push_str(&format!(
                "legs = {}, mode = {}\n",
                params.n(),
                if exact { "exact" } else { "log-space" }
            ));
            if let Some(b) = &total.exact {
                out.push_str(&format!("b_total = {b}\n"));
            }
            out.push_str(&format!("ln b_total = {:.12}\n", total.ln));
            out.push_str(&format!("tau_empirical = {tau_n:.12}\n"));
            out.push_str(&format!("tau_analytic = {tau_inf:.12}\n"));
            out.push_str(&format!("p_v = {p:.12}\n"));
            if let Some(e) = &euler {
                out.push_str(&format!("chi = {} (sign {})\n", e.chi, e.sign));
                if e.sign == 0 {
                    out.push_str("sigma = -inf\n");
                } else {
                    out.push_str(&format!("sigma = {:.12}\n", e.ln_abs_over_n));
                }
            }
            out
        }
    };
    emit(&args.output, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_tau_curve(args: TauCurveArgs) -> Result<ExitCode> {
    let field = parse_rational(&args.field)?;
    let from = parse_rational(&args.from)?;
    let to = parse_rational(&args.to)?;
    let rotators = parse_rotator_list(&args.rotators)?;
    let grid = VGrid::new(from, to, args.steps)?;
    let rows = rate_curve(&field, &grid, &rotators)?;
    let mut out = String::from("v,p_v,tau_analytic");
    for n_rot in &rotators {
        out.push_str(&format!(",tau_{n_rot},sigma_sign_{n_rot},sigma_{n_rot}"));
    }
    out.push('\n');
    for row in &rows {
        out.push_str(&format_rational_decimal(&row.v, 12));
        out.push_str(&format!(",{:.12},{:.12}", row.p_v, row.tau_analytic));
        for cell in &row.cells {
            if cell.sigma_sign == 0 {
                out.push_str(&format!(",{:.12},0,-inf", cell.tau));
            } else {
                out.push_str(&format!(
                    ",{:.12},{},{:.12}",
                    cell.tau, cell.sigma_sign, cell.sigma
                ));
            }
        }
        out.push('\n');
    }
    emit(&args.output, &out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EstimateJson {
    index: usize,
    v: f64,
    second_diff_jump: f64,
    slope_mismatch: f64,
}

impl From<&KinkEstimate> for EstimateJson {
    fn from(e: &KinkEstimate) -> Self {
        Self {
            index: e.index,
            v: e.v,
            second_diff_jump: e.second_diff_jump,
            slope_mismatch: e.slope_mismatch,
        }
    }
}

#[derive(Serialize)]
struct EmpiricalJson {
    rotators: usize,
    #[serde(flatten)]
    estimate: EstimateJson,
}

#[derive(Serialize)]
struct KinkJson {
    field: String,
    from: String,
    to: String,
    steps: usize,
    spacing: f64,
    analytic: EstimateJson,
    empirical: Vec<EmpiricalJson>,
}

fn cmd_kink(args: KinkArgs) -> Result<ExitCode> {
    let field = parse_rational(&args.field)?;
    let from = parse_rational(&args.from)?;
    let to = parse_rational(&args.to)?;
    let rotators = match &args.rotators {
        Some(list) => parse_rotator_list(list)?,
        None => Vec::new(),
    };
    let grid = VGrid::new(from.clone(), to.clone(), args.steps)?;
    let report = kink_scan(&field, &grid, &rotators)?;
    let doc = KinkJson {
        field: field.to_string(),
        from: from.to_string(),
        to: to.to_string(),
        steps: args.steps,
        spacing: report.spacing,
        analytic: EstimateJson::from(&report.analytic),
        empirical: report
            .empirical
            .iter()
            .map(|(n_rot, e)| EmpiricalJson {
                rotators: *n_rot,
                estimate: EstimateJson::from(e),
            })
            .collect(),
    };
    emit(&args.output, &to_pretty_json(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleB0Json {
    lengths: String,
    components: usize,
    resolutions: Vec<usize>,
    counts: Vec<usize>,
}

fn cmd_oracle_b0(args: OracleB0Args) -> Result<ExitCode> {
    let lv = parse_vector(&args.lengths, &args.telescopic)?;
    let cfg = GridConfig {
        resolution: args.resolution,
        rounds: args.rounds,
        margin_threshold: args.margin_threshold,
    };
    let outcome = grid_b0(&lv, &cfg)?;
    let doc = OracleB0Json {
        lengths: lv.to_string(),
        components: outcome.components,
        resolutions: outcome.resolutions,
        counts: outcome.counts,
    };
    emit(&args.output, &to_pretty_json(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle_enum(args: OracleEnumArgs) -> Result<ExitCode> {
    let lv = parse_vector(&args.lengths, &args.telescopic)?;
    let stdout = std::io::stdout();
    let mut writer: Box<dyn std::io::Write> = match &args.output {
        Some(path) => Box::new(std::io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(std::io::BufWriter::new(stdout.lock())),
    };
    writeln!(writer, "mask,size,sum,class")?;
    let mut io_err: Option<std::io::Error> = None;
    enum_subsets_foreach(&lv, |row| {
        if io_err.is_none() {
            if let Err(e) = writeln!(
                writer,
                "{},{},{},{}",
                row.mask, row.size, row.sum, row.class
            ) {
                io_err = Some(e);
            }
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    writer.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let cfg = VerifyConfig {
        seed: args.seed,
        quick: args.quick,
        trials_override: args.trials,
        suites: args
            .suites
            .as_ref()
            .map(|s| s.split(',').map(|x| x.trim().to_string()).collect()),
    };
    let outcomes = run_verify(&cfg)?;
    let content = match args.format {
        Format::Json => to_pretty_json(&outcomes)?,
        Format::Text => render_text(&outcomes),
    };
    emit(&args.output, &content)?;
    if outcomes.iter().all(|o| o.passed) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn to_pretty_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc).map_err(|e| Error::Capacity(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
