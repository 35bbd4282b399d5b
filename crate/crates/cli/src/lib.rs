//! Command-line front end for `coherence-core`.

pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coherence_core::channels::{
    generalized_cnot, is_partial_incoherent_channel, partial_incoherence_residual, random_incoherent_channel,
    random_partial_incoherent_channel,
};
use coherence_core::measures::{evaluate, partial_coherence_skew};
use coherence_core::optim::geometric_discord;
use coherence_core::states::{random_haar_pure, random_mixed_induced};
use coherence_core::verify::{run_suite, Dims, Suite, SuiteReport};
use coherence_core::{BipartiteState, Error, KrausChannel, MeasureKind, OptimizerConfig, VonNeumannMeasurement};
use serde::Serialize;

use io::{encode_matrix, read_json, to_json, write_output, ChannelFile, MatrixRows, StateFile, UnitaryFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Slack for the Theorem-1 check in `convert`.
const CONVERT_TOL: f64 = 1e-7;
/// Residual allowed by the partial-incoherence classifier in `convert`.
const CLASSIFIER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    pub fn from_input(e: Error) -> Self {
        Self::input(e.to_string())
    }

    /// Errors raised while computing, after inputs were accepted.
    pub fn from_compute(e: Error) -> Self {
        match e {
            Error::UnknownSuite(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => {
                Self::input(e.to_string())
            }
            _ => Self::numerical(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

const AFTER_HELP: &str = "\
Files are JSON. States: {\"dims\": [d] or [d_a, d_b], \"matrix\": [[[re, im], ...], ...]}.
Channels: {\"dim_in\", \"dim_out\", \"kraus\": [matrix, ...]}. Matrices are row-major and
bipartite indices are a-major: row i*d_b + j is |i>_a|j>_b, as in kron(A, B).

Exit codes: 0 success, 1 invalid input, 2 property violation, 3 numerical failure.";

#[derive(Debug, Parser)]
#[command(name = "coherence", version, about = "Coherence, partial coherence and geometric discord", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence measures of a state in a reference basis.
    Measure(MeasureArgs),
    /// Geometric discord (minimum over local measurements on party a).
    Discord(DiscordArgs),
    /// Apply a partial incoherent channel and compare partial coherence with discord.
    Convert(ConvertArgs),
    /// Run randomized property suites.
    Verify(VerifyArgs),
    /// Write a random state or channel file.
    Random(RandomArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// computational | angles:THETA,PHI | path to a unitary file (columns are basis vectors)
    #[arg(long, default_value = "computational")]
    pub basis: String,
    /// Comma-separated subset of l1, rel_entropy, skew, qfi, partial_skew, partial_qfi.
    #[arg(long, value_delimiter = ',')]
    pub measures: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Recorded in the report; measures are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscordArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value_t = 24)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value tolerance of the local search.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Channel file or `cnot` for the generalized CNOT.
    #[arg(long)]
    pub channel: String,
    /// Reference basis of party a (same forms as for `measure`).
    #[arg(long, default_value = "computational")]
    pub basis: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 24)]
    pub starts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// d_a,d_b[,d_c]; defaults per suite.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Overrides every check tolerance of the suite.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    Pure,
    Mixed,
    IncoherentChannel,
    PartialIncoherentChannel,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long, value_enum)]
    pub kind: RandomKind,
    /// d or d_a,d_b
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs a parsed command and returns its exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Measure(a) => measure(a),
        Command::Discord(a) => discord(a),
        Command::Convert(a) => convert(a),
        Command::Verify(a) => verify(a),
        Command::Random(a) => random(a),
    }
}

fn load_state(path: &std::path::Path) -> Result<BipartiteState, CliError> {
    read_json::<StateFile>(path)?.to_state()
}

/// Parses `--basis` for party a of dimension `d_a`.
pub fn parse_basis(spec: &str, d_a: usize) -> Result<VonNeumannMeasurement, CliError> {
    if spec == "computational" {
        return Ok(VonNeumannMeasurement::computational(d_a));
    }
    if let Some(rest) = spec.strip_prefix("angles:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::input(format!("bad angles {rest:?}: {e}")))?;
        let [theta, phi] = parts[..] else {
            return Err(CliError::input("angles need exactly THETA,PHI"));
        };
        if d_a != 2 {
            return Err(CliError::input(format!("angle bases need d_a = 2, got {d_a}")));
        }
        return Ok(VonNeumannMeasurement::qubit(theta, phi));
    }
    let file: UnitaryFile = read_json(std::path::Path::new(spec))?;
    let u = io::decode_matrix(&file.matrix)?;
    if u.rows() != d_a || u.cols() != d_a {
        return Err(CliError::input(format!("basis is {}x{}, need {d_a}x{d_a}", u.rows(), u.cols())));
    }
    Ok(VonNeumannMeasurement::from_unitary(&u).map_err(CliError::from_input)?.with_label(spec))
}

#[derive(Debug, Serialize)]
struct MeasureRow {
    measure: MeasureKind,
    value: f64,
    basis_tag: String,
}

#[derive(Debug, Serialize)]
struct MeasureReport {
    dims: Vec<usize>,
    seed: u64,
    measures: Vec<MeasureRow>,
}

fn measure(a: MeasureArgs) -> Result<i32, CliError> {
    let rho = load_state(&a.state)?;
    let basis = parse_basis(&a.basis, rho.d_a())?;
    let bipartite = rho.d_b() > 1;
    let kinds: Vec<MeasureKind> = match &a.measures {
        Some(names) => names
            .iter()
            .map(|n| MeasureKind::parse(n.trim()).ok_or_else(|| CliError::input(format!("unknown measure {n:?}"))))
            .collect::<Result<_, _>>()?,
        None => MeasureKind::ALL.into_iter().filter(|k| bipartite || !k.is_partial()).collect(),
    };
    let mut rows = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let v = evaluate(kind, &rho, &basis).map_err(CliError::from_compute)?;
        rows.push(MeasureRow {
            measure: kind,
            value: v.value,
            basis_tag: v.basis_tag,
        });
    }
    let dims = StateFile::from_state(&rho).dims;
    let text = match a.format {
        Format::Json => to_json(&MeasureReport {
            dims,
            seed: a.seed,
            measures: rows,
        })?,
        Format::Csv => {
            let dims = dims.iter().map(ToString::to_string).collect::<Vec<_>>().join("x");
            let mut s = String::from("measure,value,basis_tag,dims,seed\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{:.16e},{},{},{}\n",
                    r.measure,
                    r.value,
                    csv_field(&r.basis_tag),
                    dims,
                    a.seed
                ));
            }
            s
        }
    };
    write_output(a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Serialize)]
struct DiscordReport {
    value: f64,
    /// Columns are the optimal basis vectors of party a.
    argmin_basis: MatrixRows,
    starts_converged: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_value: Option<f64>,
    seed: u64,
    starts: usize,
}

fn optimizer(starts: usize, seed: u64, tol: f64) -> Result<OptimizerConfig, CliError> {
    let cfg = OptimizerConfig {
        starts,
        seed,
        value_tolerance: tol,
        ..OptimizerConfig::default()
    };
    cfg.validate().map_err(CliError::from_input)?;
    Ok(cfg)
}

fn discord(a: DiscordArgs) -> Result<i32, CliError> {
    let rho = load_state(&a.state)?;
    let cfg = optimizer(a.starts, a.seed, a.tol)?;
    let r = geometric_discord(&rho, &cfg).map_err(CliError::from_compute)?;
    let report = DiscordReport {
        value: r.value,
        argmin_basis: encode_matrix(r.argmin_basis.basis()),
        starts_converged: r.starts_converged,
        oracle_value: r.oracle_value,
        seed: a.seed,
        starts: a.starts,
    };
    write_output(a.out.as_deref(), &to_json(&report)?)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Side {
    partial_skew: f64,
    discord: f64,
}

#[derive(Debug, Serialize)]
struct ConvertReport {
    channel: String,
    channel_residual: f64,
    input: Side,
    output: Side,
    theorem1_satisfied: bool,
}

fn convert(a: ConvertArgs) -> Result<i32, CliError> {
    let rho = load_state(&a.state)?;
    let basis = parse_basis(&a.basis, rho.d_a())?;
    let lueders = basis.lueders_extend(rho.d_b());
    let (ch, name): (KrausChannel, String) = if a.channel == "cnot" {
        if !basis.is_computational() {
            return Err(CliError::input("cnot is defined for the computational basis"));
        }
        (generalized_cnot(rho.d_a(), rho.d_b()), "cnot".into())
    } else {
        let ch = read_json::<ChannelFile>(std::path::Path::new(&a.channel))?.to_channel()?;
        (ch, a.channel.clone())
    };
    if ch.dim_in() != rho.matrix().dim() || ch.dim_out() != ch.dim_in() {
        return Err(CliError::input(format!(
            "channel maps {} -> {}, state has dimension {}",
            ch.dim_in(),
            ch.dim_out(),
            rho.matrix().dim()
        )));
    }
    let residual = partial_incoherence_residual(&ch, &lueders).map_err(CliError::from_input)?;
    if !is_partial_incoherent_channel(&ch, &lueders, CLASSIFIER_TOL) {
        return Err(CliError::input(format!(
            "channel is not partial incoherent w.r.t. {} (residual {residual:e})",
            lueders.tag()
        )));
    }
    let cfg = optimizer(a.starts, a.seed, OptimizerConfig::default().value_tolerance)?;
    let side = |x: &BipartiteState| -> Result<Side, CliError> {
        Ok(Side {
            partial_skew: partial_coherence_skew(x, &lueders).map_err(CliError::from_compute)?.value,
            discord: geometric_discord(x, &cfg).map_err(CliError::from_compute)?.value,
        })
    };
    let input = side(&rho)?;
    let output = side(&ch.apply_bipartite(&rho).map_err(CliError::from_compute)?)?;
    let theorem1_satisfied = output.discord <= input.partial_skew + CONVERT_TOL;
    let report = ConvertReport {
        channel: name,
        channel_residual: residual,
        input,
        output,
        theorem1_satisfied,
    };
    write_output(a.out.as_deref(), &to_json(&report)?)?;
    Ok(if theorem1_satisfied { EXIT_OK } else { EXIT_VIOLATION })
}

fn verify(a: VerifyArgs) -> Result<i32, CliError> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&a.suite).map_err(CliError::from_input)?]
    };
    let dims = match a.dims.as_deref() {
        None => None,
        Some(&[d_a, d_b]) => Some(Dims::new(d_a, d_b, None)),
        Some(&[d_a, d_b, d_c]) => Some(Dims::new(d_a, d_b, Some(d_c))),
        Some(other) => return Err(CliError::input(format!("--dims needs 2 or 3 entries, got {other:?}"))),
    };
    let mut reports: Vec<SuiteReport> = Vec::with_capacity(suites.len());
    for s in suites {
        let d = dims.unwrap_or_else(|| s.default_dims());
        reports.push(run_suite(s, a.trials, d, a.seed, a.tol).map_err(CliError::from_compute)?);
    }
    let text = if reports.len() == 1 { to_json(&reports[0])? } else { to_json(&reports)? };
    write_output(a.out.as_deref(), &text)?;
    Ok(if reports.iter().all(SuiteReport::passed) { EXIT_OK } else { EXIT_VIOLATION })
}

fn random(a: RandomArgs) -> Result<i32, CliError> {
    let text = match (a.kind, &a.dims[..]) {
        (RandomKind::Pure | RandomKind::Mixed, dims @ ([_] | [_, _])) => {
            let (d_a, d_b) = (dims[0], dims.get(1).copied().unwrap_or(1));
            if d_a == 0 || d_b == 0 {
                return Err(CliError::input("dimensions must be positive"));
            }
            let d = d_a * d_b;
            let rho = if a.kind == RandomKind::Pure {
                random_haar_pure(d, a.seed)
            } else {
                random_mixed_induced(d, d, a.seed)
            };
            let file = StateFile::from_state(&BipartiteState::new(rho, d_a, d_b).map_err(CliError::from_input)?);
            file.to_state()?;
            to_json(&file)?
        }
        (RandomKind::IncoherentChannel, &[d]) if d > 0 => {
            let file = ChannelFile::from_channel(&random_incoherent_channel(d, 2, a.seed));
            file.to_channel()?;
            to_json(&file)?
        }
        (RandomKind::PartialIncoherentChannel, &[d_a, d_b]) if d_a > 0 && d_b > 0 => {
            let file = ChannelFile::from_channel(&random_partial_incoherent_channel(d_a, d_b, a.seed));
            file.to_channel()?;
            to_json(&file)?
        }
        (kind, dims) => return Err(CliError::input(format!("--dims {dims:?} does not fit --kind {kind:?}"))),
    };
    write_output(Some(&a.out), &text)?;
    Ok(EXIT_OK)
}
