//! The `mlcent` command line: `rank`, `convergence` and `info`.
//!
//! Exit codes: 0 success, 2 parse or i/o error (including bad flags), 3 domain or
//! parameter error, 4 convergence or numerical failure, 5 dense size cap exceeded.
//! `MLCENT_THREADS` sets the worker thread count; output does not depend on it.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::centrality::{
    stabilize_ranking, Alpha, BlockOptions, CentralityReport, MeasureKind, MeasureRequest, Mode,
    ShiftConvention, DEFAULT_BLOCK_SIZE,
};
use crate::error::{Error, Result};
use crate::ingest::{builtin, parse_edge_list, ParseOptions};
use crate::krylov::{Augmentation, DEFAULT_AUGMENTATION_SEED};
use crate::matrix_functions::{estimate_lambda_max, DEFAULT_LAMBDA_MAX_ITER, DEFAULT_LAMBDA_TOL};
use crate::tensor::{AdjacencyTensor, TensorIndex};

pub const THREADS_ENV: &str = "MLCENT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mlcent", version, about = "Centrality measures for multilayer networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score and rank node-layer pairs
    Rank(RankArgs),
    /// Infinity-norm error of the Krylov approximation against exact values, per step count
    Convergence(ConvergenceArgs),
    /// Summary of a network
    Info(InfoArgs),
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "builtin"])))]
pub struct InputArgs {
    /// Edge-list file
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Builtin network name (example1)
    #[arg(long)]
    pub builtin: Option<String>,
    /// Reject duplicate edges and weights in unweighted files
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentArg {
    None,
    Ones,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// mtc, mkc, msc-exp, msc-res, tnc or pair
    #[arg(long, default_value = "mtc")]
    pub measure: MeasureKind,
    /// Resolvent damping: absolute (0.1) or relative to lambda_max (0.5rel)
    #[arg(long, default_value = "0.5rel")]
    pub alpha: Alpha,
    /// Exponential scaling
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Subtract the identity from exp and the resolvent
    #[arg(long)]
    pub shifted: bool,
    /// Nodes per block for subgraph measures in Krylov mode
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    pub block_size: usize,
    /// Extra dense slice for the block process
    #[arg(long, value_enum, default_value_t = AugmentArg::None)]
    pub augment: AugmentArg,
    /// Seed of the random augmentation slice
    #[arg(long, default_value_t = DEFAULT_AUGMENTATION_SEED)]
    pub seed: u64,
    /// Nodes for subgraph measures, as node:layer pairs separated by commas
    #[arg(long, value_delimiter = ',')]
    pub nodes: Option<Vec<TensorIndex>>,
    /// Source node:layer of the pair measure
    #[arg(long)]
    pub from: Option<TensorIndex>,
    /// Target node:layer of the pair measure
    #[arg(long)]
    pub to: Option<TensorIndex>,
    /// Use the resolvent for the pair measure
    #[arg(long)]
    pub pair_resolvent: bool,
}

impl MeasureArgs {
    fn request(&self) -> Result<MeasureRequest> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::domain(format!("beta must be positive, got {}", self.beta)));
        }
        let pair = match (self.from, self.to) {
            (Some(f), Some(t)) => Some((f, t)),
            (None, None) => None,
            _ => return Err(Error::domain("--from and --to must be given together")),
        };
        if self.measure == MeasureKind::PairCommunicability && pair.is_none() {
            return Err(Error::domain("the pair measure needs --from and --to"));
        }
        let augmentation = match self.augment {
            AugmentArg::None => Augmentation::None,
            AugmentArg::Ones => Augmentation::Ones,
            AugmentArg::Random => Augmentation::Random { seed: self.seed },
        };
        Ok(MeasureRequest {
            kind: self.measure,
            beta: self.beta,
            alpha: self.alpha,
            shift: if self.shifted { ShiftConvention::Shifted } else { ShiftConvention::Full },
            nodes: self.nodes.clone(),
            pair,
            pair_resolvent: self.pair_resolvent,
            block: BlockOptions { block_size: self.block_size, augmentation },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Decimals in printed scores
    #[arg(long, default_value_t = 4)]
    pub precision: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Exact,
    Krylov,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Krylov steps
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    /// Rows printed
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Pick the smallest m at which the top-k ranking repeats (Krylov modes)
    #[arg(long)]
    pub stabilize: bool,
    /// Largest m tried by --stabilize
    #[arg(long, default_value_t = 50)]
    pub m_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 10)]
    pub m_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct InfoArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Echo of the effective configuration in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: String,
    pub measure: MeasureKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    pub shift: ShiftConvention,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<ModeArg>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub augment: Option<AugmentArg>,
    pub precision: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub top: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub node: usize,
    pub layer: usize,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub krylov: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub abs_diff: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    /// Krylov steps actually used.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stabilized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakdown_at: Option<usize>,
    /// Infinity norm of exact minus Krylov over all scored nodes.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_abs_diff: Option<f64>,
    /// Scalar result of the tnc and pair measures.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub krylov_value: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// JSON document printed by `rank --format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOutput {
    pub config: RunConfig,
    pub scores: Vec<ScoreRow>,
    pub ranking: Vec<TensorIndex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakdown_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOutput {
    pub config: RunConfig,
    pub rows: Vec<ConvergenceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInfo {
    pub n_nodes: usize,
    pub n_layers: usize,
    pub edges: usize,
    pub nonzeros: usize,
    pub symmetric: bool,
    pub density: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_error: Option<String>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_from_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return e.exit_code();
    }
    match run(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, Error::SizeCap { .. }) {
                let _ = writeln!(err, "hint: `rank --mode krylov --stabilize` needs no exact evaluation");
            }
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::domain(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    if n == 0 {
        return Err(Error::domain(format!("{THREADS_ENV} must be positive")));
    }
    // A second call in the same process keeps the first pool, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Rank(args) => cmd_rank(args, out),
        Command::Convergence(args) => cmd_convergence(args, out),
        Command::Info(args) => cmd_info(args, out),
    }
}

pub fn load(input: &InputArgs) -> Result<AdjacencyTensor> {
    let opts = ParseOptions { strict: input.strict };
    match (&input.input, &input.builtin) {
        (Some(path), None) => parse_edge_list(BufReader::new(File::open(path)?), opts),
        (None, Some(name)) => builtin(name),
        _ => Err(Error::domain("exactly one of --input and --builtin is required")),
    }
}

fn source_name(input: &InputArgs) -> String {
    match (&input.input, &input.builtin) {
        (Some(p), _) => p.display().to_string(),
        (_, Some(b)) => format!("builtin:{b}"),
        _ => String::new(),
    }
}

fn require_nonzero(a: &AdjacencyTensor) -> Result<()> {
    if a.is_zero() {
        return Err(Error::domain("zero tensor: the network has no edges"));
    }
    Ok(())
}

fn round_to(x: f64, precision: usize) -> f64 {
    let p = 10f64.powi(precision.min(15) as i32);
    let r = (x * p).round() / p;
    if r.is_finite() {
        r
    } else {
        x
    }
}

fn base_config(input: &InputArgs, m: &MeasureArgs, precision: usize) -> RunConfig {
    let needs_alpha = m.measure.uses_resolvent()
        || (m.measure == MeasureKind::PairCommunicability && m.pair_resolvent);
    let subgraph = matches!(
        m.measure,
        MeasureKind::SubgraphCentralityExp | MeasureKind::SubgraphCentralityRes
    );
    RunConfig {
        input: source_name(input),
        measure: m.measure,
        alpha: needs_alpha.then(|| m.alpha.to_string()),
        beta: (!needs_alpha).then_some(m.beta),
        shift: if m.shifted { ShiftConvention::Shifted } else { ShiftConvention::Full },
        mode: None,
        m: None,
        m_max: None,
        block_size: subgraph.then_some(m.block_size),
        augment: subgraph.then_some(m.augment),
        precision,
        top: None,
    }
}

/// Replaces a relative alpha by its absolute value so that `lambda_max` is estimated once.
fn pin_alpha(request: &mut MeasureRequest, a: &AdjacencyTensor) -> Result<(Option<f64>, Option<f64>)> {
    let needs = request.kind.uses_resolvent()
        || (request.kind == MeasureKind::PairCommunicability && request.pair_resolvent);
    if !needs {
        return Ok((None, None));
    }
    let (alpha, est) = request.alpha.resolve(a)?;
    request.alpha = Alpha::Absolute(alpha);
    Ok((Some(alpha), est.map(|e| e.lambda_max.abs())))
}

fn max_abs_diff(exact: &CentralityReport, krylov: &CentralityReport) -> f64 {
    let scores = exact
        .scores
        .iter()
        .zip(&krylov.scores)
        .map(|(e, k)| (e.score - k.score).abs());
    let scalar = match (exact.value, krylov.value) {
        (Some(e), Some(k)) => (e - k).abs(),
        _ => 0.0,
    };
    scores.fold(scalar, f64::max)
}

fn cmd_rank(args: &RankArgs, out: &mut dyn Write) -> Result<()> {
    let a = load(&args.input)?;
    require_nonzero(&a)?;
    let mut request = args.measure.request()?;
    let (alpha, lambda) = pin_alpha(&mut request, &a)?;
    let precision = args.output.precision;

    let mut diag = Diagnostics { alpha, lambda_max: lambda, ..Diagnostics::default() };
    let exact = match args.mode {
        ModeArg::Exact | ModeArg::Both => Some(request.evaluate(&a, Mode::Exact)?),
        ModeArg::Krylov => None,
    };
    let krylov = match args.mode {
        ModeArg::Exact => None,
        ModeArg::Krylov | ModeArg::Both if args.stabilize => {
            let s = stabilize_ranking(&request, &a, args.top, args.m_max)?;
            diag.stabilized = Some(s.m.is_some());
            if s.m.is_none() {
                diag.warnings.push(format!("top-{} ranking did not stabilize up to m = {}", args.top, args.m_max));
            }
            Some(s.report)
        }
        ModeArg::Krylov | ModeArg::Both => Some(request.evaluate(&a, Mode::Krylov { m: args.m })?),
    };
    if let Some(k) = &krylov {
        if let Mode::Krylov { m } = k.parameters.mode {
            diag.m_used = Some(m);
        }
        diag.breakdown_at = k.breakdown_at;
        diag.warnings.extend(k.warnings.iter().cloned());
        diag.krylov_value = k.value;
    }
    if let (Some(e), Some(k)) = (&exact, &krylov) {
        diag.max_abs_diff = Some(max_abs_diff(e, k));
    }
    let primary = exact.as_ref().or(krylov.as_ref()).expect("some mode ran");
    diag.value = primary.value;
    if exact.is_some() {
        if let Some(l) = primary.parameters.lambda_max {
            diag.lambda_max.get_or_insert(l);
        }
    }

    let mut config = base_config(&args.input, &args.measure, precision);
    config.mode = Some(args.mode);
    config.top = Some(args.top);
    if args.mode != ModeArg::Exact {
        config.m = Some(args.m);
        if args.stabilize {
            config.m_max = Some(args.m_max);
        }
    }

    let pairing = exact.is_some() && krylov.is_some();
    let krylov_of = |idx: TensorIndex| krylov.as_ref().and_then(|k| k.score(idx));
    let rows: Vec<ScoreRow> = primary
        .ranking
        .iter()
        .take(args.top)
        .map(|&idx| {
            let score = primary.score(idx).expect("ranked index has a score");
            let k = if pairing { krylov_of(idx) } else { None };
            ScoreRow {
                node: idx.node,
                layer: idx.layer,
                score: round_to(score, precision),
                krylov: k.map(|x| round_to(x, precision)),
                abs_diff: k.map(|x| (score - x).abs()),
            }
        })
        .collect();

    match args.output.format {
        Format::Json => {
            let doc = RankOutput {
                config,
                scores: rows,
                ranking: primary.ranking.iter().take(args.top).copied().collect(),
                diagnostics: Some(round_diagnostics(diag, precision)),
            };
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(json_error)?;
            writeln!(out)?;
        }
        Format::Csv => write_rank_csv(out, primary, &rows, &diag, pairing, precision)?,
    }
    Ok(())
}

fn round_diagnostics(mut d: Diagnostics, precision: usize) -> Diagnostics {
    d.value = d.value.map(|v| round_to(v, precision));
    d.krylov_value = d.krylov_value.map(|v| round_to(v, precision));
    d
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_rank_csv(
    out: &mut dyn Write,
    report: &CentralityReport,
    rows: &[ScoreRow],
    diag: &Diagnostics,
    pairing: bool,
    precision: usize,
) -> Result<()> {
    let fmt = |x: f64| format!("{x:.precision$}");
    let mut w = csv::Writer::from_writer(out);
    if let Some(value) = report.value {
        if pairing {
            w.write_record(["measure", "exact", "krylov", "abs_diff"]).map_err(csv_error)?;
            let k = diag.krylov_value.unwrap_or(f64::NAN);
            w.write_record([
                report.kind.short_name().to_string(),
                fmt(value),
                fmt(k),
                format!("{:.3e}", (value - k).abs()),
            ])
            .map_err(csv_error)?;
        } else {
            w.write_record(["measure", "value"]).map_err(csv_error)?;
            w.write_record([report.kind.short_name().to_string(), fmt(value)]).map_err(csv_error)?;
        }
    } else if pairing {
        w.write_record(["rank", "node", "layer", "exact", "krylov", "abs_diff"]).map_err(csv_error)?;
        for (i, r) in rows.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                r.node.to_string(),
                r.layer.to_string(),
                fmt(r.score),
                fmt(r.krylov.unwrap_or(f64::NAN)),
                format!("{:.3e}", r.abs_diff.unwrap_or(f64::NAN)),
            ])
            .map_err(csv_error)?;
        }
    } else {
        w.write_record(["rank", "node", "layer", "score"]).map_err(csv_error)?;
        for (i, r) in rows.iter().enumerate() {
            w.write_record([(i + 1).to_string(), r.node.to_string(), r.layer.to_string(), fmt(r.score)])
                .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_convergence(args: &ConvergenceArgs, out: &mut dyn Write) -> Result<()> {
    if args.m_max == 0 {
        return Err(Error::domain("--m-max must be at least 1"));
    }
    let a = load(&args.input)?;
    require_nonzero(&a)?;
    let mut request = args.measure.request()?;
    pin_alpha(&mut request, &a)?;
    let exact = request.evaluate(&a, Mode::Exact)?;
    let mut rows = Vec::with_capacity(args.m_max);
    for m in 1..=args.m_max {
        let k = request.evaluate(&a, Mode::Krylov { m })?;
        rows.push(ConvergenceRow { m, error: max_abs_diff(&exact, &k), breakdown_at: k.breakdown_at });
    }

    let mut config = base_config(&args.input, &args.measure, args.output.precision);
    config.m_max = Some(args.m_max);
    match args.output.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &ConvergenceOutput { config, rows }).map_err(json_error)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["m", "inf_error"]).map_err(csv_error)?;
            for r in &rows {
                w.write_record([r.m.to_string(), format!("{:.6e}", r.error)]).map_err(csv_error)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn network_info(a: &AdjacencyTensor) -> NetworkInfo {
    let n = a.dims().len() as f64;
    let (lambda_max, lambda_residual, lambda_error) =
        match estimate_lambda_max(a, DEFAULT_LAMBDA_TOL, DEFAULT_LAMBDA_MAX_ITER) {
            Ok(est) => (Some(est.lambda_max), Some(est.residual), None),
            Err(e) => (None, None, Some(e.to_string())),
        };
    NetworkInfo {
        n_nodes: a.n_nodes(),
        n_layers: a.n_layers(),
        edges: a.edge_count(),
        nonzeros: a.nnz(),
        symmetric: a.is_symmetric(),
        density: a.nnz() as f64 / (n * n),
        lambda_max,
        lambda_residual,
        lambda_error,
    }
}

fn cmd_info(args: &InfoArgs, out: &mut dyn Write) -> Result<()> {
    let info = network_info(&load(&args.input)?);
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &info).map_err(json_error)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["key", "value"]).map_err(csv_error)?;
            let mut put = |k: &str, v: String| w.write_record([k, v.as_str()]).map_err(csv_error);
            put("n_nodes", info.n_nodes.to_string())?;
            put("n_layers", info.n_layers.to_string())?;
            put("edges", info.edges.to_string())?;
            put("nonzeros", info.nonzeros.to_string())?;
            put("symmetric", info.symmetric.to_string())?;
            put("density", format!("{:.6}", info.density))?;
            match (&info.lambda_max, &info.lambda_residual, &info.lambda_error) {
                (Some(l), Some(r), _) => {
                    put("lambda_max", format!("{l:.10}"))?;
                    put("lambda_residual", format!("{r:.3e}"))?;
                }
                (_, _, Some(e)) => put("lambda_max", format!("unavailable ({e})"))?,
                _ => {}
            }
            w.flush()?;
        }
    }
    Ok(())
}
