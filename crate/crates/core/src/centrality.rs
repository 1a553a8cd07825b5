//! Walk-based centrality measures for node-layer pairs.
//!
//! Every measure is a bilinear read-out `X *_2 f(A) *_2 Y` of a tensor function:
//!
//! | measure | `f` | read-out |
//! |---|---|---|
//! | total communicability (MTC) | `exp(beta A)` | `E_{i,l} *_2 f(A) *_2 E` |
//! | Katz (MKC) | `(I - alpha A)^{-1}` | `E_{i,l} *_2 f(A) *_2 E` |
//! | subgraph (MSC) | exp or resolvent | `E_{i,l} *_2 f(A) *_2 E_{i,l}` |
//! | pair communicability | exp or resolvent | `E_{i,l} *_2 f(A) *_2 E_{j,k}` |
//! | total network communicability | `exp(beta A)` | `E *_2 f(A) *_2 E` |
//!
//! [`ShiftConvention::Shifted`] subtracts the identity (`exp - I`, `res - I`), which
//! lowers every subgraph score by 1 and every total score by 1.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::{approx_function_times_block, block_approx_function, Augmentation};
use crate::matrix_functions::{
    apply_spec, estimate_lambda_max, FunctionSpec, SpectralEstimate, DEFAULT_LAMBDA_MAX_ITER,
    DEFAULT_LAMBDA_TOL,
};
use crate::tensor::{AdjacencyTensor, BlockTensor, BlockVector, TensorIndex};

/// Largest `NL` for which dense `NL x NL` evaluation is attempted by default.
pub const DEFAULT_DENSE_CAP: usize = 5000;
/// Nodes per block in the block Krylov path.
pub const DEFAULT_BLOCK_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    #[serde(rename = "mtc")]
    TotalCommunicabilityPerNode,
    #[serde(rename = "tnc")]
    TotalNetworkCommunicability,
    #[serde(rename = "mkc")]
    KatzCentrality,
    #[serde(rename = "msc_exp")]
    SubgraphCentralityExp,
    #[serde(rename = "msc_res")]
    SubgraphCentralityRes,
    #[serde(rename = "pair")]
    PairCommunicability,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::TotalCommunicabilityPerNode,
        MeasureKind::TotalNetworkCommunicability,
        MeasureKind::KatzCentrality,
        MeasureKind::SubgraphCentralityExp,
        MeasureKind::SubgraphCentralityRes,
        MeasureKind::PairCommunicability,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            MeasureKind::TotalCommunicabilityPerNode => "mtc",
            MeasureKind::TotalNetworkCommunicability => "tnc",
            MeasureKind::KatzCentrality => "mkc",
            MeasureKind::SubgraphCentralityExp => "msc-exp",
            MeasureKind::SubgraphCentralityRes => "msc-res",
            MeasureKind::PairCommunicability => "pair",
        }
    }

    /// Whether the measure is built on the resolvent (and so needs `alpha`).
    pub fn uses_resolvent(self) -> bool {
        matches!(self, MeasureKind::KatzCentrality | MeasureKind::SubgraphCentralityRes)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.short_name() == norm)
            .ok_or_else(|| Error::domain(format!("unknown measure {s:?} (expected mtc, tnc, mkc, msc-exp, msc-res or pair)")))
    }
}

/// Whether the identity is subtracted from `exp` and the resolvent before the read-out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftConvention {
    /// `exp(beta A)` and `(I - alpha A)^{-1}`.
    #[default]
    Full,
    /// `exp(beta A) - I` and `(I - alpha A)^{-1} - I`.
    Shifted,
}

impl ShiftConvention {
    pub fn exp(self, beta: f64) -> FunctionSpec {
        match self {
            ShiftConvention::Full => FunctionSpec::Exp { beta },
            ShiftConvention::Shifted => FunctionSpec::Exp0 { beta },
        }
    }

    pub fn resolvent(self, alpha: f64) -> FunctionSpec {
        match self {
            ShiftConvention::Full => FunctionSpec::Resolvent { alpha },
            ShiftConvention::Shifted => FunctionSpec::Resolvent0 { alpha },
        }
    }
}

/// Exact dense evaluation, or `m` Arnoldi steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Krylov { m: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Krylov { m } => write!(f, "krylov(m={m})"),
        }
    }
}

/// Resolvent damping, either absolute or as `c / lambda_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha {
    Absolute(f64),
    Relative(f64),
}

impl Alpha {
    /// The absolute value of alpha, estimating `lambda_max` when it is relative.
    pub fn resolve(self, a: &AdjacencyTensor) -> Result<(f64, Option<SpectralEstimate>)> {
        match self {
            Alpha::Absolute(x) => Ok((x, None)),
            Alpha::Relative(c) => {
                let est = estimate_lambda_max(a, DEFAULT_LAMBDA_TOL, DEFAULT_LAMBDA_MAX_ITER)?;
                if est.lambda_max.abs() == 0.0 {
                    return Err(Error::domain("relative alpha needs a nonzero dominant eigenvalue"));
                }
                Ok((c / est.lambda_max.abs(), Some(est)))
            }
        }
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha::Relative(0.5)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Absolute(x) => write!(f, "{x}"),
            Alpha::Relative(c) => write!(f, "{c}rel"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    /// `0.25` is absolute, `0.5rel` means `0.5 / lambda_max`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, relative) = match s.strip_suffix("rel") {
            Some(head) => (head.trim(), true),
            None => (s, false),
        };
        let x: f64 = num
            .parse()
            .map_err(|_| Error::domain(format!("invalid alpha {s:?} (expected <x> or <c>rel)")))?;
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::domain(format!("alpha must be positive, got {s}")));
        }
        Ok(if relative { Alpha::Relative(x) } else { Alpha::Absolute(x) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeScore {
    pub node: usize,
    pub layer: usize,
    pub score: f64,
}

impl NodeScore {
    pub fn index(&self) -> TensorIndex {
        TensorIndex::new(self.node, self.layer)
    }
}

/// Parameters a report was computed with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    /// Estimated dominant eigenvalue, when one was needed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_max: Option<f64>,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub augmentation: Option<Augmentation>,
    pub shift: ShiftConvention,
}

impl Parameters {
    fn new(mode: Mode, shift: ShiftConvention) -> Self {
        Parameters {
            alpha: None,
            beta: None,
            lambda_max: None,
            mode,
            block_size: None,
            augmentation: None,
            shift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub kind: MeasureKind,
    pub parameters: Parameters,
    /// Per node-layer scores in the order they were requested.
    pub scores: Vec<NodeScore>,
    /// Score keys by descending score.
    pub ranking: Vec<TensorIndex>,
    /// Scalar result for whole-network and pair measures.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    /// `pairwise[a][b] = E_a *_2 f(A) *_2 E_b` over the scored nodes (subgraph measures).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairwise: Option<Vec<Vec<f64>>>,
    /// First Krylov step that broke down, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakdown_at: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl CentralityReport {
    fn new(kind: MeasureKind, parameters: Parameters, scores: Vec<NodeScore>) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !s.score.is_finite()) {
            return Err(Error::Overflow(format!(
                "non-finite score at ({},{})",
                bad.node, bad.layer
            )));
        }
        let ranking = rank(&scores);
        Ok(CentralityReport {
            kind,
            parameters,
            scores,
            ranking,
            value: None,
            pairwise: None,
            breakdown_at: None,
            warnings: Vec::new(),
        })
    }

    pub fn score(&self, idx: TensorIndex) -> Option<f64> {
        self.scores.iter().find(|s| s.index() == idx).map(|s| s.score)
    }

    /// The first `k` entries of the ranking.
    pub fn top(&self, k: usize) -> &[TensorIndex] {
        &self.ranking[..k.min(self.ranking.len())]
    }
}

/// Indices sorted by descending score; ties go to the smaller `(layer, node)`.
///
/// Scores are compared after rounding to 12 significant digits, so values that are
/// equal in exact arithmetic but differ by rounding (automorphic nodes) count as ties.
pub fn rank(scores: &[NodeScore]) -> Vec<TensorIndex> {
    let mut order: Vec<(f64, &NodeScore)> = scores.iter().map(|s| (rank_key(s.score), s)).collect();
    order.sort_by(|(ka, a), (kb, b)| {
        kb.total_cmp(ka)
            .then_with(|| a.index().layer_major_key().cmp(&b.index().layer_major_key()))
    });
    order.into_iter().map(|(_, s)| s.index()).collect()
}

fn rank_key(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    let p = 10f64.powi(digits);
    let r = (x * p).round() / p;
    if r.is_finite() {
        r
    } else {
        x
    }
}

/// Flattened `f(A)` by dense evaluation, refusing when `NL > cap`.
pub fn exact_tensor_function(a: &AdjacencyTensor, spec: &FunctionSpec, cap: usize) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = a.dims().len();
    if n > cap {
        return Err(Error::SizeCap { size: n, cap });
    }
    apply_spec(&a.to_dense(), spec)
}

/// Refuses resolvent specs with `alpha * |lambda_max| >= 1`. Returns the estimate used.
pub fn check_resolvent(a: &AdjacencyTensor, spec: &FunctionSpec) -> Result<Option<f64>> {
    let Some(alpha) = spec.alpha() else {
        return Ok(None);
    };
    if a.is_zero() {
        return Ok(Some(0.0));
    }
    let lambda = estimate_lambda_max(a, DEFAULT_LAMBDA_TOL, DEFAULT_LAMBDA_MAX_ITER)?.lambda_max.abs();
    check_alpha(alpha, lambda)?;
    Ok(Some(lambda))
}

fn clamp_steps(a: &AdjacencyTensor, m: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::domain("number of Krylov steps must be at least 1"));
    }
    Ok(m.min(a.dims().len()))
}

/// `f(A) *_2 E` read out at every node-layer pair.
fn row_sum_scores(
    a: &AdjacencyTensor,
    spec: &FunctionSpec,
    mode: Mode,
) -> Result<(Vec<NodeScore>, Mode, Option<usize>)> {
    let dims = a.dims();
    let (values, mode, breakdown) = match mode {
        Mode::Exact => {
            let f = exact_tensor_function(a, spec, DEFAULT_DENSE_CAP)?;
            let ones = nalgebra::DVector::from_element(dims.len(), 1.0);
            ((f * ones).as_slice().to_vec(), mode, None)
        }
        Mode::Krylov { m } => {
            let m = clamp_steps(a, m)?;
            let approx = approx_function_times_block(a, &BlockVector::ones(dims), m, spec)?;
            (approx.block.into_vec(), Mode::Krylov { m }, approx.breakdown_at)
        }
    };
    let scores = dims
        .indices()
        .zip(values)
        .map(|(idx, score)| NodeScore { node: idx.node, layer: idx.layer, score })
        .collect();
    Ok((scores, mode, breakdown))
}

/// Multilayer total communicability `E_{i,l} *_2 exp(beta A) *_2 E` of every node-layer pair.
pub fn total_communicability_per_node(
    a: &AdjacencyTensor,
    beta: f64,
    mode: Mode,
    shift: ShiftConvention,
) -> Result<CentralityReport> {
    let spec = shift.exp(beta);
    spec.validate()?;
    let (scores, mode, breakdown) = row_sum_scores(a, &spec, mode)?;
    let mut params = Parameters::new(mode, shift);
    params.beta = Some(beta);
    let mut report = CentralityReport::new(MeasureKind::TotalCommunicabilityPerNode, params, scores)?;
    report.breakdown_at = breakdown;
    Ok(report)
}

/// Multilayer Katz centrality `E_{i,l} *_2 (I - alpha A)^{-1} *_2 E`.
pub fn katz_centrality(
    a: &AdjacencyTensor,
    alpha: Alpha,
    mode: Mode,
    shift: ShiftConvention,
) -> Result<CentralityReport> {
    let (alpha_abs, estimate) = alpha.resolve(a)?;
    let spec = shift.resolvent(alpha_abs);
    spec.validate()?;
    let lambda = match estimate {
        Some(est) => {
            check_alpha(alpha_abs, est.lambda_max.abs())?;
            Some(est.lambda_max.abs())
        }
        None => check_resolvent(a, &spec)?,
    };
    let (scores, mode, breakdown) = row_sum_scores(a, &spec, mode)?;
    let mut params = Parameters::new(mode, shift);
    params.alpha = Some(alpha_abs);
    params.lambda_max = lambda;
    let mut report = CentralityReport::new(MeasureKind::KatzCentrality, params, scores)?;
    report.breakdown_at = breakdown;
    Ok(report)
}

fn check_alpha(alpha: f64, lambda: f64) -> Result<()> {
    if alpha * lambda >= 1.0 {
        return Err(Error::domain(format!(
            "alpha = {alpha} is outside the convergence range: alpha * lambda_max = {} >= 1 (lambda_max = {lambda})",
            alpha * lambda
        )));
    }
    Ok(())
}

/// Block Krylov settings for [`subgraph_centralities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOptions {
    /// Nodes per batch `R`.
    pub block_size: usize,
    pub augmentation: Augmentation,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions {
            block_size: DEFAULT_BLOCK_SIZE,
            augmentation: Augmentation::None,
        }
    }
}

/// Subgraph centralities `E_{i,l} *_2 f(A) *_2 E_{i,l}` of `nodes`, plus the pairwise
/// communicabilities between them.
///
/// In Krylov mode the nodes are processed `R` at a time with the block process. Each
/// block slice approximates a whole column of `f(A)`, so pairwise values between any two
/// requested nodes come without extra contractions.
pub fn subgraph_centralities(
    a: &AdjacencyTensor,
    nodes: &[TensorIndex],
    spec: &FunctionSpec,
    mode: Mode,
    block: BlockOptions,
) -> Result<CentralityReport> {
    spec.validate()?;
    if nodes.is_empty() {
        return Err(Error::domain("no nodes requested"));
    }
    if block.block_size == 0 {
        return Err(Error::domain("block size must be at least 1"));
    }
    let dims = a.dims();
    let offsets = nodes
        .iter()
        .map(|&n| dims.offset(n))
        .collect::<Result<Vec<_>>>()?;
    let lambda = check_resolvent(a, spec)?;

    let kind = if spec.is_resolvent() {
        MeasureKind::SubgraphCentralityRes
    } else {
        MeasureKind::SubgraphCentralityExp
    };
    let shift = if spec.is_shifted() { ShiftConvention::Shifted } else { ShiftConvention::Full };
    let mut params = Parameters::new(mode, shift);
    params.alpha = spec.alpha();
    params.beta = spec.beta();
    params.lambda_max = lambda;

    let k = nodes.len();
    let mut pairwise = vec![vec![0.0; k]; k];
    let mut breakdown_at: Option<usize> = None;
    match mode {
        Mode::Exact => {
            let f = exact_tensor_function(a, spec, DEFAULT_DENSE_CAP)?;
            for (r, &oi) in offsets.iter().enumerate() {
                for (c, &oj) in offsets.iter().enumerate() {
                    pairwise[r][c] = f[(oi, oj)];
                }
            }
        }
        Mode::Krylov { m } => {
            let m = clamp_steps(a, m)?;
            params.mode = Mode::Krylov { m };
            params.block_size = Some(block.block_size);
            params.augmentation = Some(block.augmentation);
            let extra = block.augmentation.slice(dims);
            for (batch_no, batch) in nodes.chunks(block.block_size).enumerate() {
                let mut start = BlockTensor::units(dims, batch)?;
                if let Some(e) = &extra {
                    start = start.with_slice(e)?;
                }
                let approx = block_approx_function(a, &start, m, spec)?;
                if let Some(b) = approx.breakdown_at {
                    breakdown_at = Some(breakdown_at.map_or(b, |x| x.min(b)));
                }
                for c_local in 0..batch.len() {
                    let c = batch_no * block.block_size + c_local;
                    let column = approx.block.slice(c_local);
                    for (r, &oi) in offsets.iter().enumerate() {
                        pairwise[r][c] = column.as_slice()[oi];
                    }
                }
            }
        }
    }

    let scores = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| NodeScore { node: n.node, layer: n.layer, score: pairwise[i][i] })
        .collect();
    let mut report = CentralityReport::new(kind, params, scores)?;
    if let (Some(b), Augmentation::None, Mode::Krylov { .. }) = (breakdown_at, block.augmentation, mode) {
        report.warnings.push(format!(
            "block Krylov process deflated at step {b}; results may be inaccurate, consider dense augmentation"
        ));
    }
    report.breakdown_at = breakdown_at;
    report.pairwise = Some(pairwise);
    Ok(report)
}

/// `E *_2 exp(beta A) *_2 E`, the sum of all per-node total communicabilities.
pub fn total_network_communicability(
    a: &AdjacencyTensor,
    beta: f64,
    mode: Mode,
    shift: ShiftConvention,
) -> Result<f64> {
    let report = total_communicability_per_node(a, beta, mode, shift)?;
    Ok(report.scores.iter().map(|s| s.score).sum())
}

/// `E_{from} *_2 f(A) *_2 E_{to}`.
pub fn pair_communicability(
    a: &AdjacencyTensor,
    from: TensorIndex,
    to: TensorIndex,
    spec: &FunctionSpec,
    mode: Mode,
) -> Result<f64> {
    spec.validate()?;
    let dims = a.dims();
    let (oi, oj) = (dims.offset(from)?, dims.offset(to)?);
    check_resolvent(a, spec)?;
    match mode {
        Mode::Exact => Ok(exact_tensor_function(a, spec, DEFAULT_DENSE_CAP)?[(oi, oj)]),
        Mode::Krylov { m } => {
            let m = clamp_steps(a, m)?;
            let v = BlockVector::unit(dims, to)?;
            Ok(approx_function_times_block(a, &v, m, spec)?.block.as_slice()[oi])
        }
    }
}

/// Everything needed to evaluate one measure, independent of the evaluation mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRequest {
    pub kind: MeasureKind,
    pub beta: f64,
    pub alpha: Alpha,
    pub shift: ShiftConvention,
    /// Nodes scored by subgraph measures; all node-layer pairs when `None`.
    pub nodes: Option<Vec<TensorIndex>>,
    /// Endpoints of the pair measure.
    pub pair: Option<(TensorIndex, TensorIndex)>,
    /// The pair measure reads the resolvent instead of the exponential.
    pub pair_resolvent: bool,
    pub block: BlockOptions,
}

impl MeasureRequest {
    pub fn new(kind: MeasureKind) -> Self {
        MeasureRequest {
            kind,
            beta: 1.0,
            alpha: Alpha::default(),
            shift: ShiftConvention::Full,
            nodes: None,
            pair: None,
            pair_resolvent: false,
            block: BlockOptions::default(),
        }
    }

    /// The function this measure reads out, with `alpha` already made absolute.
    pub fn spec(&self, alpha: f64) -> FunctionSpec {
        match self.kind {
            MeasureKind::KatzCentrality | MeasureKind::SubgraphCentralityRes => self.shift.resolvent(alpha),
            MeasureKind::PairCommunicability if self.pair_resolvent => self.shift.resolvent(alpha),
            _ => self.shift.exp(self.beta),
        }
    }

    pub fn evaluate(&self, a: &AdjacencyTensor, mode: Mode) -> Result<CentralityReport> {
        match self.kind {
            MeasureKind::TotalCommunicabilityPerNode => total_communicability_per_node(a, self.beta, mode, self.shift),
            MeasureKind::KatzCentrality => katz_centrality(a, self.alpha, mode, self.shift),
            MeasureKind::TotalNetworkCommunicability => {
                let mut report = total_communicability_per_node(a, self.beta, mode, self.shift)?;
                report.kind = MeasureKind::TotalNetworkCommunicability;
                report.value = Some(report.scores.iter().map(|s| s.score).sum());
                Ok(report)
            }
            MeasureKind::SubgraphCentralityExp | MeasureKind::SubgraphCentralityRes => {
                let (alpha, lambda) = self.resolved_alpha(a)?;
                let all: Vec<TensorIndex>;
                let nodes = match &self.nodes {
                    Some(n) => n.as_slice(),
                    None => {
                        all = a.dims().indices().collect();
                        &all
                    }
                };
                let mut report = subgraph_centralities(a, nodes, &self.spec(alpha), mode, self.block)?;
                if report.parameters.lambda_max.is_none() {
                    report.parameters.lambda_max = lambda;
                }
                Ok(report)
            }
            MeasureKind::PairCommunicability => {
                let (from, to) = self
                    .pair
                    .ok_or_else(|| Error::domain("pair communicability needs both endpoints"))?;
                let (alpha, lambda) = self.resolved_alpha(a)?;
                let spec = self.spec(alpha);
                let value = pair_communicability(a, from, to, &spec, mode)?;
                let mode = match mode {
                    Mode::Krylov { m } => Mode::Krylov { m: clamp_steps(a, m)? },
                    Mode::Exact => Mode::Exact,
                };
                let mut params = Parameters::new(mode, self.shift);
                params.alpha = spec.alpha();
                params.beta = spec.beta();
                params.lambda_max = lambda;
                let mut report = CentralityReport::new(MeasureKind::PairCommunicability, params, Vec::new())?;
                report.value = Some(value);
                Ok(report)
            }
        }
    }
}

impl MeasureRequest {
    fn needs_alpha(&self) -> bool {
        self.kind.uses_resolvent() || (self.kind == MeasureKind::PairCommunicability && self.pair_resolvent)
    }

    fn resolved_alpha(&self, a: &AdjacencyTensor) -> Result<(f64, Option<f64>)> {
        if !self.needs_alpha() {
            return Ok((0.0, None));
        }
        let (alpha, est) = self.alpha.resolve(a)?;
        Ok((alpha, est.map(|e| e.lambda_max.abs())))
    }
}

/// Outcome of [`stabilize_ranking`].
#[derive(Debug, Clone)]
pub struct Stabilized {
    /// The accepted number of steps, `None` when `m_max` was reached first.
    pub m: Option<usize>,
    /// Largest score change between the last two step counts.
    pub increment: f64,
    pub report: CentralityReport,
}

/// Increases the number of Krylov steps until the top-`k` ranking is settled, up to
/// `m_max`. Needs no exact evaluation.
///
/// Step `m` is accepted when the top-`k` equals the one at `m - 1` and no score moved by
/// more than half the smallest gap between consecutive scores among the leading `k + 1`.
/// The increment stands in for the unknown error, so a repeated order whose neighbours
/// could still trade places is not accepted. Scores equal to within `1e-10` relative are
/// ties, ordered by the tie-break rule.
pub fn stabilize_ranking(
    request: &MeasureRequest,
    a: &AdjacencyTensor,
    top_k: usize,
    m_max: usize,
) -> Result<Stabilized> {
    if m_max == 0 {
        return Err(Error::domain("m_max must be at least 1"));
    }
    let m_max = m_max.min(a.dims().len());
    let mut prev = request.evaluate(a, Mode::Krylov { m: 1 })?;
    let mut increment = f64::INFINITY;
    for m in 2..=m_max {
        let next = request.evaluate(a, Mode::Krylov { m })?;
        increment = prev
            .scores
            .iter()
            .zip(&next.scores)
            .map(|(p, n)| (p.score - n.score).abs())
            .fold(0.0, f64::max);
        if next.top(top_k) == prev.top(top_k) && increment < 0.5 * smallest_gap(&next, top_k) {
            return Ok(Stabilized { m: Some(m), increment, report: next });
        }
        prev = next;
    }
    Ok(Stabilized { m: None, increment, report: prev })
}

/// Smallest nonzero gap between consecutive scores among the leading `k + 1`.
fn smallest_gap(report: &CentralityReport, k: usize) -> f64 {
    let lead: Vec<f64> = report
        .ranking
        .iter()
        .take(k + 1)
        .map(|&i| report.score(i).expect("ranked index has a score"))
        .collect();
    let scale = lead.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    lead.windows(2)
        .map(|w| w[0] - w[1])
        .filter(|&g| g > 1e-10 * scale)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{builtin_example1, RandomNetwork};
    use crate::tensor::Dims;
    use nalgebra::SymmetricEigen;

    const TOL: f64 = 5e-4;

    /// Rows `i = 1..5`, columns `l = 1, 2`.
    const MTC: [[f64; 2]; 5] = [
        [12.2520, 7.7379],
        [9.6537, 17.2450],
        [8.9474, 11.7351],
        [10.8250, 4.2550],
        [10.6175, 10.6175],
    ];
    const MKC: [[f64; 2]; 5] = [
        [2.1131, 1.7044],
        [1.8145, 2.5454],
        [1.7645, 1.9484],
        [1.8876, 1.3470],
        [1.8774, 1.8774],
    ];
    const MSC_EXP: [[f64; 2]; 5] = [
        [3.1001, 2.2834],
        [2.3582, 4.1313],
        [2.3946, 2.4698],
        [2.4174, 1.5922],
        [2.5001, 2.5001],
    ];
    const MSC_RES: [[f64; 2]; 5] = [
        [1.1507, 1.0952],
        [1.0987, 1.2165],
        [1.1003, 1.1039],
        [1.1016, 1.0454],
        [1.1051, 1.1051],
    ];

    fn check_table(report: &CentralityReport, table: &[[f64; 2]; 5]) {
        for (i, row) in table.iter().enumerate() {
            for (l, want) in row.iter().enumerate() {
                let got = report.score(TensorIndex::new(i + 1, l + 1)).unwrap();
                assert!((got - want).abs() < TOL, "{} ({},{}): {got} vs {want}", report.kind, i + 1, l + 1);
            }
        }
    }

    fn oracle_lambda() -> f64 {
        let e = SymmetricEigen::new(builtin_example1().to_dense()).eigenvalues;
        e.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    #[test]
    fn example1_total_and_katz() {
        let a = builtin_example1();
        let mtc = total_communicability_per_node(&a, 1.0, Mode::Exact, ShiftConvention::Full).unwrap();
        check_table(&mtc, &MTC);
        let mkc = katz_centrality(&a, Alpha::Relative(0.5), Mode::Exact, ShiftConvention::Full).unwrap();
        check_table(&mkc, &MKC);
        assert!((mkc.parameters.lambda_max.unwrap() - oracle_lambda()).abs() < 1e-7);
    }

    #[test]
    fn example1_subgraph() {
        let a = builtin_example1();
        let all: Vec<_> = a.dims().indices().collect();
        let alpha = 0.5 / oracle_lambda();
        let exp = subgraph_centralities(&a, &all, &FunctionSpec::Exp { beta: 1.0 }, Mode::Exact, BlockOptions::default())
            .unwrap();
        check_table(&exp, &MSC_EXP);
        let res = subgraph_centralities(&a, &all, &FunctionSpec::Resolvent { alpha }, Mode::Exact, BlockOptions::default())
            .unwrap();
        check_table(&res, &MSC_RES);
    }

    #[test]
    fn shifted_convention_misses_the_table() {
        let a = builtin_example1();
        let mtc = total_communicability_per_node(&a, 1.0, Mode::Exact, ShiftConvention::Shifted).unwrap();
        let full = total_communicability_per_node(&a, 1.0, Mode::Exact, ShiftConvention::Full).unwrap();
        for (s, f) in mtc.scores.iter().zip(&full.scores) {
            assert!((f.score - s.score - 1.0).abs() < 1e-12);
        }
        let got = mtc.score(TensorIndex::new(2, 2)).unwrap();
        assert!((got - MTC[1][1]).abs() > 0.5);
    }

    #[test]
    fn example1_rankings() {
        let a = builtin_example1();
        let all: Vec<_> = a.dims().indices().collect();
        let alpha = 0.5 / oracle_lambda();
        let reports = [
            total_communicability_per_node(&a, 1.0, Mode::Exact, ShiftConvention::Full).unwrap(),
            katz_centrality(&a, Alpha::Relative(0.5), Mode::Exact, ShiftConvention::Full).unwrap(),
            subgraph_centralities(&a, &all, &FunctionSpec::Exp { beta: 1.0 }, Mode::Exact, BlockOptions::default()).unwrap(),
            subgraph_centralities(&a, &all, &FunctionSpec::Resolvent { alpha }, Mode::Exact, BlockOptions::default()).unwrap(),
        ];
        for r in &reports {
            assert_eq!(r.ranking[0], TensorIndex::new(2, 2), "{}", r.kind);
            assert_eq!(*r.ranking.last().unwrap(), TensorIndex::new(4, 2), "{}", r.kind);
        }
        assert_eq!(reports[0].ranking[1], TensorIndex::new(1, 1));
        assert_eq!(reports[2].ranking[1], TensorIndex::new(1, 1));
    }

    #[test]
    fn twin_nodes_score_equally() {
        let a = builtin_example1();
        let (p, q) = (TensorIndex::new(5, 1), TensorIndex::new(5, 2));
        let mtc = total_communicability_per_node(&a, 1.0, Mode::Exact, ShiftConvention::Full).unwrap();
        assert!((mtc.score(p).unwrap() - mtc.score(q).unwrap()).abs() < 1e-10);
        let msc = subgraph_centralities(&a, &[p, q], &FunctionSpec::Resolvent0 { alpha: 0.1 }, Mode::Exact, BlockOptions::default())
            .unwrap();
        assert!((msc.scores[0].score - msc.scores[1].score).abs() < 1e-10);
    }

    #[test]
    fn single_edge_is_symmetric() {
        let dims = Dims::new(2, 1).unwrap();
        let a = AdjacencyTensor::from_entries(
            dims,
            [(TensorIndex::new(1, 1), TensorIndex::new(2, 1), 1.0), (TensorIndex::new(2, 1), TensorIndex::new(1, 1), 1.0)],
        )
        .unwrap();
        let r = total_communicability_per_node(&a, 1.0, Mode::Exact, ShiftConvention::Full).unwrap();
        assert_eq!(r.scores[0].score, r.scores[1].score);
        // exp([[0,1],[1,0]]) has row sums cosh 1 + sinh 1 = e.
        assert!((r.scores[0].score - std::f64::consts::E).abs() < 1e-13);
    }

    #[test]
    fn katz_rejects_large_alpha() {
        let a = builtin_example1();
        let err = katz_centrality(&a, Alpha::Relative(1.0), Mode::Exact, ShiftConvention::Full).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("lambda_max")));
        let err = katz_centrality(&a, Alpha::Absolute(0.5), Mode::Exact, ShiftConvention::Full).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn katz_small_alpha_limits() {
        let a = builtin_example1();
        let full = katz_centrality(&a, Alpha::Absolute(1e-9), Mode::Exact, ShiftConvention::Full).unwrap();
        let shifted = katz_centrality(&a, Alpha::Absolute(1e-9), Mode::Exact, ShiftConvention::Shifted).unwrap();
        assert!(full.scores.iter().all(|s| (s.score - 1.0).abs() < 1e-8));
        assert!(shifted.scores.iter().all(|s| s.score.abs() < 1e-8));
    }

    #[test]
    fn isolated_node_has_zero_shifted_scores() {
        let dims = Dims::new(3, 1).unwrap();
        let a = AdjacencyTensor::from_entries(
            dims,
            [(TensorIndex::new(1, 1), TensorIndex::new(2, 1), 1.0), (TensorIndex::new(2, 1), TensorIndex::new(1, 1), 1.0)],
        )
        .unwrap();
        let lonely = [TensorIndex::new(3, 1)];
        for mode in [Mode::Exact, Mode::Krylov { m: 2 }] {
            for spec in [FunctionSpec::Exp0 { beta: 1.0 }, FunctionSpec::Resolvent0 { alpha: 0.5 }] {
                let r = subgraph_centralities(&a, &lonely, &spec, mode, BlockOptions::default()).unwrap();
                assert_eq!(r.scores[0].score, 0.0);
            }
        }
        let p = pair_communicability(&a, TensorIndex::new(1, 1), TensorIndex::new(3, 1), &FunctionSpec::Exp0 { beta: 1.0 }, Mode::Exact)
            .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn total_network_is_sum_of_nodes() {
        let a = builtin_example1();
        let tnc = total_network_communicability(&a, 1.0, Mode::Exact, ShiftConvention::Full).unwrap();
        let table_sum: f64 = MTC.iter().flatten().sum();
        assert!((tnc - table_sum).abs() < 10.0 * TOL);

        let zero = AdjacencyTensor::zeros(a.dims());
        let full = total_network_communicability(&zero, 1.0, Mode::Exact, ShiftConvention::Full).unwrap();
        let shifted = total_network_communicability(&zero, 1.0, Mode::Exact, ShiftConvention::Shifted).unwrap();
        assert_eq!(full, 10.0);
        assert_eq!(shifted, 0.0);
    }

    #[test]
    fn pair_diagonal_is_subgraph() {
        let a = builtin_example1();
        let n = TensorIndex::new(3, 2);
        let spec = FunctionSpec::Exp { beta: 1.0 };
        let p = pair_communicability(&a, n, n, &spec, Mode::Exact).unwrap();
        let s = subgraph_centralities(&a, &[n], &spec, Mode::Exact, BlockOptions::default()).unwrap();
        assert_eq!(p, s.scores[0].score);
        let k = pair_communicability(&a, n, n, &spec, Mode::Krylov { m: 10 }).unwrap();
        assert!((k - p).abs() < 1e-10);
    }

    #[test]
    fn krylov_at_full_dimension_is_exact() {
        let a = RandomNetwork { n_nodes: 12, n_layers: 3, n_edges: 50, weights: Some((1.0, 2.0)), seed: 8 }
            .build()
            .unwrap();
        let exact = total_communicability_per_node(&a, 0.5, Mode::Exact, ShiftConvention::Full).unwrap();
        let kry = total_communicability_per_node(&a, 0.5, Mode::Krylov { m: 36 }, ShiftConvention::Full).unwrap();
        for (e, k) in exact.scores.iter().zip(&kry.scores) {
            assert!((e.score - k.score).abs() < 1e-8);
        }
        // m beyond NL is clamped.
        let clamped = total_communicability_per_node(&a, 0.5, Mode::Krylov { m: 500 }, ShiftConvention::Full).unwrap();
        assert_eq!(clamped.parameters.mode, Mode::Krylov { m: 36 });
    }

    #[test]
    fn block_subgraph_matches_exact() {
        let a = RandomNetwork { n_nodes: 15, n_layers: 2, n_edges: 40, weights: None, seed: 21 }.build().unwrap();
        let nodes: Vec<_> = [(1, 1), (4, 2), (9, 1), (15, 2), (7, 1)].iter().map(|&(n, l)| TensorIndex::new(n, l)).collect();
        let spec = FunctionSpec::Exp { beta: 0.5 };
        let exact = subgraph_centralities(&a, &nodes, &spec, Mode::Exact, BlockOptions::default()).unwrap();
        let opts = BlockOptions { block_size: 2, augmentation: Augmentation::Ones };
        let kry = subgraph_centralities(&a, &nodes, &spec, Mode::Krylov { m: 14 }, opts).unwrap();
        let (pe, pk) = (exact.pairwise.unwrap(), kry.pairwise.unwrap());
        for r in 0..nodes.len() {
            for c in 0..nodes.len() {
                assert!((pe[r][c] - pk[r][c]).abs() < 1e-8, "({r},{c})");
            }
        }
    }

    #[test]
    fn deflation_without_augmentation_warns() {
        let dims = Dims::new(3, 1).unwrap();
        let a = AdjacencyTensor::identity(dims);
        let r = subgraph_centralities(&a, &[TensorIndex::new(1, 1), TensorIndex::new(2, 1)], &FunctionSpec::Exp { beta: 1.0 }, Mode::Krylov { m: 2 }, BlockOptions::default())
            .unwrap();
        assert_eq!(r.breakdown_at, Some(1));
        assert_eq!(r.warnings.len(), 1);
        assert!((r.scores[0].score - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn ranking_ties_and_scaling() {
        let scores: Vec<_> = [(2, 2), (1, 2), (3, 1), (1, 1)]
            .iter()
            .map(|&(node, layer)| NodeScore { node, layer, score: 1.0 })
            .collect();
        let order = rank(&scores);
        let expected: Vec<_> = [(1, 1), (3, 1), (1, 2), (2, 2)].iter().map(|&(n, l)| TensorIndex::new(n, l)).collect();
        assert_eq!(order, expected);
        assert_eq!(rank(&scores[..1]), vec![TensorIndex::new(2, 2)]);

        let twins = [
            NodeScore { node: 5, layer: 2, score: 2.5001 + 4.0 * f64::EPSILON },
            NodeScore { node: 5, layer: 1, score: 2.5001 },
        ];
        assert_eq!(rank(&twins), vec![TensorIndex::new(5, 1), TensorIndex::new(5, 2)]);
        let close = [
            NodeScore { node: 1, layer: 2, score: 1.0 + 1e-9 },
            NodeScore { node: 1, layer: 1, score: 1.0 },
        ];
        assert_eq!(rank(&close)[0], TensorIndex::new(1, 2));

        let mixed: Vec<_> = (1..=6).map(|k| NodeScore { node: k, layer: 1, score: ((k * 7) % 5) as f64 }).collect();
        let scaled: Vec<_> = mixed.iter().map(|s| NodeScore { score: s.score * 3.5, ..*s }).collect();
        assert_eq!(rank(&mixed), rank(&scaled));
    }

    #[test]
    fn alpha_and_measure_parsing() {
        assert_eq!("0.5rel".parse::<Alpha>().unwrap(), Alpha::Relative(0.5));
        assert_eq!("0.25".parse::<Alpha>().unwrap(), Alpha::Absolute(0.25));
        assert!("-1".parse::<Alpha>().is_err());
        assert!("rel".parse::<Alpha>().is_err());
        assert_eq!(Alpha::Relative(0.4).to_string(), "0.4rel");
        for k in MeasureKind::ALL {
            assert_eq!(k.short_name().parse::<MeasureKind>().unwrap(), k);
        }
        assert_eq!("msc_exp".parse::<MeasureKind>().unwrap(), MeasureKind::SubgraphCentralityExp);
        assert!("pagerank".parse::<MeasureKind>().is_err());
    }

    #[test]
    fn size_cap() {
        let a = builtin_example1();
        let err = exact_tensor_function(&a, &FunctionSpec::Exp { beta: 1.0 }, 9).unwrap_err();
        assert_eq!(err.exit_code(), 5);
        let zero = exact_tensor_function(&AdjacencyTensor::zeros(a.dims()), &FunctionSpec::Exp0 { beta: 1.0 }, 10).unwrap();
        assert_eq!(zero, DMatrix::zeros(10, 10));
    }

    #[test]
    fn report_round_trips_through_json() {
        let a = builtin_example1();
        let r = katz_centrality(&a, Alpha::Relative(0.5), Mode::Krylov { m: 4 }, ShiftConvention::Full).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: CentralityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
