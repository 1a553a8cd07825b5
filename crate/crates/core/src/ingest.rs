//! Multilayer edge-list files, interlayer coupling and reference networks.
//!
//! File format (UTF-8, whitespace separated, indices 1-based):
//!
//! ```text
//! # comment
//! mlnet <N> <L> <directed|undirected> <weighted|unweighted>
//! <node_i> <layer_i> <node_j> <layer_j> [<weight>]
//! couple <weight>
//! ```
//!
//! The header must be the first non-comment line. `couple` links every node to its
//! own copies in all other layers with the given weight.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{AdjacencyTensor, CsrMatrix, Dims, TensorIndex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub from: TensorIndex,
    pub to: TensorIndex,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub dims: Dims,
    pub directed: bool,
    pub weighted: bool,
}

/// A parsed network file before assembly into a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub header: Header,
    pub edges: Vec<EdgeRecord>,
    pub coupling: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject duplicate edges and weight columns in unweighted files instead of
    /// summing duplicates and ignoring the column.
    pub strict: bool,
}

impl NetworkFile {
    pub fn parse<R: BufRead>(reader: R, opts: ParseOptions) -> Result<Self> {
        let mut header: Option<Header> = None;
        let mut edges = Vec::new();
        let mut coupling = None;
        let mut seen: HashSet<(TensorIndex, TensorIndex)> = HashSet::new();

        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse {
                line: lineno,
                message,
            };

            let Some(h) = header else {
                header = Some(parse_header(&tokens).map_err(parse_err)?);
                continue;
            };

            if tokens[0] == "mlnet" {
                return Err(parse_err("duplicate header".into()));
            }
            if tokens[0] == "couple" {
                if tokens.len() != 2 {
                    return Err(parse_err("expected `couple <weight>`".into()));
                }
                if coupling.is_some() {
                    return Err(parse_err("duplicate couple directive".into()));
                }
                let w = parse_weight(tokens[1]).map_err(parse_err)?;
                if w.is_nan() || w <= 0.0 {
                    return Err(Error::domain(format!(
                        "line {lineno}: coupling weight must be positive, got {w}"
                    )));
                }
                coupling = Some(w);
                continue;
            }

            if tokens.len() != 4 && tokens.len() != 5 {
                return Err(parse_err(format!(
                    "expected 4 or 5 fields on an edge line, found {}",
                    tokens.len()
                )));
            }
            let mut ids = [0usize; 4];
            for (slot, tok) in ids.iter_mut().zip(&tokens[..4]) {
                *slot = tok
                    .parse()
                    .map_err(|_| parse_err(format!("invalid index {tok:?}")))?;
            }
            let from = TensorIndex::new(ids[0], ids[1]);
            let to = TensorIndex::new(ids[2], ids[3]);
            for idx in [from, to] {
                if !h.dims.contains(idx) {
                    return Err(Error::domain(format!(
                        "line {lineno}: index {idx} outside N={}, L={}",
                        h.dims.n_nodes, h.dims.n_layers
                    )));
                }
            }

            let weight = match (tokens.get(4), h.weighted) {
                (Some(tok), true) => parse_weight(tok).map_err(parse_err)?,
                (None, true) => return Err(parse_err("weighted file needs a weight column".into())),
                (Some(_), false) if opts.strict => {
                    return Err(parse_err("weight given in an unweighted file".into()))
                }
                (_, false) => 1.0,
            };
            if weight.is_nan() || weight <= 0.0 {
                return Err(Error::domain(format!(
                    "line {lineno}: edge weight must be positive, got {weight}"
                )));
            }

            let key = if h.directed || (from.layer, from.node) <= (to.layer, to.node) {
                (from, to)
            } else {
                (to, from)
            };
            if !seen.insert(key) && opts.strict {
                return Err(Error::domain(format!(
                    "line {lineno}: duplicate edge {from} -> {to}"
                )));
            }
            edges.push(EdgeRecord { from, to, weight });
        }

        let header = header.ok_or(Error::Parse {
            line: 0,
            message: "missing `mlnet` header".into(),
        })?;
        Ok(Self {
            header,
            edges,
            coupling,
        })
    }

    /// Assembles the tensor; undirected edges are stored in both directions.
    pub fn to_tensor(&self) -> Result<AdjacencyTensor> {
        let dims = self.header.dims;
        let mut entries = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            entries.push((e.from, e.to, e.weight));
            if !self.header.directed && e.from != e.to {
                entries.push((e.to, e.from, e.weight));
            }
        }
        let tensor = AdjacencyTensor::from_entries(dims, entries)?;
        match self.coupling {
            Some(w) => add_interlayer_coupling(&tensor, w),
            None => Ok(tensor),
        }
    }
}

fn parse_header(tokens: &[&str]) -> std::result::Result<Header, String> {
    if tokens.len() != 5 || tokens[0] != "mlnet" {
        return Err(
            "expected header `mlnet <N> <L> <directed|undirected> <weighted|unweighted>`".into(),
        );
    }
    let n: usize = tokens[1]
        .parse()
        .map_err(|_| format!("invalid N {:?}", tokens[1]))?;
    let l: usize = tokens[2]
        .parse()
        .map_err(|_| format!("invalid L {:?}", tokens[2]))?;
    let dims = Dims::new(n, l).map_err(|e| e.to_string())?;
    let directed = match tokens[3] {
        "directed" => true,
        "undirected" => false,
        other => return Err(format!("expected directed|undirected, got {other:?}")),
    };
    let weighted = match tokens[4] {
        "weighted" => true,
        "unweighted" => false,
        other => return Err(format!("expected weighted|unweighted, got {other:?}")),
    };
    Ok(Header {
        dims,
        directed,
        weighted,
    })
}

fn parse_weight(tok: &str) -> std::result::Result<f64, String> {
    let w: f64 = tok.parse().map_err(|_| format!("invalid weight {tok:?}"))?;
    if !w.is_finite() {
        return Err(format!("non-finite weight {tok:?}"));
    }
    Ok(w)
}

/// Parses an edge-list stream straight into a tensor.
pub fn parse_edge_list<R: BufRead>(reader: R, opts: ParseOptions) -> Result<AdjacencyTensor> {
    NetworkFile::parse(reader, opts)?.to_tensor()
}

/// Writes `tensor` in the edge-list format. Symmetric tensors are written as
/// undirected (upper triangle of the flattening), others as directed. Weights use the
/// shortest representation that parses back to the same `f64`.
pub fn write_edge_list<W: Write>(tensor: &AdjacencyTensor, mut w: W) -> Result<()> {
    let dims = tensor.dims();
    let directed = !tensor.is_symmetric();
    writeln!(
        w,
        "mlnet {} {} {} weighted",
        dims.n_nodes,
        dims.n_layers,
        if directed { "directed" } else { "undirected" }
    )?;
    for (r, c, v) in tensor.mat().triplets() {
        if !directed && c < r {
            continue;
        }
        let (from, to) = (dims.index_at(r), dims.index_at(c));
        writeln!(w, "{} {} {} {} {}", from.node, from.layer, to.node, to.layer, v)?;
    }
    Ok(())
}

/// Adds `weight` to every entry `(i, l, i, k)` with `l != k`.
pub fn add_interlayer_coupling(a: &AdjacencyTensor, weight: f64) -> Result<AdjacencyTensor> {
    if !(weight.is_finite() && weight > 0.0) {
        return Err(Error::domain(format!("coupling weight must be positive, got {weight}")));
    }
    let dims = a.dims();
    let n = dims.n_nodes;
    let l = dims.n_layers;
    let coupling = (0..n).flat_map(|i| {
        (0..l).flat_map(move |p| {
            (0..l)
                .filter(move |&q| q != p)
                .map(move |q| (i + p * n, i + q * n, weight))
        })
    });
    let mat = CsrMatrix::from_triplets(dims.len(), dims.len(), a.mat().triplets().chain(coupling))?;
    AdjacencyTensor::from_mat(dims, mat)
}

/// The 5-node, 2-layer undirected network used as the reference example.
///
/// Layer 1: 1-2, 2-4, 3-5. Layer 2: 1-4, 2-3, 2-5.
/// Interlayer: (1,1)-(1,2), (1,1)-(3,2), (3,1)-(5,2), (4,1)-(2,2), (5,1)-(2,2).
pub fn builtin_example1() -> AdjacencyTensor {
    const EDGES: [((usize, usize), (usize, usize)); 11] = [
        ((1, 1), (2, 1)),
        ((2, 1), (4, 1)),
        ((3, 1), (5, 1)),
        ((1, 2), (4, 2)),
        ((2, 2), (3, 2)),
        ((2, 2), (5, 2)),
        ((1, 1), (1, 2)),
        ((1, 1), (3, 2)),
        ((3, 1), (5, 2)),
        ((4, 1), (2, 2)),
        ((5, 1), (2, 2)),
    ];
    let dims = Dims {
        n_nodes: 5,
        n_layers: 2,
    };
    let entries = EDGES.iter().flat_map(|&((a, b), (c, d))| {
        let (p, q) = (TensorIndex::new(a, b), TensorIndex::new(c, d));
        [(p, q, 1.0), (q, p, 1.0)]
    });
    AdjacencyTensor::from_entries(dims, entries).expect("builtin network is well formed")
}

/// Looks up a builtin network by name.
pub fn builtin(name: &str) -> Result<AdjacencyTensor> {
    match name {
        "example1" => Ok(builtin_example1()),
        other => Err(Error::domain(format!("unknown builtin network {other:?}"))),
    }
}

/// Parameters of a reproducible random undirected multilayer network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomNetwork {
    pub n_nodes: usize,
    pub n_layers: usize,
    /// Number of distinct undirected edges (no self loops) among node-layer pairs.
    pub n_edges: usize,
    /// Weights drawn uniformly from `[lo, hi)`; `None` gives unit weights.
    pub weights: Option<(f64, f64)>,
    pub seed: u64,
}

impl RandomNetwork {
    pub fn build(&self) -> Result<AdjacencyTensor> {
        let dims = Dims::new(self.n_nodes, self.n_layers)?;
        let n = dims.len();
        let max_edges = n * (n - 1) / 2;
        if self.n_edges > max_edges {
            return Err(Error::domain(format!(
                "{} edges requested but only {max_edges} pairs exist",
                self.n_edges
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut chosen = HashSet::with_capacity(self.n_edges);
        let mut entries = Vec::with_capacity(2 * self.n_edges);
        while chosen.len() < self.n_edges {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b || !chosen.insert((a.min(b), a.max(b))) {
                continue;
            }
            let w = match self.weights {
                Some((lo, hi)) => rng.random_range(lo..hi),
                None => 1.0,
            };
            entries.push((a, b, w));
            entries.push((b, a, w));
        }
        AdjacencyTensor::from_mat(dims, CsrMatrix::from_triplets(n, n, entries)?)
    }
}
