use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node-layer pair `(node, layer)`, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorIndex {
    pub node: usize,
    pub layer: usize,
}

impl TensorIndex {
    pub const fn new(node: usize, layer: usize) -> Self {
        Self { node, layer }
    }

    /// Ordering key used for tie-breaking in rankings: layer first, then node.
    pub fn layer_major_key(&self) -> (usize, usize) {
        (self.layer, self.node)
    }
}

impl fmt::Display for TensorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.node, self.layer)
    }
}

/// Parses `node:layer`, e.g. `2:2`.
impl FromStr for TensorIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (node, layer) = s
            .split_once(':')
            .ok_or_else(|| Error::domain(format!("expected node:layer, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::domain(format!("invalid index component {t:?} in {s:?}")))
        };
        Ok(Self::new(parse(node)?, parse(layer)?))
    }
}

/// Number of nodes per layer and number of layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub n_nodes: usize,
    pub n_layers: usize,
}

impl Dims {
    pub fn new(n_nodes: usize, n_layers: usize) -> Result<Self> {
        if n_nodes == 0 || n_layers == 0 {
            return Err(Error::domain(format!(
                "dimensions must be positive, got N={n_nodes}, L={n_layers}"
            )));
        }
        n_nodes
            .checked_mul(n_layers)
            .ok_or_else(|| Error::domain("N*L overflows"))?;
        Ok(Self { n_nodes, n_layers })
    }

    /// `N * L`, the side length of the flattened matrix.
    pub fn len(&self) -> usize {
        self.n_nodes * self.n_layers
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, idx: TensorIndex) -> bool {
        (1..=self.n_nodes).contains(&idx.node) && (1..=self.n_layers).contains(&idx.layer)
    }

    /// 0-based flattened offset; node varies fastest.
    pub fn offset(&self, idx: TensorIndex) -> Result<usize> {
        if !self.contains(idx) {
            return Err(Error::domain(format!(
                "index {idx} out of bounds for N={}, L={}",
                self.n_nodes, self.n_layers
            )));
        }
        Ok((idx.node - 1) + (idx.layer - 1) * self.n_nodes)
    }

    /// Inverse of [`Dims::offset`]; the caller guarantees `k < len()`.
    pub fn index_at(&self, k: usize) -> TensorIndex {
        debug_assert!(k < self.len());
        TensorIndex::new(k % self.n_nodes + 1, k / self.n_nodes + 1)
    }

    /// All node-layer pairs in flattened order.
    pub fn indices(&self) -> impl Iterator<Item = TensorIndex> + '_ {
        (0..self.len()).map(|k| self.index_at(k))
    }
}

/// Maps `(node, layer)` to the 1-based flattened position `node + (layer-1)*N`.
pub fn flatten_index(idx: TensorIndex, n_nodes: usize, n_layers: usize) -> Result<usize> {
    Ok(Dims::new(n_nodes, n_layers)?.offset(idx)? + 1)
}

/// Inverse of [`flatten_index`] for `1 <= k <= N*L`.
pub fn unflatten_index(k: usize, n_nodes: usize, n_layers: usize) -> Result<TensorIndex> {
    let dims = Dims::new(n_nodes, n_layers)?;
    if k == 0 || k > dims.len() {
        return Err(Error::domain(format!(
            "flattened index {k} outside [1, {}]",
            dims.len()
        )));
    }
    Ok(dims.index_at(k - 1))
}
