use nalgebra::DMatrix;

use super::index::{Dims, TensorIndex};
use crate::error::{Error, Result};

/// A dense `N x L` block, stored in flattened order (node fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    dims: Dims,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            data: vec![0.0; dims.len()],
        }
    }

    /// The all-ones block `E`.
    pub fn ones(dims: Dims) -> Self {
        Self {
            dims,
            data: vec![1.0; dims.len()],
        }
    }

    /// The selector block `E_{i,l}`: one at `idx`, zero elsewhere.
    pub fn unit(dims: Dims, idx: TensorIndex) -> Result<Self> {
        let mut v = Self::zeros(dims);
        v.data[dims.offset(idx)?] = 1.0;
        Ok(v)
    }

    pub fn from_flat(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::domain(format!(
                "block of length {} does not match N*L = {}",
                data.len(),
                dims.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("block contains non-finite entries"));
        }
        Ok(Self { dims, data })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(TensorIndex) -> f64) -> Self {
        let data = dims.indices().map(&mut f).collect();
        Self { dims, data }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn get(&self, idx: TensorIndex) -> Result<f64> {
        Ok(self.data[self.dims.offset(idx)?])
    }

    /// Flattened view, `vec(V)`.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// `N x L` matrix view (column-major, so columns are layers).
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.dims.n_nodes, self.dims.n_layers, &self.data)
    }

    pub fn inner(&self, other: &BlockVector) -> Result<f64> {
        self.check_dims(other)?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale(c);
        self
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &BlockVector) -> Result<()> {
        self.check_dims(other)?;
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += c * b);
        Ok(())
    }

    /// `max |self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &BlockVector) -> Result<f64> {
        self.check_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn check_dims(&self, other: &BlockVector) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::domain(format!(
                "block shapes differ: {}x{} vs {}x{}",
                self.dims.n_nodes, self.dims.n_layers, other.dims.n_nodes, other.dims.n_layers
            )));
        }
        Ok(())
    }
}

/// `E_{i,l} *_2 T` generalized to arbitrary left blocks: the trace inner product
/// `sum_{i,l} X_{i,l} T_{i,l}`.
pub fn bilinear_form(x: &BlockVector, t_applied: &BlockVector) -> Result<f64> {
    x.inner(t_applied)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A third-order `N x L x R` tensor, stored as an `NL x R` matrix whose columns are the
/// flattened frontal slices.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTensor {
    dims: Dims,
    cols: DMatrix<f64>,
}

impl BlockTensor {
    pub fn from_slices(slices: &[BlockVector]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::domain("block tensor needs at least one slice"))?;
        let dims = first.dims();
        let mut cols = DMatrix::zeros(dims.len(), slices.len());
        for (j, s) in slices.iter().enumerate() {
            if s.dims() != dims {
                return Err(Error::domain("slices of a block tensor must share N and L"));
            }
            cols.column_mut(j).copy_from_slice(s.as_slice());
        }
        Ok(Self { dims, cols })
    }

    /// Slices `E_{i,l}` for each listed node-layer pair.
    pub fn units(dims: Dims, indices: &[TensorIndex]) -> Result<Self> {
        let slices = indices
            .iter()
            .map(|&idx| BlockVector::unit(dims, idx))
            .collect::<Result<Vec<_>>>()?;
        Self::from_slices(&slices)
    }

    pub fn from_matrix(dims: Dims, cols: DMatrix<f64>) -> Result<Self> {
        if cols.nrows() != dims.len() || cols.ncols() == 0 {
            return Err(Error::domain(format!(
                "expected an {}xR matrix with R >= 1, got {}x{}",
                dims.len(),
                cols.nrows(),
                cols.ncols()
            )));
        }
        Ok(Self { dims, cols })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn block_size(&self) -> usize {
        self.cols.ncols()
    }

    pub fn slice(&self, r: usize) -> BlockVector {
        BlockVector {
            dims: self.dims,
            data: self.cols.column(r).iter().copied().collect(),
        }
    }

    /// The flattened `NL x R` matrix.
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.cols
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.cols
    }

    /// Returns a copy with `extra` appended as the last slice.
    pub fn with_slice(&self, extra: &BlockVector) -> Result<Self> {
        if extra.dims() != self.dims {
            return Err(Error::domain("appended slice has mismatched N or L"));
        }
        let r = self.block_size();
        let mut cols = self.cols.clone().resize_horizontally(r + 1, 0.0);
        cols.column_mut(r).copy_from_slice(extra.as_slice());
        Ok(Self {
            dims: self.dims,
            cols,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.cols.norm()
    }
}
