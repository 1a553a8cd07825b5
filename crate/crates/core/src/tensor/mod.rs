//! Fourth-order adjacency tensors `N x L x N x L` and their Einstein products.
//!
//! A tensor is stored only through its flattening: the `NL x NL` supra-adjacency
//! matrix whose row/column `node + (layer-1)*N` corresponds to the pair `(node, layer)`.
//! Under that ordering the Einstein product contracting two modes is the ordinary
//! matrix product, so every contraction here is sparse matrix arithmetic.

mod block;
mod index;
mod sparse;

pub use block::{bilinear_form, BlockTensor, BlockVector};
pub use index::{flatten_index, unflatten_index, Dims, TensorIndex};
pub use sparse::CsrMatrix;

pub(crate) use block::dot;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sparse square tensor `A in R^{N x L x N x L}`, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyTensor {
    dims: Dims,
    mat: CsrMatrix,
    symmetric: bool,
}

impl AdjacencyTensor {
    /// Builds from `(from, to, weight)` entries. Duplicates are summed and zero weights
    /// are dropped.
    pub fn from_entries<I>(dims: Dims, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TensorIndex, TensorIndex, f64)>,
    {
        let triplets = entries
            .into_iter()
            .map(|(from, to, w)| Ok((dims.offset(from)?, dims.offset(to)?, w)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_mat(dims, CsrMatrix::from_triplets(dims.len(), dims.len(), triplets)?)
    }

    /// The inverse flattening `mat^{-1}`.
    pub fn from_mat(dims: Dims, mat: CsrMatrix) -> Result<Self> {
        if mat.nrows() != dims.len() || mat.ncols() != dims.len() {
            return Err(Error::domain(format!(
                "flattened matrix is {}x{}, expected {n}x{n}",
                mat.nrows(),
                mat.ncols(),
                n = dims.len()
            )));
        }
        let symmetric = mat.is_symmetric();
        Ok(Self {
            dims,
            mat,
            symmetric,
        })
    }

    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            mat: CsrMatrix::zeros(dims.len(), dims.len()),
            symmetric: true,
        }
    }

    /// The identity tensor: one at `(i,l,i,l)`, zero elsewhere.
    pub fn identity(dims: Dims) -> Self {
        Self {
            dims,
            mat: CsrMatrix::identity(dims.len()),
            symmetric: true,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn n_nodes(&self) -> usize {
        self.dims.n_nodes
    }

    pub fn n_layers(&self) -> usize {
        self.dims.n_layers
    }

    /// The flattening `mat(A)` (the supra-adjacency matrix).
    pub fn mat(&self) -> &CsrMatrix {
        &self.mat
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.mat.to_dense()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn nnz(&self) -> usize {
        self.mat.nnz()
    }

    pub fn is_zero(&self) -> bool {
        self.mat.nnz() == 0
    }

    /// Entry `A(i, l, j, k)`.
    pub fn entry(&self, from: TensorIndex, to: TensorIndex) -> Result<f64> {
        Ok(self.mat.get(self.dims.offset(from)?, self.dims.offset(to)?))
    }

    /// Stored entries as `(from, to, weight)`.
    pub fn entries(&self) -> impl Iterator<Item = (TensorIndex, TensorIndex, f64)> + '_ {
        self.mat
            .triplets()
            .map(|(r, c, v)| (self.dims.index_at(r), self.dims.index_at(c), v))
    }

    /// Number of edges: stored entries for directed tensors, unordered pairs (self
    /// loops counted once) for symmetric ones.
    pub fn edge_count(&self) -> usize {
        if self.symmetric {
            (self.mat.nnz() + self.mat.diagonal_nnz()) / 2
        } else {
            self.mat.nnz()
        }
    }

    /// `A *_2 B`.
    pub fn einstein_tt(&self, other: &AdjacencyTensor) -> Result<AdjacencyTensor> {
        self.check_dims(other.dims)?;
        Self::from_mat(self.dims, self.mat.mul_sparse(&other.mat)?)
    }

    /// `A *_2 V` for a block `V in R^{N x L}`.
    pub fn einstein_tv(&self, v: &BlockVector) -> Result<BlockVector> {
        self.check_dims(v.dims())?;
        BlockVector::from_flat(self.dims, self.mat.mul_vec(v.as_slice()))
    }

    /// `A *_2 V` for every frontal slice of an `N x L x R` tensor.
    pub fn einstein_block(&self, v: &BlockTensor) -> Result<BlockTensor> {
        self.check_dims(v.dims())?;
        BlockTensor::from_matrix(self.dims, self.mat.mul_dense(v.as_matrix()))
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// `sum A(i,l,j,k) B(i,l,j,k)`.
    pub fn inner_product(&self, other: &AdjacencyTensor) -> Result<f64> {
        self.check_dims(other.dims)?;
        Ok(self
            .mat
            .triplets()
            .map(|(r, c, v)| v * other.mat.get(r, c))
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    /// `A^p`, with `A^0` the identity tensor.
    pub fn power(&self, p: u32) -> Result<AdjacencyTensor> {
        let mut acc = Self::identity(self.dims);
        for _ in 0..p {
            acc = self.einstein_tt(&acc)?;
        }
        Ok(acc)
    }

    /// `A^T(i,l,j,k) = A(j,k,i,l)`.
    pub fn transpose(&self) -> AdjacencyTensor {
        Self {
            dims: self.dims,
            mat: self.mat.transpose(),
            symmetric: self.symmetric,
        }
    }

    fn check_dims(&self, other: Dims) -> Result<()> {
        if self.dims != other {
            return Err(Error::domain(format!(
                "dimension mismatch: N={}, L={} vs N={}, L={}",
                self.dims.n_nodes, self.dims.n_layers, other.n_nodes, other.n_layers
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::builtin_example1;

    fn idx(node: usize, layer: usize) -> TensorIndex {
        TensorIndex::new(node, layer)
    }

    #[test]
    fn mat_of_example1() {
        let a = builtin_example1();
        let m = a.to_dense();
        assert_eq!(m.shape(), (10, 10));
        assert_eq!(m, m.transpose());
        assert!(m.iter().all(|&v| v == 0.0 || v == 1.0));
        let degrees = [3.0, 2.0, 2.0, 2.0, 2.0, 2.0, 4.0, 2.0, 1.0, 2.0];
        for (r, &d) in degrees.iter().enumerate() {
            assert_eq!(m.row(r).sum(), d);
        }
    }

    #[test]
    fn mat_of_empty_and_identity() {
        let dims = Dims::new(5, 2).unwrap();
        assert_eq!(AdjacencyTensor::zeros(dims).to_dense(), DMatrix::zeros(10, 10));
        assert_eq!(AdjacencyTensor::identity(dims).to_dense(), DMatrix::identity(10, 10));
    }

    #[test]
    fn mat_round_trip() {
        let a = builtin_example1();
        let b = AdjacencyTensor::from_mat(a.dims(), a.mat().clone()).unwrap();
        assert_eq!(a, b);
        for (from, to, w) in a.entries() {
            assert_eq!(a.entry(from, to).unwrap(), w);
            let r = flatten_index(from, 5, 2).unwrap() - 1;
            let c = flatten_index(to, 5, 2).unwrap() - 1;
            assert_eq!(a.to_dense()[(r, c)], w);
        }
    }

    #[test]
    fn einstein_tt_examples() {
        let a = builtin_example1();
        let id = AdjacencyTensor::identity(a.dims());
        assert_eq!(id.einstein_tt(&a).unwrap(), a);
        let a2 = a.einstein_tt(&a).unwrap();
        assert_eq!(a2.entry(idx(2, 2), idx(2, 2)).unwrap(), 4.0);
        let zero = AdjacencyTensor::zeros(a.dims());
        assert!(a.einstein_tt(&zero).unwrap().is_zero());
        let other = AdjacencyTensor::zeros(Dims::new(2, 5).unwrap());
        assert!(a.einstein_tt(&other).is_err());
    }

    #[test]
    fn einstein_tv_examples() {
        let a = builtin_example1();
        let dims = a.dims();
        let deg = a.einstein_tv(&BlockVector::ones(dims)).unwrap();
        assert_eq!(deg.as_slice(), &[3.0, 2.0, 2.0, 2.0, 2.0, 2.0, 4.0, 2.0, 1.0, 2.0]);

        let v = BlockVector::from_fn(dims, |i| i.node as f64 - 0.5 * i.layer as f64);
        assert_eq!(AdjacencyTensor::identity(dims).einstein_tv(&v).unwrap(), v);

        // neighbours of (2,2): (3,2), (5,2), (4,1), (5,1)
        let col = a
            .einstein_tv(&BlockVector::unit(dims, idx(2, 2)).unwrap())
            .unwrap();
        let expected = BlockVector::from_fn(dims, |i| {
            if [idx(3, 2), idx(5, 2), idx(4, 1), idx(5, 1)].contains(&i) {
                1.0
            } else {
                0.0
            }
        });
        assert_eq!(col, expected);
    }

    #[test]
    fn trace_norm_power() {
        let dims = Dims::new(5, 2).unwrap();
        assert_eq!(AdjacencyTensor::identity(dims).trace(), 10.0);
        let a = builtin_example1();
        assert!((a.frobenius_norm() - 22f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.power(2).unwrap().trace(), 22.0);
        assert_eq!(a.power(0).unwrap(), AdjacencyTensor::identity(dims));
        assert_eq!(a.power(1).unwrap(), a);
        assert_eq!(a.inner_product(&a).unwrap(), 22.0);
    }

    #[test]
    fn transpose_involution() {
        let dims = Dims::new(3, 2).unwrap();
        let a = AdjacencyTensor::from_entries(
            dims,
            [(idx(1, 1), idx(2, 2), 1.5), (idx(3, 2), idx(1, 1), -2.0)],
        )
        .unwrap();
        assert!(!a.is_symmetric());
        let t = a.transpose();
        assert_eq!(t.entry(idx(2, 2), idx(1, 1)).unwrap(), 1.5);
        assert_eq!(t.transpose(), a);
        let s = builtin_example1();
        assert_eq!(s.transpose(), s);
    }

    #[test]
    fn zero_weights_dropped_and_bounds_checked() {
        let dims = Dims::new(2, 2).unwrap();
        let a = AdjacencyTensor::from_entries(dims, [(idx(1, 1), idx(2, 2), 0.0)]).unwrap();
        assert!(a.is_zero());
        assert!(AdjacencyTensor::from_entries(dims, [(idx(3, 1), idx(2, 2), 1.0)]).is_err());
    }

    #[test]
    fn edge_count_counts_pairs() {
        assert_eq!(builtin_example1().edge_count(), 11);
    }
}
