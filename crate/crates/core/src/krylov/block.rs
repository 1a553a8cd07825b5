use nalgebra::DMatrix;

use super::breakdown_threshold;
use crate::error::{Error, Result};
use crate::matrix_functions::{apply_spec, FunctionSpec};
use crate::tensor::{AdjacencyTensor, BlockTensor, Dims};

/// Relative column-norm tolerance for the standalone [`block_qr`].
const QR_RELATIVE_TOL: f64 = 1e-12;

/// Thin QR factorization of the flattened slices of a block tensor.
///
/// Columns whose component orthogonal to the previous ones is below tolerance are
/// treated as dependent: they get no column in `q`, and their column in `r` holds only
/// the coefficients along the kept directions. So `q` is `NL x rank`, `r` is
/// `rank x R` upper staircase with a nonnegative pivot per kept column, and `q * r`
/// reproduces the input.
#[derive(Debug, Clone)]
pub struct BlockQr {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// Input columns that contributed a new direction.
    pub independent: Vec<usize>,
}

impl BlockQr {
    pub fn rank(&self) -> usize {
        self.independent.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.r.ncols()
    }

    /// Fails with the numerical rank when some slices are dependent.
    pub fn into_full_rank(self) -> Result<Self> {
        if self.is_full_rank() {
            Ok(self)
        } else {
            Err(Error::domain(format!(
                "block is rank deficient: numerical rank {} of {}",
                self.rank(),
                self.r.ncols()
            )))
        }
    }
}

/// QR of `W` with a tolerance relative to its largest slice norm.
pub fn block_qr(w: &BlockTensor) -> BlockQr {
    let m = w.as_matrix();
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    qr_with_tolerance(m, QR_RELATIVE_TOL * scale)
}

/// Column-by-column Gram-Schmidt with reorthogonalization; a column is dropped when its
/// orthogonal remainder has norm `<= tol`.
pub(crate) fn qr_with_tolerance(w: &DMatrix<f64>, tol: f64) -> BlockQr {
    let n = w.nrows();
    let ncols = w.ncols();
    let mut q = DMatrix::<f64>::zeros(n, 0);
    let mut r = DMatrix::<f64>::zeros(ncols, ncols);
    let mut independent = Vec::new();
    for k in 0..ncols {
        let mut v = w.column(k).into_owned();
        let kept = q.ncols();
        if kept > 0 {
            for _pass in 0..2 {
                let c = q.tr_mul(&v);
                v -= &q * &c;
                for i in 0..kept {
                    r[(i, k)] += c[i];
                }
            }
        }
        let nv = v.norm();
        if nv > tol {
            r[(kept, k)] = nv;
            q = q.insert_column(kept, 0.0);
            q.set_column(kept, &(v / nv));
            independent.push(k);
        }
    }
    let rank = independent.len();
    BlockQr {
        q,
        r: r.rows(0, rank).into_owned(),
        independent,
    }
}

/// Result of the block tensor Arnoldi process with deflation.
///
/// Block `i` of the basis has `r_i` columns (`r_1` is the rank of the start block,
/// later ranks can only shrink). The block Hessenberg matrix has
/// `r_1 + ... + r_{k+1}` rows and `r_1 + ... + r_k` columns, and
/// `A *_2 [V_1..V_k] = [V_1..V_{k+1}] *_1 H_{k+1,k}`.
#[derive(Debug, Clone)]
pub struct BlockKrylovDecomposition {
    dims: Dims,
    block_size: usize,
    basis: Vec<BlockTensor>,
    ranks: Vec<usize>,
    block_hessenberg: DMatrix<f64>,
    chi0: DMatrix<f64>,
    breakdown_at: Option<usize>,
    terminated: bool,
}

impl BlockKrylovDecomposition {
    /// Block size `R` of the starting tensor.
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Completed steps `k`.
    pub fn steps(&self) -> usize {
        self.ranks.len() - 1
    }

    /// `V_1..V_{k+1}`; the last block is absent when the process terminated.
    pub fn basis(&self) -> &[BlockTensor] {
        &self.basis
    }

    /// Column counts `r_1..r_{k+1}` (the last is 0 on termination).
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn block_hessenberg(&self) -> &DMatrix<f64> {
        &self.block_hessenberg
    }

    /// Square leading part `H_k` (size `r_1 + ... + r_k`).
    pub fn projected(&self) -> DMatrix<f64> {
        let s = self.block_hessenberg.ncols();
        self.block_hessenberg.view((0, 0), (s, s)).into_owned()
    }

    /// Triangular factor of the start block: `V = V_1 *_1 chi0`.
    pub fn chi0(&self) -> &DMatrix<f64> {
        &self.chi0
    }

    /// First step at which a QR revealed rank deficiency.
    pub fn breakdown_at(&self) -> Option<usize> {
        self.breakdown_at
    }

    /// The Krylov space became invariant (a step produced no new direction).
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// `[V_1..V_k]` flattened into an `NL x (r_1+...+r_k)` matrix.
    pub fn stacked_basis(&self) -> DMatrix<f64> {
        self.stack(self.steps())
    }

    /// `[V_1..V_{k+1}]` flattened (equals [`Self::stacked_basis`] on termination).
    pub fn stacked_basis_full(&self) -> DMatrix<f64> {
        self.stack(self.basis.len())
    }

    fn stack(&self, blocks: usize) -> DMatrix<f64> {
        let cols: usize = self.basis[..blocks].iter().map(|b| b.block_size()).sum();
        let mut out = DMatrix::zeros(self.dims.len(), cols);
        let mut off = 0;
        for b in &self.basis[..blocks] {
            let r = b.block_size();
            out.columns_mut(off, r).copy_from(b.as_matrix());
            off += r;
        }
        out
    }

    /// `E_1 chi0`: the start block expressed in the basis `[V_1..V_k]`.
    pub fn start_coordinates(&self) -> DMatrix<f64> {
        let s = self.block_hessenberg.ncols();
        let mut e = DMatrix::zeros(s, self.block_size);
        e.rows_mut(0, self.chi0.nrows()).copy_from(&self.chi0);
        e
    }

    /// `[V_1..V_k] *_1 f(H_k) *_1 E_1 chi0`, an `N x L x R` approximation of
    /// `f(A) *_2 V`.
    pub fn apply_function(&self, spec: &FunctionSpec) -> Result<BlockTensor> {
        let fh = apply_spec(&self.projected(), spec)?;
        let coords = fh * self.start_coordinates();
        BlockTensor::from_matrix(self.dims, self.stacked_basis() * coords)
    }
}

/// `m` steps of the block Arnoldi process on `A` started from the `N x L x R` tensor `V`.
///
/// Rank-deficient QR factors deflate the block: dependent columns are dropped and the
/// following steps run with the smaller block. A step that yields no new column ends
/// the process early (the Krylov space is invariant).
pub fn block_arnoldi(a: &AdjacencyTensor, v: &BlockTensor, m: usize) -> Result<BlockKrylovDecomposition> {
    let dims = a.dims();
    if v.dims() != dims {
        return Err(Error::domain("starting tensor does not match the tensor dimensions"));
    }
    if m == 0 {
        return Err(Error::domain("number of steps must be at least 1"));
    }
    if v.frobenius_norm() == 0.0 {
        return Err(Error::domain("starting tensor is zero"));
    }
    let block_size = v.block_size();
    let threshold = breakdown_threshold(a);

    let start = block_qr(v);
    let chi0 = start.r;
    let mut ranks = vec![start.q.ncols()];
    let mut stacked = start.q.clone();
    let mut blocks = vec![start.q];
    // (coefficients against all earlier blocks, subdiagonal factor) per step
    let mut columns: Vec<(DMatrix<f64>, DMatrix<f64>)> = Vec::with_capacity(m);
    let mut breakdown_at = None;
    let mut terminated = false;

    for j in 1..=m {
        let current = blocks.last().expect("at least one block");
        let mut w = a.mat().mul_dense(current);
        let mut c = stacked.tr_mul(&w);
        w -= &stacked * &c;
        let c2 = stacked.tr_mul(&w);
        w -= &stacked * &c2;
        c += c2;

        let qr = qr_with_tolerance(&w, threshold);
        let r_prev = current.ncols();
        let r_next = qr.rank();
        if r_next < r_prev && breakdown_at.is_none() {
            breakdown_at = Some(j);
        }
        columns.push((c, qr.r));
        ranks.push(r_next);
        if r_next == 0 {
            terminated = true;
            break;
        }
        let s = stacked.ncols();
        stacked = stacked.resize_horizontally(s + r_next, 0.0);
        stacked.columns_mut(s, r_next).copy_from(&qr.q);
        blocks.push(qr.q);
    }

    let rows: usize = ranks.iter().sum();
    let cols: usize = ranks[..ranks.len() - 1].iter().sum();
    let mut hess = DMatrix::zeros(rows, cols);
    let mut col_off = 0;
    for (j, (c, sub)) in columns.iter().enumerate() {
        let rj = ranks[j];
        hess.view_mut((0, col_off), (c.nrows(), rj)).copy_from(c);
        hess.view_mut((c.nrows(), col_off), (sub.nrows(), rj))
            .copy_from(sub);
        col_off += rj;
    }

    let basis = blocks
        .into_iter()
        .map(|q| BlockTensor::from_matrix(dims, q))
        .collect::<Result<Vec<_>>>()?;

    Ok(BlockKrylovDecomposition {
        dims,
        block_size,
        basis,
        ranks,
        block_hessenberg: hess,
        chi0,
        breakdown_at,
        terminated,
    })
}
