use nalgebra::{DMatrix, DVector};

use super::breakdown_threshold;
use crate::error::{Error, Result};
use crate::matrix_functions::{apply_spec, FunctionSpec};
use crate::tensor::{AdjacencyTensor, BlockVector};

/// Result of the global tensor Arnoldi process.
///
/// Without breakdown after `m` steps, `basis` holds `V_1..V_{m+1}` and `hessenberg` is
/// the `(m+1) x m` upper Hessenberg `H_{m+1,m}` with
/// `A *_2 [V_1..V_m] = [V_1..V_{m+1}] *_1 H_{m+1,m}`.
/// On breakdown at step `j`, `basis` holds `V_1..V_j`, `hessenberg` is `(j+1) x j` and
/// its last entry `h_{j+1,j}` is the (negligible) norm that triggered the stop.
#[derive(Debug, Clone)]
pub struct GlobalKrylovDecomposition {
    basis: Vec<BlockVector>,
    hessenberg: DMatrix<f64>,
    v_norm: f64,
    breakdown_at: Option<usize>,
}

impl GlobalKrylovDecomposition {
    /// Number of completed steps `k` (columns of the Hessenberg matrix).
    pub fn steps(&self) -> usize {
        self.hessenberg.ncols()
    }

    pub fn basis(&self) -> &[BlockVector] {
        &self.basis
    }

    /// `H_{k+1,k}`.
    pub fn hessenberg(&self) -> &DMatrix<f64> {
        &self.hessenberg
    }

    /// The square projection `H_k = V_k^T *_2 A *_2 V_k`.
    pub fn projected(&self) -> DMatrix<f64> {
        let k = self.steps();
        self.hessenberg.view((0, 0), (k, k)).into_owned()
    }

    /// `||V||_F` of the starting block.
    pub fn v_norm(&self) -> f64 {
        self.v_norm
    }

    pub fn breakdown_at(&self) -> Option<usize> {
        self.breakdown_at
    }

    /// `sum_j [f(H_k) e_1]_j V_j ||V||_F`.
    pub fn apply_function(&self, spec: &FunctionSpec) -> Result<BlockVector> {
        let fh = apply_spec(&self.projected(), spec)?;
        let coeffs = fh.column(0) * self.v_norm;
        Ok(self.combine(&coeffs))
    }

    /// `sum_j c_j V_j` over the first `c.len()` basis blocks.
    pub fn combine(&self, c: &DVector<f64>) -> BlockVector {
        let mut out = BlockVector::zeros(self.basis[0].dims());
        for (cj, vj) in c.iter().zip(&self.basis) {
            out.axpy(*cj, vj).expect("basis blocks share dimensions");
        }
        out
    }
}

/// `m` steps of the global Arnoldi process on `A` started from `V`.
///
/// Orthogonalization is classical Gram-Schmidt with one full reorthogonalization
/// pass, subtracting each coefficient along the basis block it was measured against.
pub fn global_arnoldi(a: &AdjacencyTensor, v: &BlockVector, m: usize) -> Result<GlobalKrylovDecomposition> {
    let dims = a.dims();
    if v.dims() != dims {
        return Err(Error::domain("starting block does not match the tensor dimensions"));
    }
    if m == 0 || m > dims.len() {
        return Err(Error::domain(format!(
            "number of steps must lie in [1, {}], got {m}",
            dims.len()
        )));
    }
    let v_norm = v.frobenius_norm();
    if v_norm == 0.0 {
        return Err(Error::domain("starting block is zero"));
    }
    let threshold = breakdown_threshold(a);

    let mut basis = Vec::with_capacity(m + 1);
    basis.push(v.clone().scaled(1.0 / v_norm));
    let mut h = DMatrix::zeros(m + 1, m);
    let mut breakdown_at = None;

    for j in 0..m {
        let mut w = a.einstein_tv(&basis[j])?;
        for _pass in 0..2 {
            let coeffs: Vec<f64> = basis
                .iter()
                .map(|vi| vi.inner(&w))
                .collect::<Result<_>>()?;
            for (i, (c, vi)) in coeffs.iter().zip(&basis).enumerate() {
                w.axpy(-c, vi)?;
                h[(i, j)] += c;
            }
        }
        let beta = w.frobenius_norm();
        h[(j + 1, j)] = beta;
        if beta <= threshold {
            breakdown_at = Some(j + 1);
            h = h.view((0, 0), (j + 2, j + 1)).into_owned();
            break;
        }
        basis.push(w.scaled(1.0 / beta));
    }

    Ok(GlobalKrylovDecomposition {
        basis,
        hessenberg: h,
        v_norm,
        breakdown_at,
    })
}
