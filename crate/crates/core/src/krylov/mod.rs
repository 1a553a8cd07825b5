//! Tensor Krylov processes over the Einstein product and the `f(A) *_2 V`
//! approximations built on them.

mod block;
mod global;

pub use block::{block_arnoldi, block_qr, BlockKrylovDecomposition, BlockQr};
pub use global::{global_arnoldi, GlobalKrylovDecomposition};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix_functions::FunctionSpec;
use crate::tensor::{AdjacencyTensor, BlockTensor, BlockVector, Dims};

/// Subdiagonal norms at or below `1e-12 * max(1, ||A||_F)` end the recursion.
pub fn breakdown_threshold(a: &AdjacencyTensor) -> f64 {
    1e-12 * a.frobenius_norm().max(1.0)
}

/// `f(A) *_2 V` from `m` global Arnoldi steps.
#[derive(Debug, Clone)]
pub struct KrylovApproximation {
    pub block: BlockVector,
    /// Steps actually used (smaller than requested after a breakdown).
    pub steps: usize,
    pub breakdown_at: Option<usize>,
}

/// `f(A) *_2 V` for an `N x L x R` start tensor.
#[derive(Debug, Clone)]
pub struct BlockApproximation {
    pub block: BlockTensor,
    pub steps: usize,
    pub breakdown_at: Option<usize>,
    pub terminated: bool,
}

/// Approximates `f(A) *_2 V` by `V_m *_1 f(H_m) *_1 E_1 ||V||_F`.
pub fn approx_function_times_block(
    a: &AdjacencyTensor,
    v: &BlockVector,
    m: usize,
    spec: &FunctionSpec,
) -> Result<KrylovApproximation> {
    spec.validate()?;
    let dec = global_arnoldi(a, v, m)?;
    Ok(KrylovApproximation {
        block: dec.apply_function(spec)?,
        steps: dec.steps(),
        breakdown_at: dec.breakdown_at(),
    })
}

/// Approximates `f(A) *_2 V` by `[V_1..V_m] *_1 f(H_m) *_1 E_1 chi0`.
pub fn block_approx_function(
    a: &AdjacencyTensor,
    v: &BlockTensor,
    m: usize,
    spec: &FunctionSpec,
) -> Result<BlockApproximation> {
    spec.validate()?;
    let dec = block_arnoldi(a, v, m)?;
    Ok(BlockApproximation {
        block: dec.apply_function(spec)?,
        steps: dec.steps(),
        breakdown_at: dec.breakdown_at(),
        terminated: dec.terminated(),
    })
}

/// Extra dense slice appended to a sparse start block to keep the block process
/// from collapsing. Its read-out is discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Augmentation {
    #[default]
    None,
    /// The all-ones slice `E`.
    Ones,
    /// Entries drawn uniformly from `[0, 1)` with a fixed seed.
    Random { seed: u64 },
}

pub const DEFAULT_AUGMENTATION_SEED: u64 = 0x00c0_ffee;

impl Augmentation {
    pub fn slice(&self, dims: Dims) -> Option<BlockVector> {
        match *self {
            Augmentation::None => None,
            Augmentation::Ones => Some(BlockVector::ones(dims)),
            Augmentation::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Some(BlockVector::from_fn(dims, |_| rng.random_range(0.0..1.0)))
            }
        }
    }
}
