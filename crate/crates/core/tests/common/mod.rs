//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's dense matrix functions or Krylov code.
#![allow(dead_code)]

use mlcentrality::tensor::{AdjacencyTensor, CsrMatrix, Dims};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each of the `NL x NL` positions is filled with probability `density`.
pub fn random_tensor(
    rng: &mut ChaCha8Rng,
    n_nodes: usize,
    n_layers: usize,
    density: f64,
    symmetric: bool,
) -> AdjacencyTensor {
    let dims = Dims::new(n_nodes, n_layers).unwrap();
    let n = dims.len();
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if symmetric && j < i {
                continue;
            }
            if rng.random_bool(density) {
                let w: f64 = rng.random_range(0.1..1.0);
                t.push((i, j, w));
                if symmetric && i != j {
                    t.push((j, i, w));
                }
            }
        }
    }
    AdjacencyTensor::from_mat(dims, CsrMatrix::from_triplets(n, n, t).unwrap()).unwrap()
}

/// `A / c` with `c` the largest absolute row sum, so every power stays bounded by 1
/// in the infinity norm.
pub fn normalized(a: &AdjacencyTensor) -> AdjacencyTensor {
    let m = a.mat();
    let c = (0..m.nrows())
        .map(|r| m.row(r).map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if c == 0.0 {
        return a.clone();
    }
    let t: Vec<_> = m.triplets().map(|(i, j, v)| (i, j, v / c)).collect();
    AdjacencyTensor::from_mat(a.dims(), CsrMatrix::from_triplets(m.nrows(), m.ncols(), t).unwrap()).unwrap()
}

/// Dense `mat(A)` assembled entry by entry from the sparse triplets.
pub fn dense(a: &AdjacencyTensor) -> DMatrix<f64> {
    let n = a.dims().len();
    let mut d = DMatrix::zeros(n, n);
    for (i, j, v) in a.mat().triplets() {
        d[(i, j)] += v;
    }
    d
}

/// `sum_{p=0}^{terms} (beta H)^p / p!` by plain summation.
pub fn taylor_exp(h: &DMatrix<f64>, beta: f64, terms: usize) -> DMatrix<f64> {
    let n = h.nrows();
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut acc = term.clone();
    for p in 1..=terms {
        term = &term * h * (beta / p as f64);
        acc += &term;
    }
    acc
}

/// `(I - alpha H)^{-1}` through Gaussian elimination with partial pivoting, written out
/// here so the oracle does not share code with the library.
pub fn gauss_inverse(h: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    let n = h.nrows();
    let mut a = DMatrix::<f64>::identity(n, n) - h * alpha;
    let mut inv = DMatrix::<f64>::identity(n, n);
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[(x, k)].abs().total_cmp(&a[(y, k)].abs())).unwrap();
        a.swap_rows(k, p);
        inv.swap_rows(k, p);
        let d = a[(k, k)];
        assert!(d.abs() > 1e-14, "singular");
        for j in 0..n {
            a[(k, j)] /= d;
            inv[(k, j)] /= d;
        }
        for i in 0..n {
            if i != k {
                let f = a[(i, k)];
                if f != 0.0 {
                    for j in 0..n {
                        a[(i, j)] -= f * a[(k, j)];
                        inv[(i, j)] -= f * inv[(k, j)];
                    }
                }
            }
        }
    }
    inv
}

/// `sum_p c_p A^p v` (first coefficient multiplies `A`) by repeated sparse products.
pub fn direct_series(a: &AdjacencyTensor, coeffs: &[f64], v: &[f64]) -> Vec<f64> {
    let mut power = v.to_vec();
    let mut acc = vec![0.0; v.len()];
    for c in coeffs {
        power = a.mat().mul_vec(&power);
        for (s, p) in acc.iter_mut().zip(&power) {
            *s += c * p;
        }
    }
    acc
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Dominant eigenvalue magnitude of a symmetric matrix by Jacobi rotations.
pub fn jacobi_spectral_radius(sym: &DMatrix<f64>) -> f64 {
    let mut a = sym.clone();
    let n = a.nrows();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max)
}
