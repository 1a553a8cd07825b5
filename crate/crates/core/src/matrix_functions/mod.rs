//! Dense matrix functions for small matrices: flattened small networks and the
//! projected Hessenberg matrices produced by the Krylov processes.

mod expm;
mod spectral;

pub use expm::dense_expm;
pub use spectral::{
    estimate_lambda_max, SpectralEstimate, DEFAULT_LAMBDA_MAX_ITER, DEFAULT_LAMBDA_TOL,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use expm::one_norm;

/// Condition estimates above this reject a resolvent evaluation.
const MAX_RESOLVENT_CONDITION: f64 = 1e14;

/// The function `f` applied to a tensor or matrix.
///
/// `Exp0` and `Resolvent0` subtract the identity (the walk of length zero).
/// `PowerSeries` holds `c_1, c_2, ...`, so it evaluates `sum_{p>=1} c_p H^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Exp { beta: f64 },
    Exp0 { beta: f64 },
    Resolvent { alpha: f64 },
    Resolvent0 { alpha: f64 },
    PowerSeries { coefficients: Vec<f64> },
}

impl FunctionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Exp { beta } | FunctionSpec::Exp0 { beta } => {
                if !(beta.is_finite() && *beta > 0.0) {
                    return Err(Error::domain(format!("beta must be positive, got {beta}")));
                }
            }
            FunctionSpec::Resolvent { alpha } | FunctionSpec::Resolvent0 { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
                }
            }
            FunctionSpec::PowerSeries { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::domain("power series needs at least one coefficient"));
                }
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::domain("power series coefficients must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn is_resolvent(&self) -> bool {
        matches!(
            self,
            FunctionSpec::Resolvent { .. } | FunctionSpec::Resolvent0 { .. }
        )
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            FunctionSpec::Resolvent { alpha } | FunctionSpec::Resolvent0 { alpha } => Some(*alpha),
            _ => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            FunctionSpec::Exp { beta } | FunctionSpec::Exp0 { beta } => Some(*beta),
            _ => None,
        }
    }

    /// Whether the identity term is subtracted.
    pub fn is_shifted(&self) -> bool {
        matches!(self, FunctionSpec::Exp0 { .. } | FunctionSpec::Resolvent0 { .. })
    }

    /// `f(x)` for a scalar `x`.
    pub fn eval_scalar(&self, x: f64) -> f64 {
        match self {
            FunctionSpec::Exp { beta } => (beta * x).exp(),
            FunctionSpec::Exp0 { beta } => (beta * x).exp_m1(),
            FunctionSpec::Resolvent { alpha } => 1.0 / (1.0 - alpha * x),
            FunctionSpec::Resolvent0 { alpha } => alpha * x / (1.0 - alpha * x),
            FunctionSpec::PowerSeries { coefficients } => coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, c| (acc + c) * x),
        }
    }
}

/// `(I - alpha*H)^{-1}` by LU factorization.
///
/// For an entrywise nonnegative `H` the inverse is nonnegative exactly when
/// `alpha * rho(H) < 1`, so a negative entry signals a divergent resolvent series.
pub fn dense_resolvent(h: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    if !h.is_square() {
        return Err(Error::domain(format!(
            "resolvent needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be finite, got {alpha}")));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let n = h.nrows();
    let m = DMatrix::<f64>::identity(n, n) - h * alpha;
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let condition = one_norm(&m) * one_norm(&inv);
    if !condition.is_finite() || condition > MAX_RESOLVENT_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    if alpha > 0.0 && h.iter().all(|&v| v >= 0.0) {
        let scale = inv.amax();
        if inv.iter().any(|&v| v < -1e-12 * scale) {
            return Err(Error::Divergent { alpha });
        }
    }
    Ok(inv)
}

/// Evaluates `f(H)` for any [`FunctionSpec`].
pub fn apply_spec(h: &DMatrix<f64>, spec: &FunctionSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    if !h.is_square() {
        return Err(Error::domain("matrix function needs a square matrix"));
    }
    let n = h.nrows();
    let ident = || DMatrix::<f64>::identity(n, n);
    match spec {
        FunctionSpec::Exp { beta } => dense_expm(h, *beta),
        FunctionSpec::Exp0 { beta } => Ok(dense_expm(h, *beta)? - ident()),
        FunctionSpec::Resolvent { alpha } => dense_resolvent(h, *alpha),
        FunctionSpec::Resolvent0 { alpha } => Ok(dense_resolvent(h, *alpha)? - ident()),
        FunctionSpec::PowerSeries { coefficients } => {
            // Horner: H (c_1 I + H (c_2 I + ... + H c_K I))
            let mut acc = ident() * *coefficients.last().unwrap();
            for &c in coefficients.iter().rev().skip(1) {
                acc = h * acc + ident() * c;
            }
            Ok(h * acc)
        }
    }
}

/// Smallest `k` with `max_{l>k} |c_l| / max_{j<=k} |c_j| <= delta` for the sequence
/// `c_1, c_2, ...`. Returns the sequence length when only exhaustion satisfies it.
pub fn effective_diameter(coefficients: &[f64], delta: f64) -> Result<usize> {
    if coefficients.is_empty() {
        return Err(Error::domain("coefficient sequence is empty"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("coefficients must be finite"));
    }
    let len = coefficients.len();
    // tail[k] = max_{l > k} |c_l| using 1-based l, tail[len] = 0
    let mut tail = vec![0.0f64; len + 1];
    for k in (0..len).rev() {
        tail[k] = tail[k + 1].max(coefficients[k].abs());
    }
    let mut head = 0.0f64;
    for k in 1..=len {
        head = head.max(coefficients[k - 1].abs());
        if head > 0.0 && tail[k] / head <= delta {
            return Ok(k);
        }
    }
    Err(Error::domain("all coefficients are zero; the diameter ratio is undefined"))
}

/// `c_p = beta^p / p!` for `p = 1..=terms`.
pub fn exp_coefficients(beta: f64, terms: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(terms);
    let mut term = 1.0;
    for p in 1..=terms {
        term *= beta / p as f64;
        c.push(term);
    }
    c
}

/// `c_p = alpha^p` for `p = 1..=terms`.
pub fn resolvent_coefficients(alpha: f64, terms: usize) -> Vec<f64> {
    (1..=terms).map(|p| alpha.powi(p as i32)).collect()
}
