//! Scaling-and-squaring matrix exponential with diagonal Padé approximants
//! (Higham 2005, "The scaling and squaring method for the matrix exponential revisited").

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

pub(crate) fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(beta * h)`.
pub fn dense_expm(h: &DMatrix<f64>, beta: f64) -> Result<DMatrix<f64>> {
    if !h.is_square() {
        return Err(Error::domain(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::domain(format!("beta must be finite and >= 0, got {beta}")));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let a = h * beta;
    let norm = one_norm(&a);
    if !norm.is_finite() {
        return Err(Error::Overflow(format!("||beta*H||_1 = {norm}")));
    }

    let result = if norm <= THETA_3 {
        pade_low(&a, &B3)?
    } else if norm <= THETA_5 {
        pade_low(&a, &B5)?
    } else if norm <= THETA_7 {
        pade_low(&a, &B7)?
    } else if norm <= THETA_9 {
        pade_low(&a, &B9)?
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0);
        if s > 1023.0 {
            return Err(Error::Overflow(format!("||beta*H||_1 = {norm:e} needs 2^{s} scaling")));
        }
        let scaled = &a / 2f64.powi(s as i32);
        let mut x = pade13(&scaled)?;
        for _ in 0..s as i32 {
            x = &x * &x;
        }
        x
    };
    if result.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("matrix exponential overflowed".into()));
    }
    Ok(result)
}

/// Padé approximant of degree 3, 5, 7 or 9 (`b.len() == m + 1`).
fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let mut u_inner = &ident * b[1];
    let mut v = &ident * b[0];
    let mut power = ident.clone();
    for k in (2..b.len()).step_by(2) {
        power = &power * &a2;
        v += &power * b[k];
        if k + 1 < b.len() {
            u_inner += &power * b[k + 1];
        }
    }
    let u = a * u_inner;
    solve_pade(&u, &v)
}

fn pade13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let b = &B13;
    let n = a.nrows();
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (u_hi + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1]);
    let v_hi = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = v_hi + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];
    solve_pade(&u, &v)
}

/// Solves `(V - U) X = V + U`.
fn solve_pade(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or(Error::IllConditioned { condition: f64::INFINITY })
}
