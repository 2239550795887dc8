//! Independent reference computations for integration tests.
//!
//! Nothing here calls the library's solver or statistics code; chains are
//! read only through their raw rates.

#![allow(dead_code)]

use ctmc_boltz::rng::Stream;
use ctmc_boltz::RateMatrix;
use nalgebra::{DMatrix, DVector};

/// `pi Q = 0`, `sum pi = 1` as an overdetermined (n+1) x n system: all n
/// balance equations plus the normalization row, solved with nalgebra's QR.
pub fn oracle_pi(m: &RateMatrix) -> Vec<f64> {
    let n = m.n();
    let mut a = DMatrix::<f64>::zeros(n + 1, n);
    for i in 0..n {
        let exit: f64 = (0..n).filter(|&k| k != i).map(|k| m.rate(i, k)).sum();
        for j in 0..n {
            // row j of Q^T is column j of Q
            a[(j, i)] = if i == j { -exit } else { m.rate(i, j) };
        }
    }
    for j in 0..n {
        a[(n, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n + 1);
    b[n] = 1.0;
    let qr = a.clone().qr();
    let rhs = qr.q().transpose() * &b;
    let x = qr.r().solve_upper_triangular(&rhs).expect("full column rank");
    x.iter().cloned().collect()
}

/// `psi P = psi` with `p_ij = q_ij / q_i`, same construction.
pub fn oracle_psi(m: &RateMatrix) -> Vec<f64> {
    let n = m.n();
    let mut a = DMatrix::<f64>::zeros(n + 1, n);
    for i in 0..n {
        let exit: f64 = (0..n).filter(|&k| k != i).map(|k| m.rate(i, k)).sum();
        for j in 0..n {
            let p = if i == j { 0.0 } else { m.rate(i, j) / exit };
            a[(j, i)] = p - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n + 1);
    b[n] = 1.0;
    let qr = a.qr();
    let rhs = qr.q().transpose() * &b;
    let x = qr.r().solve_upper_triangular(&rhs).expect("full column rank");
    x.iter().cloned().collect()
}

pub struct OracleStats {
    pub rho: f64,
    pub rho_tilde: f64,
    pub r2: f64,
    pub var_log_q: f64,
    pub var_log_pi: f64,
}

fn moments(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    // two-pass population moments: (var x, var y, cov)
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut vx = 0.0;
    let mut vy = 0.0;
    let mut c = 0.0;
    for (a, b) in x.iter().zip(y) {
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
        c += (a - mx) * (b - my);
    }
    (vx / n, vy / n, c / n)
}

/// Correlation statistics straight from the definitions.
pub fn oracle_stats(m: &RateMatrix) -> OracleStats {
    let n = m.n();
    let pi = oracle_pi(m);
    let psi = oracle_psi(m);
    let x: Vec<f64> = (0..n)
        .map(|i| -(0..n).filter(|&k| k != i).map(|k| m.rate(i, k)).sum::<f64>().ln())
        .collect();
    let lp: Vec<f64> = pi.iter().map(|v| v.ln()).collect();
    let ls: Vec<f64> = psi.iter().map(|v| v.ln()).collect();
    let (vx, vp, cp) = moments(&x, &lp);
    let (_, vs, cs) = moments(&x, &ls);
    let rho_tilde = if vs.sqrt() <= 1e-12 { 0.0 } else { cs / (vx * vs).sqrt() };
    OracleStats {
        rho: cp / (vx * vp).sqrt(),
        rho_tilde,
        r2: vs / vx,
        var_log_q: vx,
        var_log_pi: vp,
    }
}

/// Regression of `log pi` on `-log q` by solving the 2x2 normal equations
/// with Cramer's rule. Returns `(slope, intercept b, mean squared error)`
/// for the model `log pi ~ -slope log q - b`.
pub fn normal_equations_fit(neg_log_q: &[f64], log_pi: &[f64]) -> (f64, f64, f64) {
    let n = neg_log_q.len() as f64;
    let sx: f64 = neg_log_q.iter().sum();
    let sy: f64 = log_pi.iter().sum();
    let sxx: f64 = neg_log_q.iter().map(|x| x * x).sum();
    let sxy: f64 = neg_log_q.iter().zip(log_pi).map(|(x, y)| x * y).sum();
    // [n sx; sx sxx] [c0; c1] = [sy; sxy], model y = c1 x + c0
    let det = n * sxx - sx * sx;
    let c0 = (sy * sxx - sx * sxy) / det;
    let c1 = (n * sxy - sx * sy) / det;
    let err = neg_log_q
        .iter()
        .zip(log_pi)
        .map(|(x, y)| {
            let e = y - (c1 * x + c0);
            e * e
        })
        .sum::<f64>()
        / n;
    (c1, -c0, err)
}

/// Force via the logarithm of the explicit rate products.
pub fn oracle_cycle_force(w: impl Fn(usize, usize) -> f64, cycle: &[usize]) -> f64 {
    let k = cycle.len();
    let mut fwd = 1.0f64;
    let mut rev = 1.0f64;
    for i in 0..k {
        let (a, b) = (cycle[i], cycle[(i + 1) % k]);
        fwd *= w(a, b);
        rev *= w(b, a);
    }
    (fwd / rev).ln()
}

/// Uniform random cycle of length 3..=n drawn from a seeded stream.
pub fn random_cycle(n: usize, stream: &mut Stream) -> Vec<usize> {
    let mut states: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (stream.uniform() * (i + 1) as f64) as usize;
        states.swap(i, j.min(i));
    }
    let len = 3 + (stream.uniform() * (n - 2) as f64) as usize;
    states.truncate(len.min(n));
    states
}

/// The mixed ensemble: even index i.i.d. uniform [1, 2], odd index
/// heavy-tailed width 3, `n` cycling through 3..=50.
pub fn ensemble(count: usize) -> Vec<(String, RateMatrix)> {
    (0..count)
        .map(|k| {
            let n = 3 + (k / 2) % 48;
            let seed = 1000 + k as u64;
            if k % 2 == 0 {
                (
                    format!("iid n={n} seed={seed}"),
                    ctmc_boltz::random_iid_chain(n, 1.0, 2.0, seed).unwrap(),
                )
            } else {
                (
                    format!("heavy n={n} seed={seed}"),
                    ctmc_boltz::random_heavy_tail_chain(n, 3.0, seed).unwrap(),
                )
            }
        })
        .collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
