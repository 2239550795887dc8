//! Correlation statistics between `log pi`, `-log q` and `log psi`, the
//! least-squares Boltzmann fit, and the k-Boltzmann certificate.
//!
//! The random state `I` is uniform over states and every moment is a
//! population moment (divide by `n`). Logarithms are natural.
//!
//! With `X = -log q_I` and `Y = log psi_I`, `log pi_I = X + Y - const`, so
//! `rho = Corr(X, X + Y)` is a function of `rho_tilde = Corr(X, Y)` and
//! `r^2 = Var(Y) / Var(X)` alone:
//!
//! ```text
//! rho = (1 + rho_tilde r) / sqrt(1 + 2 rho_tilde r + r^2)
//! ```
//!
//! The least-squares line `log pi ~ -m log q - b` has slope
//! `m* = 1 + rho_tilde r` and residual `E = (1 - rho^2) Var(log pi)`, and
//! `pi` lies within a factor `exp(4 sqrt(n E))` of
//! `nu_i = q_i^{-m*} / sum_k q_k^{-m*}` in every state.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::RateMatrix;
use crate::error::{Error, Result};
use crate::stationary::{stationary_ctmc, stationary_dtmc};

/// Relative slack applied when comparing an observed quantity against a
/// theoretical bound that it may touch exactly.
pub const BOUND_SLACK: f64 = 1e-12;

/// Natural-log decomposition `log pi_i = -log q_i + log psi_i - constant`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDecomposition {
    pub log_pi: Vec<f64>,
    pub neg_log_q: Vec<f64>,
    pub log_psi: Vec<f64>,
    /// `log sum_k psi_k / q_k`.
    pub constant: f64,
}

impl LogDecomposition {
    pub fn n(&self) -> usize {
        self.log_pi.len()
    }

    /// Largest entrywise violation of the decomposition identity.
    pub fn identity_residual(&self) -> f64 {
        (0..self.n())
            .map(|i| (self.log_pi[i] - (self.neg_log_q[i] + self.log_psi[i] - self.constant)).abs())
            .fold(0.0, f64::max)
    }
}

/// `pi` is obtained by a direct solve on the generator and `psi` by a
/// separate solve on the jump chain, so the identity is a genuine check.
pub fn log_decomposition(m: &RateMatrix) -> Result<LogDecomposition> {
    let pi = stationary_ctmc(m)?;
    let psi = stationary_dtmc(&m.jump_chain())?;
    let q = m.exit_rates();
    let constant = psi
        .probs()
        .iter()
        .zip(q)
        .map(|(p, q)| p / q)
        .sum::<f64>()
        .ln();
    Ok(LogDecomposition {
        log_pi: pi.probs().iter().map(|p| p.ln()).collect(),
        neg_log_q: q.iter().map(|q| -q.ln()).collect(),
        log_psi: psi.probs().iter().map(|p| p.ln()).collect(),
        constant,
    })
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / a.len() as f64
}

pub(crate) fn variance(v: &[f64]) -> f64 {
    covariance(v, v)
}

/// Population standard deviation at most `1e-12 * (1 + max |v_i|)`.
pub fn is_constant(v: &[f64]) -> bool {
    let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    variance(v).sqrt() <= 1e-12 * scale
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let c = covariance(a, b) / (variance(a) * variance(b)).sqrt();
    c.clamp(-1.0, 1.0)
}

/// `(1 + rho_tilde r) / sqrt(1 + 2 rho_tilde r + r^2)`.
pub fn predicted_rho(rho_tilde: f64, r: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho_tilde) {
        return Err(Error::OutOfDomain {
            value: rho_tilde,
            domain: "rho_tilde in [-1, 1]",
        });
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::OutOfDomain {
            value: r,
            domain: "r >= 0",
        });
    }
    let denom = 1.0 + 2.0 * rho_tilde * r + r * r;
    if !(denom > 0.0) {
        return Err(Error::UndefinedAtPole(denom));
    }
    Ok((1.0 + rho_tilde * r) / denom.sqrt())
}

/// Lower bound `(1 - r) / (1 + r)` on `rho`, valid for `0 <= r < 1`.
pub fn rho_lower_bound(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::OutOfDomain {
            value: r,
            domain: "0 <= r < 1",
        });
    }
    Ok((1.0 - r) / (1.0 + r))
}

/// Ordinary least squares for `log pi_i ~ -slope * log q_i - intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeastSquaresFit {
    pub slope: f64,
    pub intercept: f64,
    /// Mean squared residual at the optimum.
    pub error: f64,
}

fn fit_decomposition(d: &LogDecomposition) -> Result<LeastSquaresFit> {
    let x = &d.neg_log_q;
    let y = &d.log_pi;
    if is_constant(x) {
        return Err(Error::DegenerateExitRates);
    }
    let slope = covariance(x, y) / variance(x);
    let intercept = slope * mean(x) - mean(y);
    let error = x
        .iter()
        .zip(y)
        .map(|(x, y)| {
            let e = y - (slope * x - intercept);
            e * e
        })
        .sum::<f64>()
        / x.len() as f64;
    Ok(LeastSquaresFit {
        slope,
        intercept,
        error,
    })
}

pub fn least_squares_fit(m: &RateMatrix) -> Result<LeastSquaresFit> {
    fit_decomposition(&log_decomposition(m)?)
}

/// One state of the Boltzmann comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateRow {
    pub state: usize,
    pub exit_rate: f64,
    pub pi: f64,
    pub nu: f64,
    /// `pi_i / nu_i = pi_i * Z * q_i^{m*}`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// Exponent `m* = 1 + rho_tilde r` used for `nu`.
    pub exponent: f64,
    /// `exp(4 sqrt(n E))`.
    pub k_bound: f64,
    /// Smallest `k` with every `pi_i / nu_i` in `[1/k, k]`.
    pub k_observed: f64,
    /// `max_{i,j} (pi_i / pi_j)(nu_j / nu_i)`.
    pub pairwise_ratio: f64,
    /// `exp(2 sqrt(n E))`.
    pub pairwise_bound: f64,
    pub k_bound_ok: bool,
    pub pairwise_bound_ok: bool,
    pub table: Vec<StateRow>,
}

fn certify(
    d: &LogDecomposition,
    exit_rates: &[f64],
    exponent: f64,
    error: f64,
) -> Certificate {
    let n = d.n();
    let log_q: Vec<f64> = d.neg_log_q.iter().map(|v| -v).collect();
    // log Z = log sum_k q_k^{-m}, via log-sum-exp
    let exps: Vec<f64> = log_q.iter().map(|lq| -exponent * lq).collect();
    let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_z = top + exps.iter().map(|e| (e - top).exp()).sum::<f64>().ln();

    // log(pi_i / nu_i) = log pi_i + m log q_i + log Z
    let log_ratio: Vec<f64> = (0..n)
        .map(|i| d.log_pi[i] + exponent * log_q[i] + log_z)
        .collect();
    let max_dev = log_ratio.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let hi = log_ratio.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = log_ratio.iter().cloned().fold(f64::INFINITY, f64::min);

    let root = (n as f64 * error.max(0.0)).sqrt();
    let k_bound = (4.0 * root).exp();
    let pairwise_bound = (2.0 * root).exp();
    let k_observed = max_dev.exp();
    let pairwise_ratio = (hi - lo).exp();

    let table = (0..n)
        .map(|i| StateRow {
            state: i,
            exit_rate: exit_rates[i],
            pi: d.log_pi[i].exp(),
            nu: (exps[i] - log_z).exp(),
            ratio: log_ratio[i].exp(),
        })
        .collect();

    Certificate {
        exponent,
        k_bound,
        k_observed,
        pairwise_ratio,
        pairwise_bound,
        k_bound_ok: k_observed <= k_bound * (1.0 + BOUND_SLACK),
        pairwise_bound_ok: pairwise_ratio <= pairwise_bound * (1.0 + BOUND_SLACK),
        table,
    }
}

/// Full set of statistics for one chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoltzmannReport {
    pub n: usize,
    /// `Corr(-log q_I, log pi_I)`, computed directly from `pi`.
    pub rho: f64,
    /// `Corr(-log q_I, log psi_I)`; zero when `psi` is constant.
    pub rho_tilde: f64,
    /// `Var(log psi_I) / Var(log q_I)`.
    pub r2: f64,
    /// `1 + rho_tilde r`.
    pub m_star: f64,
    /// Intercept of the least-squares fit.
    pub b_star: f64,
    /// Least-squares error of the fit.
    pub error_e: f64,
    pub var_log_q: f64,
    pub var_log_pi: f64,
    pub var_log_psi: f64,
    pub psi_constant: bool,
    pub fit: LeastSquaresFit,
    pub certificate: Certificate,
}

impl BoltzmannReport {
    pub fn r(&self) -> f64 {
        self.r2.sqrt()
    }

    pub fn k_bound(&self) -> f64 {
        self.certificate.k_bound
    }

    pub fn k_observed(&self) -> f64 {
        self.certificate.k_observed
    }

    /// `rho` from `(rho_tilde, r)` rather than from `pi`.
    pub fn predicted_rho(&self) -> f64 {
        predicted_rho(self.rho_tilde, self.r()).unwrap_or(f64::NAN)
    }

    /// `(1 - rho^2) Var(log pi)`.
    pub fn error_from_rho(&self) -> f64 {
        (1.0 - self.rho) * (1.0 + self.rho) * self.var_log_pi
    }

    /// `r^2 (1 - rho_tilde^2) Var(log q)`.
    pub fn error_from_rho_tilde(&self) -> f64 {
        self.r2 * (1.0 - self.rho_tilde) * (1.0 + self.rho_tilde) * self.var_log_q
    }
}

pub fn correlation_stats(m: &RateMatrix) -> Result<BoltzmannReport> {
    let d = log_decomposition(m)?;
    report_from_decomposition(&d, m.exit_rates())
}

pub fn report_from_decomposition(
    d: &LogDecomposition,
    exit_rates: &[f64],
) -> Result<BoltzmannReport> {
    let x = &d.neg_log_q;
    if is_constant(x) {
        return Err(Error::DegenerateExitRates);
    }
    if is_constant(&d.log_pi) {
        return Err(Error::DegeneratePi);
    }
    let var_log_q = variance(x);
    let var_log_pi = variance(&d.log_pi);
    let rho = correlation(x, &d.log_pi);

    let psi_constant = is_constant(&d.log_psi);
    let (rho_tilde, var_log_psi) = if psi_constant {
        (0.0, 0.0)
    } else {
        (correlation(x, &d.log_psi), variance(&d.log_psi))
    };
    let r2 = var_log_psi / var_log_q;
    let m_star = 1.0 + rho_tilde * r2.sqrt();

    let fit = fit_decomposition(d)?;
    let certificate = certify(d, exit_rates, m_star, fit.error);

    Ok(BoltzmannReport {
        n: d.n(),
        rho,
        rho_tilde,
        r2,
        m_star,
        b_star: fit.intercept,
        error_e: fit.error,
        var_log_q,
        var_log_pi,
        var_log_psi,
        psi_constant,
        fit,
        certificate,
    })
}

pub fn k_boltzmann_certificate(m: &RateMatrix) -> Result<Certificate> {
    Ok(correlation_stats(m)?.certificate)
}

/// `rho` over a grid; row-major with `r2` as the outer index. `None` marks
/// points where the formula is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoGrid {
    pub r2: Vec<f64>,
    pub rho_tilde: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl RhoGrid {
    pub fn get(&self, i_r2: usize, i_rho_tilde: usize) -> Option<f64> {
        self.values[i_r2 * self.rho_tilde.len() + i_rho_tilde]
    }

    /// `(r2, rho_tilde, rho)` triples in row-major order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, Option<f64>)> + '_ {
        let w = self.rho_tilde.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (self.r2[k / w], self.rho_tilde[k % w], *v))
    }
}

pub fn rho_grid(r2_values: &[f64], rho_tilde_values: &[f64]) -> RhoGrid {
    let w = rho_tilde_values.len();
    let values = (0..r2_values.len() * w)
        .into_par_iter()
        .map(|k| predicted_rho(rho_tilde_values[k % w], r2_values[k / w].sqrt()).ok())
        .collect();
    RhoGrid {
        r2: r2_values.to_vec(),
        rho_tilde: rho_tilde_values.to_vec(),
        values,
    }
}
