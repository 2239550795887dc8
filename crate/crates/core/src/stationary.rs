//! Stationary distributions by direct solve, and via the jump chain.

use crate::chain::{check_irreducible, Distribution, JumpChain, RateMatrix, SquareMatrix};
use crate::error::{Error, Result};
use crate::linalg::solve_equilibrated;

/// Solves `pi Q = 0`, `sum pi = 1` with the last balance equation replaced
/// by the normalization row.
pub fn stationary_ctmc(m: &RateMatrix) -> Result<Distribution> {
    let n = m.n();
    let mut a = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, m.generator(j, i));
        }
    }
    solve_normalized(a)
}

/// Solves `psi P = psi`, `sum psi = 1`.
pub fn stationary_dtmc(p: &JumpChain) -> Result<Distribution> {
    let irr = check_irreducible(p);
    if !irr.strongly_connected {
        return Err(Error::NotIrreducible {
            components: irr.components.len(),
        });
    }
    let n = p.n();
    let mut a = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            a.set(i, j, p.prob(j, i) - delta);
        }
    }
    solve_normalized(a)
}

/// `pi_i = (psi_i / q_i) / sum_k psi_k / q_k` with `psi` the jump-chain law.
pub fn stationary_via_jump(m: &RateMatrix) -> Result<Distribution> {
    let psi = stationary_dtmc(&m.jump_chain())?;
    pi_from_psi(&psi, m.exit_rates())
}

pub fn pi_from_psi(psi: &Distribution, exit_rates: &[f64]) -> Result<Distribution> {
    if psi.len() != exit_rates.len() {
        return Err(Error::DimensionMismatch {
            expected: exit_rates.len(),
            found: psi.len(),
        });
    }
    Distribution::from_weights(
        psi.probs()
            .iter()
            .zip(exit_rates)
            .map(|(p, q)| p / q)
            .collect(),
    )
}

/// `max_j |sum_i d_i Q_ij|` using the implied generator diagonal.
pub fn residual(d: &Distribution, m: &RateMatrix) -> Result<f64> {
    let n = m.n();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.len(),
        });
    }
    Ok((0..n)
        .map(|j| (0..n).map(|i| d[i] * m.generator(i, j)).sum::<f64>().abs())
        .fold(0.0, f64::max))
}

/// `max_j |sum_i d_i P_ij - d_j|`.
pub fn residual_dtmc(d: &Distribution, p: &JumpChain) -> Result<f64> {
    let n = p.n();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.len(),
        });
    }
    Ok((0..n)
        .map(|j| ((0..n).map(|i| d[i] * p.prob(i, j)).sum::<f64>() - d[j]).abs())
        .fold(0.0, f64::max))
}

fn solve_normalized(mut a: SquareMatrix) -> Result<Distribution> {
    let n = a.n();
    for j in 0..n {
        a.set(n - 1, j, 1.0);
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    let x = solve_equilibrated(a, b)?;
    if let Some(i) = x.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::SolveFailure(format!(
            "stationary entry {i} is not positive ({})",
            x[i]
        )));
    }
    Distribution::from_weights(x)
}
