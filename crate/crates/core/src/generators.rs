//! Named fixture chains, the cyclic doubly stochastic family, and random
//! rate ensembles.

use crate::chain::{JumpChain, RateMatrix, SquareMatrix};
use crate::error::{Error, Result};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// Exit rates `(4, 8, 16, 32)` with a doubly stochastic jump chain.
    Q1,
    /// Constant exit rate 6.
    Q2,
}

pub fn example_chain(which: Example) -> RateMatrix {
    let rows: [[f64; 4]; 4] = match which {
        Example::Q1 => [
            [0.0, 2.0, 1.0, 1.0],
            [2.0, 0.0, 4.0, 2.0],
            [4.0, 4.0, 0.0, 8.0],
            [16.0, 8.0, 8.0, 0.0],
        ],
        Example::Q2 => [
            [0.0, 2.0, 3.0, 1.0],
            [3.0, 0.0, 2.0, 1.0],
            [3.0, 1.0, 0.0, 2.0],
            [1.0, 3.0, 2.0, 0.0],
        ],
    };
    RateMatrix::from_rows(&rows).expect("fixture chains are valid")
}

/// Circulant transition matrix with `p_ij = a_d`, `d = (j - i) mod n`,
/// where `a_d = 2^-d` for `d <= n - 2` and `a_{n-1} = 2^-(n-2)`.
///
/// Every row and column sums to one, and the force around
/// `0 -> 1 -> ... -> n-1 -> 0` is `n (n - 3) log 2`.
pub fn cyclic_doubly_stochastic(n: usize) -> Result<JumpChain> {
    if n < 3 {
        return Err(Error::BadSize(n));
    }
    let a = |d: usize| -> f64 {
        let e = if d <= n - 2 { d } else { n - 2 };
        0.5f64.powi(e as i32)
    };
    let mut p = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p.set(i, j, a((j + n - i) % n));
            }
        }
    }
    JumpChain::new(p)
}

/// Exit-rate presets for lifting the cyclic family.
#[derive(Debug, Clone, PartialEq)]
pub enum ExitRates {
    /// `q_i = base^i` for zero-based state `i`.
    Geometric(f64),
    List(Vec<f64>),
}

impl ExitRates {
    pub fn resolve(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            ExitRates::Geometric(base) => {
                if !(*base > 0.0 && base.is_finite()) {
                    return Err(Error::BadBounds(format!("geometric base must be positive, got {base}")));
                }
                Ok((0..n).map(|i| base.powi(i as i32)).collect())
            }
            ExitRates::List(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: v.len(),
                    });
                }
                Ok(v.clone())
            }
        }
    }
}

/// Lifts [`cyclic_doubly_stochastic`] with the given exit rates. The jump
/// chain's stationary law is uniform, so `pi_i` is proportional to `1/q_i`.
pub fn lifted_cyclic_chain(n: usize, exit_rates: &ExitRates, require_nonconstant: bool) -> Result<RateMatrix> {
    let p = cyclic_doubly_stochastic(n)?;
    let q = exit_rates.resolve(n)?;
    if require_nonconstant && q.iter().all(|&v| v == q[0]) {
        return Err(Error::ConstantExitRates);
    }
    p.lift(&q)
}

fn random_chain(n: usize, seed: u64, mut draw: impl FnMut(f64) -> f64) -> Result<RateMatrix> {
    if n < 2 {
        return Err(Error::TooFewStates(n));
    }
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let edge = (i * n + j) as u64;
                m.set(i, j, draw(Stream::new(seed, edge).uniform()));
            }
        }
    }
    RateMatrix::new(m)
}

/// Every directed rate i.i.d. uniform on `[low, high]`.
pub fn random_iid_chain(n: usize, low: f64, high: f64, seed: u64) -> Result<RateMatrix> {
    if !(low > 0.0 && high >= low && high.is_finite()) {
        return Err(Error::BadBounds(format!(
            "need 0 < low <= high < inf, got [{low}, {high}]"
        )));
    }
    random_chain(n, seed, |u| low + (high - low) * u)
}

/// Every directed rate `10^u`, `u` i.i.d. uniform on `[-width, width]`.
pub fn random_heavy_tail_chain(n: usize, width: f64, seed: u64) -> Result<RateMatrix> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::BadBounds(format!("width must be positive, got {width}")));
    }
    random_chain(n, seed, |u| 10f64.powf(-width + 2.0 * width * u))
}
