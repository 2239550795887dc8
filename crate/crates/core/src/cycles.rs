//! Cycle forces, microscopic reversibility and detailed balance.

use crate::chain::{RateMatrix, TransitionWeights};
use crate::error::{Error, Result};
use crate::stationary::stationary_ctmc;

/// Default detailed-balance tolerance, relative to the largest rate.
pub const DEFAULT_BALANCE_TOL: f64 = 1e-10;

/// Directed cycle `i_1 -> i_2 -> ... -> i_k -> i_1` over distinct states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    pub fn new(states: Vec<usize>, n: usize) -> Result<Self> {
        if states.len() < 3 {
            return Err(Error::BadCycle(format!(
                "need at least 3 states, got {}",
                states.len()
            )));
        }
        if let Some(&s) = states.iter().find(|&&s| s >= n) {
            return Err(Error::BadCycle(format!("state {s} out of range for {n} states")));
        }
        let mut seen = vec![false; n];
        for &s in &states {
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::BadCycle(format!("state {s} repeated")));
            }
        }
        Ok(Self(states))
    }

    /// `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn around(n: usize) -> Result<Self> {
        Self::new((0..n).collect(), n)
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().cloned().collect())
    }

    pub fn rotated(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        let len = v.len();
        v.rotate_left(k % len);
        Self(v)
    }

    fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.0.len();
        (0..k).map(move |i| (self.0[i], self.0[(i + 1) % k]))
    }
}

/// `log(prod forward weights / prod reverse weights)`, accumulated as a
/// sum of per-edge log-ratios.
pub fn cycle_force<W: TransitionWeights + ?Sized>(w: &W, cycle: &Cycle) -> Result<f64> {
    let n = w.n_states();
    if let Some(&s) = cycle.states().iter().find(|&&s| s >= n) {
        return Err(Error::BadCycle(format!("state {s} out of range for {n} states")));
    }
    let mut force = 0.0;
    for (a, b) in cycle.edges() {
        let fwd = w.weight(a, b);
        let rev = w.weight(b, a);
        if !(fwd > 0.0) {
            return Err(Error::MissingEdge { from: a, to: b });
        }
        if !(rev > 0.0) {
            return Err(Error::MissingEdge { from: b, to: a });
        }
        force += fwd.ln() - rev.ln();
    }
    Ok(force)
}

/// `q_ij > 0` iff `q_ji > 0` for every pair.
pub fn microscopically_reversible<W: TransitionWeights + ?Sized>(w: &W) -> bool {
    let n = w.n_states();
    (0..n).all(|i| ((i + 1)..n).all(|j| (w.weight(i, j) > 0.0) == (w.weight(j, i) > 0.0)))
}

/// Largest detailed-balance violation `max |pi_i q_ij - pi_j q_ji|`.
pub fn max_flux_imbalance(m: &RateMatrix) -> Result<f64> {
    let pi = stationary_ctmc(m)?;
    let n = m.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((pi[i] * m.rate(i, j) - pi[j] * m.rate(j, i)).abs());
        }
    }
    Ok(worst)
}

/// Detailed balance through pairwise fluxes; `tol` is relative to the
/// largest rate.
pub fn is_detailed_balanced(m: &RateMatrix, tol: f64) -> Result<bool> {
    Ok(max_flux_imbalance(m)? <= tol * m.max_rate())
}
