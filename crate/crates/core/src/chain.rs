//! Rate matrices, jump chains and probability vectors.
//!
//! A [`RateMatrix`] stores only the off-diagonal rates `q_ij`; the generator
//! diagonal `-q_i` is implied by the exit rates and never stored. The
//! embedded [`JumpChain`] has `p_ij = q_ij / q_i`.

use crate::error::{Error, Result};

/// Largest state count accepted by the dense representation.
pub const MAX_STATES: usize = 4096;

/// Row-sum tolerance for transition matrices.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Dense row-major square matrix of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NonSquare {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Anything that assigns a nonnegative weight to each directed edge `i -> j`.
pub trait TransitionWeights {
    fn n_states(&self) -> usize;
    fn weight(&self, i: usize, j: usize) -> f64;
}

impl TransitionWeights for SquareMatrix {
    fn n_states(&self) -> usize {
        self.n
    }
    fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.get(i, j)
        }
    }
}

/// Off-diagonal rates of an irreducible continuous-time chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    rates: SquareMatrix,
    exit_rates: Vec<f64>,
}

impl RateMatrix {
    /// Validates and builds a rate matrix. The diagonal of the input is ignored.
    pub fn new(mut rates: SquareMatrix) -> Result<Self> {
        let n = rates.n();
        check_size(n)?;
        for i in 0..n {
            rates.set(i, i, 0.0);
            for j in 0..n {
                let v = rates.get(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::NegativeRate {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        let exit_rates: Vec<f64> = (0..n).map(|i| rates.row(i).iter().sum()).collect();
        if let Some(i) = exit_rates.iter().position(|&q| q <= 0.0) {
            return Err(Error::AbsorbingState(i));
        }
        let irr = check_irreducible(&rates);
        if !irr.strongly_connected {
            return Err(Error::NotIrreducible {
                components: irr.components.len(),
            });
        }
        Ok(Self { rates, exit_rates })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.rates.n()
    }

    #[inline]
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rates.get(i, j)
    }

    pub fn rates(&self) -> &SquareMatrix {
        &self.rates
    }

    /// Total exit rates `q_i = sum_{k != i} q_ik`.
    pub fn exit_rates(&self) -> &[f64] {
        &self.exit_rates
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.exit_rates.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_rate(&self) -> f64 {
        (0..self.n())
            .flat_map(|i| self.rates.row(i).iter().cloned())
            .fold(0.0, f64::max)
    }

    /// Generator entry with the implied diagonal `-q_i`.
    #[inline]
    pub fn generator(&self, i: usize, j: usize) -> f64 {
        if i == j {
            -self.exit_rates[i]
        } else {
            self.rates.get(i, j)
        }
    }

    /// Multiplies every rate by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let n = self.n();
        let mut m = self.rates.clone();
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, m.get(i, j) * c);
            }
        }
        Self::new(m)
    }

    pub fn irreducibility(&self) -> Irreducibility {
        check_irreducible(&self.rates)
    }

    /// Embedded jump chain `p_ij = q_ij / q_i`.
    pub fn jump_chain(&self) -> JumpChain {
        let n = self.n();
        let mut probs = SquareMatrix::zeros(n);
        for i in 0..n {
            let q = self.exit_rates[i];
            for j in 0..n {
                if i != j {
                    probs.set(i, j, self.rates.get(i, j) / q);
                }
            }
        }
        JumpChain { probs }
    }
}

impl TransitionWeights for RateMatrix {
    fn n_states(&self) -> usize {
        self.n()
    }
    fn weight(&self, i: usize, j: usize) -> f64 {
        self.rate(i, j)
    }
}

/// Row-stochastic transition matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChain {
    probs: SquareMatrix,
}

impl JumpChain {
    pub fn new(probs: SquareMatrix) -> Result<Self> {
        let n = probs.n();
        check_size(n)?;
        for i in 0..n {
            if probs.get(i, i) != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            let mut sum = 0.0;
            for j in 0..n {
                let v = probs.get(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ProbabilityOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::RowNotStochastic { row: i, sum });
            }
        }
        Ok(Self { probs })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.probs.n()
    }

    #[inline]
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs.get(i, j)
    }

    pub fn probs(&self) -> &SquareMatrix {
        &self.probs
    }

    pub fn irreducibility(&self) -> Irreducibility {
        check_irreducible(&self.probs)
    }

    /// Rates `q_ij = p_ij * q_i` for the given exit rates.
    pub fn lift(&self, exit_rates: &[f64]) -> Result<RateMatrix> {
        let n = self.n();
        if exit_rates.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: exit_rates.len(),
            });
        }
        for (state, &value) in exit_rates.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonpositiveExitRate { state, value });
            }
        }
        let mut rates = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rates.set(i, j, self.probs.get(i, j) * exit_rates[i]);
                }
            }
        }
        RateMatrix::new(rates)
    }
}

impl TransitionWeights for JumpChain {
    fn n_states(&self) -> usize {
        self.n()
    }
    fn weight(&self, i: usize, j: usize) -> f64 {
        self.prob(i, j)
    }
}

/// Probability vector over states.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Normalizes a vector of nonnegative weights to sum to one.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::SolveFailure(format!(
                "cannot normalize weights with total {total}"
            )));
        }
        Ok(Self(weights.into_iter().map(|w| w / total).collect()))
    }

    /// Wraps a vector as-is, without normalizing.
    pub fn from_vec(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Result of a strong-connectivity query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Irreducibility {
    pub strongly_connected: bool,
    /// Strongly connected components, each sorted, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
}

/// Strongly connected components of the digraph with an edge `i -> j`
/// wherever the weight is exactly positive (Kosaraju, iterative).
pub fn check_irreducible<W: TransitionWeights + ?Sized>(w: &W) -> Irreducibility {
    let n = w.n_states();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && w.weight(i, j) > 0.0).collect())
        .collect();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, s) in succ.iter().enumerate() {
        for &j in s {
            pred[j].push(i);
        }
    }

    // finishing order on the forward graph
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((v, k)) = stack.pop() {
            if k < succ[v].len() {
                stack.push((v, k + 1));
                let u = succ[v][k];
                if !visited[u] {
                    visited[u] = true;
                    stack.push((u, 0));
                }
            } else {
                order.push(v);
            }
        }
    }

    let mut comp = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = Vec::new();
        comp[root] = id;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            members.push(v);
            for &u in &pred[v] {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by_key(|c| c[0]);
    Irreducibility {
        strongly_connected: n > 0 && components.len() == 1,
        components,
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewStates(n));
    }
    if n > MAX_STATES {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}
