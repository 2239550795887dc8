//! Jump-and-hold Monte Carlo simulation.
//!
//! From state `i` the holding time is `-ln(u) / q_i` with `u` uniform on
//! `(0, 1]`, and the next state is found by inverting the cumulative jump
//! probabilities of row `i` with a second uniform draw (the first index
//! whose cumulative sum exceeds the draw). Replica `r` draws from stream
//! `r` of the seed, see [`crate::rng`].

use rayon::prelude::*;

use crate::chain::{Distribution, RateMatrix};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Visited states with their holding times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<usize>,
    pub holding_times: Vec<f64>,
    pub total_time: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Drops the first `k` segments.
    pub fn after_burn_in(&self, k: usize) -> Trajectory {
        let k = k.min(self.len());
        let holding_times = self.holding_times[k..].to_vec();
        Trajectory {
            states: self.states[k..].to_vec(),
            total_time: holding_times.iter().sum(),
            holding_times,
        }
    }
}

struct Sampler<'a> {
    m: &'a RateMatrix,
    cumulative: Vec<Vec<f64>>,
}

impl<'a> Sampler<'a> {
    fn new(m: &'a RateMatrix) -> Self {
        let p = m.jump_chain();
        let cumulative = (0..m.n())
            .map(|i| {
                let mut acc = 0.0;
                p.probs()
                    .row(i)
                    .iter()
                    .map(|v| {
                        acc += v;
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { m, cumulative }
    }

    fn next_state(&self, i: usize, v: f64) -> usize {
        let cum = &self.cumulative[i];
        let j = cum.partition_point(|&c| c <= v);
        if j < cum.len() {
            j
        } else {
            // v beyond the rounded row total: last reachable state
            (0..cum.len())
                .rev()
                .find(|&j| self.m.rate(i, j) > 0.0)
                .expect("valid chains have an exit")
        }
    }

    fn run(&self, start: usize, n_jumps: usize, stream: &mut Stream) -> Trajectory {
        let q = self.m.exit_rates();
        let mut states = Vec::with_capacity(n_jumps);
        let mut holding_times = Vec::with_capacity(n_jumps);
        let mut total_time = 0.0;
        let mut state = start;
        for _ in 0..n_jumps {
            let hold = -stream.uniform_open_closed().ln() / q[state];
            states.push(state);
            holding_times.push(hold);
            total_time += hold;
            state = self.next_state(state, stream.uniform());
        }
        Trajectory {
            states,
            holding_times,
            total_time,
        }
    }
}

fn check_args(m: &RateMatrix, start: usize, n_jumps: usize) -> Result<()> {
    if start >= m.n() {
        return Err(Error::BadStart { start, n: m.n() });
    }
    if n_jumps == 0 {
        return Err(Error::EmptyTrajectory);
    }
    Ok(())
}

/// Simulates `n_jumps` holding segments starting in `start`.
pub fn simulate(m: &RateMatrix, start: usize, n_jumps: usize, seed: u64) -> Result<Trajectory> {
    simulate_replica(m, start, n_jumps, seed, 0)
}

pub fn simulate_replica(
    m: &RateMatrix,
    start: usize,
    n_jumps: usize,
    seed: u64,
    replica: u64,
) -> Result<Trajectory> {
    check_args(m, start, n_jumps)?;
    let mut stream = Stream::new(seed, replica);
    Ok(Sampler::new(m).run(start, n_jumps, &mut stream))
}

/// Runs replicas `0..replicas` in parallel; output is ordered by replica.
pub fn simulate_replicas(
    m: &RateMatrix,
    start: usize,
    n_jumps: usize,
    seed: u64,
    replicas: usize,
) -> Result<Vec<Trajectory>> {
    check_args(m, start, n_jumps)?;
    let sampler = Sampler::new(m);
    Ok((0..replicas as u64)
        .into_par_iter()
        .map(|r| sampler.run(start, n_jumps, &mut Stream::new(seed, r)))
        .collect())
}

/// Fraction of total time spent in each state.
pub fn occupation_fractions(t: &Trajectory, n: usize) -> Result<Distribution> {
    if t.is_empty() || !(t.total_time > 0.0) {
        return Err(Error::EmptyTrajectory);
    }
    let mut w = vec![0.0; n];
    for (&s, &h) in t.states.iter().zip(&t.holding_times) {
        w[s] += h;
    }
    Ok(Distribution::from_vec(w.into_iter().map(|x| x / t.total_time).collect()))
}

/// Fraction of jump-chain steps spent in each state, ignoring holding times.
pub fn jump_frequencies(t: &Trajectory, n: usize) -> Result<Distribution> {
    if t.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut c = vec![0usize; n];
    for &s in &t.states {
        c[s] += 1;
    }
    let total = t.len() as f64;
    Ok(Distribution::from_vec(c.into_iter().map(|x| x as f64 / total).collect()))
}

/// Estimates averaged over replicas in replica order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaEstimate {
    pub replicas: usize,
    pub occupation: Distribution,
    pub jump_frequencies: Distribution,
}

pub fn aggregate(trajectories: &[Trajectory], n: usize, burn_in: usize) -> Result<ReplicaEstimate> {
    if trajectories.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut occ = vec![0.0; n];
    let mut jumps = vec![0.0; n];
    for t in trajectories {
        let t = t.after_burn_in(burn_in);
        for (acc, v) in occ.iter_mut().zip(occupation_fractions(&t, n)?.probs()) {
            *acc += v;
        }
        for (acc, v) in jumps.iter_mut().zip(jump_frequencies(&t, n)?.probs()) {
            *acc += v;
        }
    }
    let r = trajectories.len() as f64;
    Ok(ReplicaEstimate {
        replicas: trajectories.len(),
        occupation: Distribution::from_vec(occ.into_iter().map(|v| v / r).collect()),
        jump_frequencies: Distribution::from_vec(jumps.into_iter().map(|v| v / r).collect()),
    })
}
