//! Local/global decomposition of continuous-time Markov chain stationary
//! distributions.
//!
//! A stationary distribution `pi` factors into exit rates `q` (local) and
//! the stationary law `psi` of the embedded jump chain (global):
//! `pi_i` is proportional to `psi_i / q_i`. The [`analysis`] module turns
//! that factorization into correlation statistics and a certificate for how
//! close `pi` is to the Boltzmann form `q_i^{-m} / Z`.

// NaN must fail positivity checks, hence `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod chain;
pub mod cycles;
pub mod error;
pub mod generators;
pub mod io;
mod linalg;
pub mod rng;
pub mod simulate;
pub mod stationary;

pub use analysis::{
    correlation_stats, k_boltzmann_certificate, least_squares_fit, log_decomposition,
    predicted_rho, rho_grid, rho_lower_bound, BoltzmannReport, Certificate, LeastSquaresFit,
    LogDecomposition, RhoGrid, StateRow,
};
pub use chain::{check_irreducible, Distribution, Irreducibility, JumpChain, RateMatrix, SquareMatrix};
pub use cycles::{cycle_force, is_detailed_balanced, microscopically_reversible, Cycle};
pub use error::{Error, Result};
pub use generators::{
    cyclic_doubly_stochastic, example_chain, lifted_cyclic_chain, random_heavy_tail_chain,
    random_iid_chain, Example, ExitRates,
};
pub use simulate::{jump_frequencies, occupation_fractions, simulate, Trajectory};
pub use stationary::{residual, stationary_ctmc, stationary_dtmc, stationary_via_jump};
