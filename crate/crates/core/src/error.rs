use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NonSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("chain must have at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("chain has {0} states; dense storage is limited to {max}", max = crate::chain::MAX_STATES)]
    TooLarge(usize),
    #[error("entry ({row}, {col}) is negative: {value}")]
    NegativeRate { row: usize, col: usize, value: f64 },
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("state {0} has zero exit rate")]
    AbsorbingState(usize),
    #[error("chain is not irreducible ({components} strongly connected components)")]
    NotIrreducible { components: usize },
    #[error("row {row} of the transition matrix sums to {sum}, expected 1")]
    RowNotStochastic { row: usize, sum: f64 },
    #[error("diagonal entry of row {0} must be zero")]
    NonzeroDiagonal(usize),
    #[error("transition probability ({row}, {col}) = {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { row: usize, col: usize, value: f64 },
    #[error("exit rate of state {state} must be positive, got {value}")]
    NonpositiveExitRate { state: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("exit rates are constant; the correlation with log q is undefined")]
    DegenerateExitRates,
    #[error("stationary distribution is constant; the correlation with log pi is undefined")]
    DegeneratePi,
    #[error("1 + 2*rho_tilde*r + r^2 = {0} is not positive")]
    UndefinedAtPole(f64),
    #[error("value {value} is outside the domain {domain}")]
    OutOfDomain { value: f64, domain: &'static str },
    #[error("invalid cycle: {0}")]
    BadCycle(String),
    #[error("edge {from} -> {to} has zero weight; cycle force undefined")]
    MissingEdge { from: usize, to: usize },
    #[error("cyclic construction needs n >= 3, got {0}")]
    BadSize(usize),
    #[error("exit rates are constant but nonconstant rates were required")]
    ConstantExitRates,
    #[error("invalid bounds: {0}")]
    BadBounds(String),
    #[error("start state {start} out of range for {n} states")]
    BadStart { start: usize, n: usize },
    #[error("trajectory is empty")]
    EmptyTrajectory,
}

pub type Result<T> = std::result::Result<T, Error>;
