use thiserror::Error;

use crate::domain::Team;

pub type Result<T> = std::result::Result<T, ContestError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContestError {
    #[error("invalid spec: even battle count ({count}); the contest needs 2N+1 battles")]
    EvenBattleCount { count: usize },

    #[error("invalid spec: {count} battle(s); at least 3 are required")]
    TooFewBattles { count: usize },

    #[error("invalid spec: battle {battle} has nonpositive cost for team {team} ({value})")]
    NonPositiveCost { battle: usize, team: Team, value: f64 },

    #[error("invalid spec: battle {battle} has power outside (0,1] ({value})")]
    PowerOutOfRange { battle: usize, value: f64 },

    #[error("invalid spec: nonpositive budget for team {team} ({value})")]
    NonPositiveBudget { team: Team, value: f64 },

    #[error("allocation has {got} shares, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("allocation share for battle {battle} is negative or non-finite ({value})")]
    InvalidShare { battle: usize, value: f64 },

    #[error("allocation shares sum to {sum}, budget is {budget}")]
    BudgetMismatch { sum: f64, budget: f64 },

    #[error("allocation for team {team} is on the boundary: battle {battle} has zero share")]
    BoundaryAllocation { team: Team, battle: usize },

    #[error("allocation owner mismatch: expected team {expected}, got team {got}")]
    OwnerMismatch { expected: Team, got: Team },

    #[error("{count} battles exceed the enumeration budget of {max}")]
    TooManyBattles { count: usize, max: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid history: {0}")]
    InvalidHistory(String),

    #[error("battle index {index} out of range for {count} battles")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite derivative ({0})")]
    NonFiniteDerivative(f64),

    #[error("best response did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("unsupported polynomial matrix size {0}: need odd n with 3 <= n <= 9")]
    UnsupportedSize(usize),

    #[error("coefficient structure violated at alpha {alpha:?}: {reason}")]
    BlockStructure { alpha: Vec<u8>, reason: String },
}
