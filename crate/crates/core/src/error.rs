use thiserror::Error;

/// Errors raised by the library.
///
/// Proven non-existence, budget exhaustion and malformed input are kept as
/// distinct variants so callers (and the CLI exit status) can tell them apart.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed group description `{0}`")]
    MalformedGroup(String),

    #[error("modulus {0} is below 2")]
    ModulusTooSmall(u64),

    #[error("group order exceeds the ceiling of {ceiling}")]
    OrderOverflow { ceiling: u64 },

    #[error("element has {got} coordinates but the group has {expected} factors")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("residue {residue} is out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },

    #[error("group of order {order} cannot fill a square of side {side}")]
    OrderSideMismatch { order: u64, side: usize },

    #[error("group order {0} is not a perfect square")]
    NonSquareOrder(u64),

    #[error("groups {left} and {right} do not match")]
    SpecMismatch { left: String, right: String },

    #[error("square is not magic")]
    NotMagic,

    #[error("square is not zero-sum")]
    NotZeroSum,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no {what} exists: {reason}")]
    NonExistence { what: &'static str, reason: String },

    #[error("search budget of {budget} nodes exhausted while looking for {what}")]
    BudgetExhausted { what: &'static str, budget: u64 },

    #[error("construction incomplete: {0}")]
    Incomplete(String),

    #[error("construction produced an invalid result: {0}")]
    VerificationFailed(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
