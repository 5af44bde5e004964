use thiserror::Error;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable {var} out of range 1..={num_vars}")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("clause {index} has no literals")]
    EmptyClause { index: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("assignment order is not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("assignment has {got} values, formula has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("all variables are already assigned")]
    TraceComplete,
    #[error("Lemma 1 violated at variable {var}: t2 + f2 = {sum} < 0")]
    NegativeBoundSum { var: usize, sum: i128 },
    #[error("LP value {index} lies outside [0, 1]")]
    LpValueOutOfRange { index: usize },
    #[error("LP solution does not match the formula: {0}")]
    LpMismatch(&'static str),
    #[error("rounding failed at variable {var}: neither LP drop is covered by its bound change")]
    RoundingDisjunction { var: usize },
    #[error("rounding failed at variable {var}: LP decrease exceeds the bound increase")]
    RoundingStepBound { var: usize },
    #[error("{what} requires n <= {limit}, formula has {n} variables")]
    TooManyVariables {
        what: &'static str,
        n: usize,
        limit: usize,
    },
}
