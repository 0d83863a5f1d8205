use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree {0} is not supported (expected 2 or 3)")]
    DegreeUnsupported(usize),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("precision insufficient: root intervals have width 2^-{have}, need 2^-{need}")]
    PrecisionInsufficient { have: u32, need: u32 },
    #[error("polynomial is reducible over Q")]
    ReducibleInput,
    #[error("polynomial is not totally real with distinct roots")]
    NotTotallyReal,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("invalid modulus {0}")]
    InvalidModulus(u64),
    #[error("closing failed: {0}")]
    ClosingFailed(String),
    #[error("distance undefined outside the normal neighborhood of the identity")]
    DistanceUndefined,
    #[error("insufficient input: {0}")]
    InsufficientInput(String),
    #[error("singular matrix")]
    Singular,
    #[error("invalid argument: {0}")]
    Invalid(String),
}
