use thiserror::Error;

/// Errors raised by the engine.
///
/// Every variant corresponds to a contract violation that the caller can act
/// on; none of them are recoverable by retrying the same computation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoaError {
    #[error("phase e^(2 pi i * {0}) is not a fourth root of unity")]
    UnrepresentablePhase(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("lattice {name} is invalid: {reason}")]
    InvalidLattice { name: String, reason: String },
    #[error("not an isometry: {0}")]
    NotAnIsometry(String),
    #[error("sublattice is not of full rank: {0}")]
    NotFullRank(String),
    #[error("weight {weight} exceeds the cutoff {cutoff}")]
    CutoffExceeded { weight: i64, cutoff: u32 },
    #[error("not an affine sl2 triple: {0}")]
    NotAffineTriple(String),
    #[error("not conformal: {identity} fails at grade {grade}")]
    NotConformal { identity: String, grade: u32 },
    #[error("unsupported lift: {0}")]
    UnsupportedLift(String),
    #[error("weight-one modes do not span grade {0}")]
    NotGenerated(u32),
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("no power up to {bound} is the identity")]
    OrderExceedsBound { bound: u32 },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("grade mismatch: {0} vs {1}")]
    GradeMismatch(u32, u32),
    #[error("{0}")]
    Unsupported(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("cannot read {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, VoaError>;
