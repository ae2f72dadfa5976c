use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("n must be at least {min}, got {n}")]
    InvalidN { n: usize, min: usize },

    #[error("not a permutation of 1..={degree}: {images:?}")]
    NotAPermutation { degree: usize, images: Vec<usize> },

    #[error("permutation acts on {got} points but the space needs {expected}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("spaces differ: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("cannot compose: left factor has {left_dual} dual legs, right factor has {right_legs} legs")]
    IncompatibleLegs { left_dual: usize, right_legs: usize },

    #[error("unknown class name `{0}`")]
    UnknownClass(String),

    #[error("class {0} needs n >= 2")]
    ClassNeedsN(String),

    #[error("class {0} is not fixed by the group generators")]
    NotInvariant(String),

    #[error("image of source vector {index} does not lie in the invariant subspace of {target}")]
    ResidualNonzero { index: usize, target: String },

    #[error("cannot parse monomial `{text}`: {reason}")]
    ParseMonomial { text: String, reason: String },

    #[error("unknown table `{0}`")]
    UnknownTable(String),

    #[error("theorem replay failed at step {step}: {claim}")]
    StepFailed { step: String, claim: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
