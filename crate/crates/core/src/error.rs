use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("polynomial is not homogeneous: exponents {first:?} and {second:?} have different degrees")]
    NotHomogeneous { first: Vec<u32>, second: Vec<u32> },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation needs a nonzero polynomial")]
    ZeroPolynomial,
    #[error("insufficient series precision: {0}")]
    InsufficientPrecision(String),
    #[error("not a curve branch: {0}")]
    NotACurveBranch(String),
    #[error("root of {0} is not representable in the current field tower")]
    RootOutsideField(String),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("base point of the Halphen map")]
    BasePoint,
    #[error("point is singular on the complete intersection")]
    SingularPoint,
    #[error("point lies in the plane t = 0")]
    AtInfinity,
    #[error("polar form vanishes identically")]
    DegeneratePolar,
    #[error("transform vanishes identically (non-generic quadric)")]
    IdenticallyZero,
    #[error("tangent map is degenerate (the curve is a line)")]
    DegenerateTangentMap,
    #[error("generic samples disagree: {0}")]
    InconsistentSamples(String),
    #[error("correction term depends on the sampled covector: {0}")]
    UnstableCorrection(String),
    #[error("branch lies inside the surface")]
    BranchInsideSurface,
    #[error("genus formula gives a non-integer value ({0}/2)")]
    NonIntegerGenus(i64),
    #[error("predicted type {0:?} has coinciding components")]
    DegenerateType([u32; 3]),
    #[error("quadric is not generic: {0}")]
    NonGenericQuadric(String),
    #[error("resampling exhausted after {0} draws")]
    ExhaustedResampling(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
